// Trigonometric sums, their certified shift bounds and a grid lower bound.

use apset::ap_functions::{grid_sup_diff, ExpPolynomial, Grid};
use apset::model::{Point, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = ExpPolynomial::sine(vec![1.0], 0.2)?;
    let g = f.add(&ExpPolynomial::cosine(vec![2f64.sqrt()], 0.1)?)?;
    println!("terms: {}, coefficient mass: {}", g.terms().len(), g.coefficient_mass());

    for tau in [3.0, 44.0, 710.0] {
        let t = Point::scalar(tau);
        let certified = f.shift_bound(&t)?;
        let grid = Grid::new(Window::interval(-50.0, 50.0)?, 1e-3)?;
        let sampled = grid_sup_diff(&f, &t, &grid)?;
        println!("tau = {tau:>5}: sampled {sampled:.3e} <= certified {certified:.3e}");
        assert!(sampled <= certified + 1e-12);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
