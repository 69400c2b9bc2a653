// Smooths a discrete set with a bump and measures how much the result moves
// under a shift.

use apset::ap_functions::Grid;
use apset::measures::{convolve, weak_ap_sup_diff, Mollifier};
use apset::model::{Point, PointMultiSet, Window};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let phi = Mollifier::new(0.4)?;
    println!("sup |phi'| = {:.6} at |x| = {:.6}", phi.deriv_sup(), phi.deriv_argmax());

    let a = PointMultiSet::from_points(
        Window::interval(-100.0, 100.0)?,
        (-100..=100).map(|k| Point::scalar(k as f64)),
    )?;
    let g = convolve(&a, &phi, &Point::scalar(0.25))?;
    println!("g(0.25) = {:.6}", g.value);

    let grid = Grid::new(Window::interval(-50.0, 50.0)?, 1e-3)?;
    for tau in [1.0, 0.5] {
        let d = weak_ap_sup_diff(&a, &phi, &Point::scalar(tau), &grid)?;
        println!("sup |g(x + {tau}) - g(x)| = {d:.6}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
