// Ball-count densities of positive and signed sets.

use apset::generators::{perturbed_lattice, IndexBox, LatticeMatrix};
use apset::ap_functions::ExpPolynomial;
use apset::matching::{card_bound, center_sweep, density};
use apset::measures::signed_density;
use apset::model::Point;
use apset::signed_examples::theorem1_set;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = LatticeMatrix::scalar(1, 2.0)?;
    let f = vec![ExpPolynomial::sine(vec![1.0], 0.1)?];
    let a = perturbed_lattice(&gamma, &f, &IndexBox::symmetric(1, 1000)?)?.set;
    let table = density(&a, &[Point::scalar(0.0)], &[10.0, 100.0, 1000.0])?;
    for row in &table.rows {
        println!("R = {:>6}: {} points, density {:.4}", row.radius, row.count, row.density);
    }
    let centers = center_sweep(a.window(), 1.0, 0.1)?;
    println!("largest unit-ball count: {}", card_bound(&a, &centers)?);

    let signed = theorem1_set(4096)?;
    let t = signed_density(&signed, &[Point::scalar(1.0)], &[100.0, 1000.0])?;
    println!("signed density of the 2-adic set: {}", t.estimate);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
