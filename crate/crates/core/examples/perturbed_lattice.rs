// A perturbed lattice in the plane, `a_k = kΓ + F(k)`, with its certified
// lattice shifts.

use apset::ap_functions::ExpPolynomial;
use apset::generators::{min_separation, perturbed_lattice, IndexBox, LatticeMatrix};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = LatticeMatrix::new(vec![vec![1.0, 0.0], vec![0.5, 1.0]])?;
    let f = vec![
        ExpPolynomial::sine(vec![1.0, 0.0], 0.1)?,
        ExpPolynomial::cosine(vec![0.0, 1.0], 0.1)?,
    ];
    let lattice = perturbed_lattice(&gamma, &f, &IndexBox::symmetric(2, 20)?)?;
    println!(
        "{} points, injective: {}, separation {:.3}",
        lattice.set.len(),
        lattice.is_injective(),
        min_separation(&lattice.set)?
    );
    for p in lattice.certified_periods(0.05, 30)?.iter().take(5) {
        println!("r = {:?} -> tau = {}, displacement < {}", p.r, p.tau, p.set_eps);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
