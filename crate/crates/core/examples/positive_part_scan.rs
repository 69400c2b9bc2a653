// The positive part of a signed almost periodic set that has no small
// almost periods.

use apset::signed_examples::{max_even_offset, theorem2_set, verify_aplus_not_ap};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 1 << 11;
    let candidates: Vec<f64> = (2..=64).map(|t| t as f64).collect();
    let w = verify_aplus_not_ap(n, 0.1, &candidates, 4.0)?;
    println!("min eps* over tau in 2..=64: {} (at tau = {})", w.min_eps_star, w.witness_tau);

    let (plus, _) = theorem2_set(n)?.split_signs();
    println!("largest offset from an even distance: {:.4}", max_even_offset(&plus));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
