// Integer solutions of `|e^{i r λ} - 1| < δ` and the almost periods they
// certify for `0.2 sin x`.

use apset::ap_functions::ExpPolynomial;
use apset::kronecker::{
    common_integer_almost_periods, convergent_candidates, max_gap, project_first, solve_system, KroneckerSystem,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sys = KroneckerSystem::new(vec![vec![1.0]], 1e-3, 2000)?;
    let hits = solve_system(&sys)?;
    println!("|e^(ir) - 1| < 1e-3 for |r| <= 2000: {hits:?}");

    println!("convergent candidates: {:?}", convergent_candidates(1.0, 2000));

    let f = vec![ExpPolynomial::sine(vec![1.0], 0.2)?];
    let periods = common_integer_almost_periods(&f, 1e-4, 1000)?;
    let firsts = project_first(&periods);
    println!("1e-4 periods of 0.2 sin: {firsts:?}, max gap {}", max_gap(&firsts, -1000.0, 1000.0));
    assert!(periods.contains(&vec![710]));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
