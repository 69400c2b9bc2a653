// Is a shift an ε-almost period? Windowed bottleneck matching between `A`
// and `A + τ` on the sine example.

use apset::generators::{sine_example, IndexBox};
use apset::matching::{bottleneck_eps, is_eps_period, MatchPolicy};
use apset::model::Point;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = sine_example(1, &IndexBox::symmetric(1, 3000)?)?.set;
    let policy = MatchPolicy::new(1.0)?;
    for tau in [1.0, 44.0, 710.0] {
        let report = bottleneck_eps(&a, &Point::scalar(tau), &policy)?;
        println!(
            "tau = {tau:>5}: eps* = {:.3e} ({} + {} inner slots)",
            report.eps_star, report.inner_counts.0, report.inner_counts.1
        );
    }
    assert!(is_eps_period(&a, &Point::scalar(710.0), 1e-4, &policy)?);
    assert!(!is_eps_period(&a, &Point::scalar(0.5), 0.1, &policy)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
