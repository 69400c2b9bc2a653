// Scans a range of shifts and reports which ones move the set by less
// than ε.

use apset::generators::{sine_example, IndexBox};
use apset::matching::{scan_periods, MatchPolicy};
use apset::model::Point;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = sine_example(1, &IndexBox::symmetric(1, 2000)?)?.set;
    let candidates: Vec<Point> = (1..=400).map(|j| Point::scalar(j as f64)).collect();
    let scan = scan_periods(&a, 0.05, &candidates, &MatchPolicy::new(1.0)?)?;
    println!("0.05-almost periods in 1..=400: {:?}", scan.accepted);
    println!("largest gap: {}", scan.max_gap);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
