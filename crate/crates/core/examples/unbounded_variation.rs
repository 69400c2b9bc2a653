// A signed set whose mollified measure is almost periodic although its mass
// near `2^k` grows without bound.

use apset::ap_functions::Grid;
use apset::measures::Mollifier;
use apset::model::Window;
use apset::signed_examples::{theorem1_set, verify_distributional_ap, verify_unbounded_variation};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = theorem1_set(1 << 13)?;
    let var = verify_unbounded_variation(&a, 12)?;
    for row in &var.rows {
        println!("k = {:>2}: variation near 2^k = {}", row.k, row.variation);
    }

    let phi = Mollifier::new(0.4)?;
    let grid = Grid::new(Window::interval(-100.0, 100.0)?, 1e-3)?;
    let weak = verify_distributional_ap(&a, &phi, &[3, 4, 5, 6], 1, &grid, 1e-6)?;
    for row in &weak.rows {
        println!("tau = {:>4}: sup diff {:.4} <= {:.4}", row.tau, row.sup_diff, row.bound);
    }
    assert!(var.holds && weak.holds);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
