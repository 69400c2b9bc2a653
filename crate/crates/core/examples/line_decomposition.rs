// Writes a set on the line as `a_k = D·k + f(k)` and checks how well `f`
// repeats under integer shifts.

use apset::generators::{sine_example, IndexBox};
use apset::one_dim::{counting, decompose, f_shift_quality, sort_line};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = sine_example(1, &IndexBox::symmetric(1, 5000)?)?.set;
    let line = sort_line(&a)?;
    println!("n(100) = {}, n(-100) = {}", counting(&line, 100.0)?, counting(&line, -100.0)?);

    let d = decompose(&line)?;
    println!("D = {:.9}, discrepancy = {}", d.slope, d.discrepancy);
    for q in [1, 44, 710] {
        println!("sup |f(m + {q}) - f(m)| = {:.3e}", f_shift_quality(&d.f, q)?);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
