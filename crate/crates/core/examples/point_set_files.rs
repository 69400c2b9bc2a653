// Writes a set in the text format, reads it back and runs the command-line
// front end on it.

use apset::cli::{format, run};
use apset::signed_examples::theorem2_set;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("apset-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("theorem2.txt");

    let a = theorem2_set(64)?;
    format::write(&path, &a)?;
    let text = std::fs::read_to_string(&path)?;
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    assert_eq!(format::read(&path)?, a);

    let report = dir.join("density.json");
    let code = run([
        "apset",
        "--report",
        report.to_str().ok_or("path")?,
        "density",
        path.to_str().ok_or("path")?,
        "--radii",
        "10,31",
        "--centers",
        "1",
    ]);
    println!("density exit code {code}: {}", std::fs::read_to_string(&report)?.len());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
