// Drive a sweep from a TOML file and print the CSV table.
//
// `cargo run --example sweep_from_config -- path/to/config.toml`

use std::path::PathBuf;

use imag_lindblad::sweep::{run_sweep, write_csv, SweepConfig};

pub fn run_with(path: &std::path::Path) -> Result<(), Box<dyn std::error::Error>> {
    let config = SweepConfig::from_file(path)?;
    let rows = run_sweep(&config, 2)?;
    write_csv(&rows, std::io::stdout().lock())?;
    let failed = rows.iter().filter(|r| r.is_fatal()).count();
    println!("{} rows, {failed} failed", rows.len());
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_with(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/sweep.toml"))
}

#[allow(dead_code)]
fn main() {
    let result = match std::env::args().nth(1) {
        Some(p) => run_with(&PathBuf::from(p)),
        None => run(),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
