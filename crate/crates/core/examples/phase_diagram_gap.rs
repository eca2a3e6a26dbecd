// Imaginary-Liouville gap over the (a, b) plane.
//
// `cargo run --release --example phase_diagram_gap -- 3` uses three sites.

use imag_lindblad::krylov::KrylovOptions;
use imag_lindblad::prelude::*;
use imag_lindblad::spectral::AUTO_DENSE_LIMIT;

fn gap(a: f64, b: f64, lattice: &LatticeSpec) -> Result<f64, Box<dyn std::error::Error>> {
    let sup = build_imag_superop(&build_interpolated(InterpolationParams::new(a, b)?, lattice))?;
    let spec = if sup.dim() <= AUTO_DENSE_LIMIT {
        imag_lindblad::spectral::full_eigenvalues(&sup)?
    } else {
        extremal_spectrum(&sup, 2, &KrylovOptions::default())?
    };
    Ok(spec.gap)
}

pub fn run_with(n_sites: usize, steps: usize) -> Result<(), Box<dyn std::error::Error>> {
    let lattice = LatticeSpec::new(n_sites, Boundary::Periodic)?;
    let grid: Vec<f64> = (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect();
    print!("  a\\b ");
    for b in &grid {
        print!("{b:>7.2}");
    }
    println!();
    for &a in grid.iter().rev() {
        print!("{a:>5.2} ");
        for &b in &grid {
            print!("{:>7.4}", gap(a, b, &lattice)?);
        }
        println!();
    }
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_with(2, 6)
}

#[allow(dead_code)]
fn main() {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    if let Err(e) = run_with(n, 11) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
