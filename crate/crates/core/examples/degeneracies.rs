// Ground-space degeneracy of the fixed points on open chains (edge modes)
// versus rings.

use imag_lindblad::prelude::*;
use imag_lindblad::spectral::{full_eigenvalues, DEFAULT_DEGENERACY_TOL};

pub fn run_with(n_sites: usize) -> Result<(), Box<dyn std::error::Error>> {
    for boundary in [Boundary::Open, Boundary::Periodic] {
        let lattice = LatticeSpec::new(n_sites, boundary)?;
        for corner in Corner::ALL {
            let spec = full_eigenvalues(&build_imag_superop(&build_corner(corner, &lattice))?)?;
            let gsd = degeneracy(&spec, DEFAULT_DEGENERACY_TOL);
            println!("N={n_sites} {boundary:<8} corner {}  GSD {gsd:>2}", corner.label());
        }
    }
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_with(2)
}

#[allow(dead_code)]
fn main() {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    if let Err(e) = run_with(n) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
