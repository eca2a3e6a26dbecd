// Schmidt spectrum of the steady supervector across a spatial cut.

use imag_lindblad::prelude::*;

pub fn run_with(n_sites: usize) -> Result<(), Box<dyn std::error::Error>> {
    let lattice = LatticeSpec::new(n_sites, Boundary::Periodic)?;
    for corner in Corner::ALL {
        let sup = build_imag_superop(&build_corner(corner, &lattice))?;
        let Some(rho) = steady_state(&sup)?.unique().cloned() else { continue };
        let es = supervector_entanglement(&vectorize(&rho), &lattice, n_sites / 2)?;
        let top: Vec<String> = es.probabilities.iter().take(6).map(|p| format!("{p:.4}")).collect();
        println!(
            "corner {}  EE {:.4}  levels {:?}  per cut {:?}  top [{}]",
            corner.label(),
            es.entropy,
            es.levels,
            es.per_boundary_degeneracy,
            top.join(", ")
        );
    }
    Ok(())
}

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    run_with(2)
}

#[allow(dead_code)]
fn main() {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    if let Err(e) = run_with(n) {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
