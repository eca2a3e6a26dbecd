// Stabilizer Hamiltonians whose imaginary-time fixed point is the Gibbs state.

use imag_lindblad::prelude::*;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let lattice = LatticeSpec::new(2, Boundary::Periodic)?;
    for beta in [0.3, 0.5, 1.0] {
        let spec = GibbsSpec::cluster(&lattice, beta)?;
        let sup = build_imag_superop(&build_stabilizer_gibbs(&spec))?;
        let spectrum = full_spectrum(&sup)?;
        let rho = steady_state(&sup)?;
        let exact = gibbs_state(spec.stabilizers(), beta)?;
        let dist = rho.unique().map(|r| r.trace_distance(&exact)).unwrap_or(f64::NAN);
        println!(
            "beta={beta:.1} gamma={:.4} E0={:.10} predicted={:.10} gap={:.4} |rho - gibbs|={dist:.1e}",
            spec.rate(),
            spectrum.unshifted()[0].re,
            spec.ground_eigenvalue(),
            spectrum.gap,
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
