// Steady states of the four fixed-point models, from the spectrum and from
// imaginary-time propagation, with their symmetry and string-order signatures.

use imag_lindblad::models::{strong_symmetry, weak_symmetry};
use imag_lindblad::prelude::*;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let lattice = LatticeSpec::new(2, Boundary::Periodic)?;
    let k: OperatorSum = strong_symmetry(&lattice).into();
    let u: OperatorSum = weak_symmetry(&lattice).into();
    println!("corner  purity  |<K>|  <<UU>>  string  propagated-vs-spectral  steps");
    for corner in Corner::ALL {
        let sup = build_imag_superop(&build_corner(corner, &lattice))?;
        let rho = match steady_state(&sup)? {
            SteadyState::Unique(r) => r,
            SteadyState::Degenerate { degeneracy, .. } => {
                println!("{}  degenerate ({degeneracy})", corner.label());
                continue;
            }
        };
        let prop = propagate_imag(&sup, &DensityMatrix::maximally_mixed(lattice.n_qubits()), &PropagateOptions::default())?;
        println!(
            "{}      {:.4}  {:.4}  {:.4}  {:+.4}  {:.1e}                 {}",
            corner.label(),
            rho.purity(),
            strong_symmetry_indicator(&rho, &k)?,
            weak_symmetry_indicator(&rho, &u)?,
            string_order(&rho, &lattice, 0, 1)?,
            rho.trace_distance(&prop.state),
            prop.steps
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
