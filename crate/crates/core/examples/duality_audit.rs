// Domain-wall decoration as a Clifford map and the b <-> 1-b duality it induces.

use imag_lindblad::duality::{audit, write_audit_table};
use imag_lindblad::prelude::*;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let lattice = LatticeSpec::new(2, Boundary::Periodic)?;
    let udw = DomainWallDuality::new(&lattice);
    for (name, w) in [
        ("sigma^x_0", lattice.sigma_op(0, Pauli::X)),
        ("tau^x_0", lattice.tau_op(0, Pauli::X)),
        ("sigma^z_1", lattice.sigma_op(1, Pauli::Z)),
        ("sigma^y_0", lattice.sigma_op(0, Pauli::Y)),
    ] {
        println!("{name:>10}: {w} -> {}", udw.conjugate_pauli(&w)?);
    }
    let rows = audit(&[0.0, 0.5, 1.0], &[0.2, 0.5], &lattice);
    write_audit_table(&rows, 1e-8, std::io::stdout().lock())?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
