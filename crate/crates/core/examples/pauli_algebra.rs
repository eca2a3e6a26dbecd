// Exact Pauli-word arithmetic and symbolic operator sums.

use imag_lindblad::prelude::*;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let x: PauliString = "XYZ".parse()?;
    let z: PauliString = "ZII".parse()?;
    let prod = pauli_mul(&x, &z)?;
    println!("{x} * {z} = {prod}");
    println!("XYZ and ZII commute: {}", commutes(&x, &z));
    println!("XYZ and ZZZ commute: {}", commutes(&x, &"ZZZ".parse()?));

    // (X - iY)/2 is sigma^+ = |1><0|
    let sp = OperatorSum::from_terms(1, [(C64::new(0.5, 0.0), "X".parse()?), (C64::new(0.0, -0.5), "Y".parse()?)])?;
    let m = sp.realize_dense()?;
    println!("sigma^+ = [[{}, {}], [{}, {}]]", m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let n = &sp.adjoint() * &sp;
    println!("sigma^- sigma^+ = {n}");

    let lattice = LatticeSpec::new(3, Boundary::Periodic)?;
    let k = imag_lindblad::models::strong_symmetry(&lattice);
    for i in 0..3 {
        let s = lattice.cluster_sigma(i).unwrap();
        println!("stabilizer {s} commutes with K = {k}: {}", commutes(&s, &k));
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
