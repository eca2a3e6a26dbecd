// Full spectrum with a complex conjugate pair, and the expansion of an
// initial state into right eigenvectors.

use imag_lindblad::prelude::*;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    // H = X, L = sqrt(3) (sigma^- + Z/2)
    let k = 3f64.sqrt() / 2.0;
    let l = OperatorSum::from_terms(1, [(C64::new(k, 0.0), "X".parse()?), (C64::new(0.0, k), "Y".parse()?), (C64::new(k, 0.0), "Z".parse()?)])?;
    let h = OperatorSum::from_terms(1, [(C64::new(1.0, 0.0), "X".parse()?)])?;
    let gen = LindbladGenerator::new(h, vec![l])?;
    let sup = build_imag_superop(&gen)?;
    let spec = full_spectrum(&sup)?;
    for e in spec.unshifted() {
        println!("E = {:+.4} {:+.4}i", e.re, e.im);
    }
    println!("gap {:.4}, ground real {}", spec.gap, spec.ground_is_real);

    let rho0 = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let exp = expand_in_eigenbasis(&spec, &rho0)?;
    for (i, c) in exp.coefficients.iter().enumerate() {
        println!("c{i} = {:+.4} {:+.4}i", c.re, c.im);
    }
    println!("conjugate pairs {:?}, residual {:.1e}", exp.conjugate_pairs, exp.residual);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
