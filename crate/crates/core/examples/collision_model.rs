// Ancilla collision steps: single-step defect against the generator, and
// repeated imaginary-time collisions relaxing to a Gibbs state.

use faer::Mat;
use imag_lindblad::prelude::*;

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let z: PauliString = "Z".parse()?;
    let x: PauliString = "X".parse()?;
    let beta = 0.5;
    let spec = GibbsSpec::new(&[z.into()], &[x.into()], beta)?;
    let gen = build_stabilizer_gibbs(&spec);
    let sup = build_imag_superop(&gen)?;

    let rho = DensityMatrix::maximally_mixed(1).into_matrix();
    let lr = sup.act(&rho)?;
    for d in [1e-2, 1e-3, 1e-4] {
        let step = collision_step_imag(&gen, &rho, d)?;
        let first = Mat::from_fn(2, 2, |i, j| rho[(i, j)] - lr[(i, j)] * d);
        println!("d_tau {d:.0e}  defect {:.3e}", imag_lindblad::linalg::frobenius(&(&step - &first)));
    }

    let mut m = rho;
    for _ in 0..4000 {
        m = collision_step_imag(&gen, &m, 5e-3)?;
        let tr = imag_lindblad::linalg::trace(&m);
        m = Mat::from_fn(2, 2, |i, j| m[(i, j)] / tr);
    }
    let exact = gibbs_state(&[z], beta)?;
    let got = DensityMatrix::from_matrix_unchecked(m);
    println!("collisions vs Gibbs: trace distance {:.2e}", got.trace_distance(&exact));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
