//! Imaginary-time propagation and the collision-model discretization.

use std::time::{Duration, Instant};

use faer::Mat;
use thiserror::Error;

use crate::liouville::{devectorize_slice, vectorize, DensityMatrix, LiouvilleError, SuperKind, Superoperator};
use crate::linalg::{self, adjoint, expm, hermitian_function, trace_distance, LinearOperator};
use crate::models::LindbladGenerator;
use crate::pauli::{OperatorSum, PauliError, PauliString, DENSE_QUBIT_LIMIT};
use crate::C64;

/// Largest Hermitian superoperator exponentiated exactly.
pub const EXACT_HERMITIAN_DIM: usize = 4096;
/// Largest non-Hermitian superoperator exponentiated densely.
pub const EXACT_GENERAL_DIM: usize = 1024;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("no steady state reached: {diagnostic}")]
    NoSteadyState { diagnostic: String },
    #[error("gave up after {steps} steps (last increment {increment:e})")]
    Timeout { steps: usize, increment: f64 },
    #[error("propagation needs an imaginary-time superoperator")]
    WrongKind,
    #[error("step {d_tau} times norm bound {bound} exceeds 1 for the Taylor integrator")]
    StepTooLarge { d_tau: f64, bound: f64 },
    #[error("state trace vanished or diverged at step {0}")]
    Vanished(usize),
    #[error("collision model needs {0} system qubits plus an ancilla, above the dense limit")]
    TooLarge(usize),
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagateOptions {
    pub d_tau: f64,
    pub max_steps: usize,
    /// Stop once the trace distance between consecutive states drops below this.
    pub tol: f64,
    /// Window of increments inspected when the step budget runs out.
    pub window: usize,
    pub timeout: Option<Duration>,
    /// Always take the fourth-order polynomial step, even where an exact propagator fits.
    pub polynomial: bool,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        PropagateOptions { d_tau: 0.05, max_steps: 200_000, tol: 1e-10, window: 200, timeout: None, polynomial: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub tau: f64,
    /// Trace distance to the previous normalized state.
    pub increment: f64,
    /// Trace of the state before renormalization.
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    ExactHermitian,
    ExactGeneral,
    Taylor4,
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub state: DensityMatrix,
    pub steps: usize,
    pub integrator: Integrator,
    pub log: Vec<TrajectoryRecord>,
}

enum Stepper<'a> {
    Dense(Mat<C64>),
    Taylor(&'a Superoperator, f64),
}

impl Stepper<'_> {
    fn step(&self, x: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        match self {
            Stepper::Dense(p) => p.apply(x, out),
            Stepper::Taylor(s, dt) => {
                // exp(-dt S) x to fourth order.
                out.copy_from_slice(x);
                let mut term = x.to_vec();
                for k in 1..=4 {
                    s.apply(&term, scratch);
                    let f = C64::new(-dt / k as f64, 0.0);
                    for (t, v) in term.iter_mut().zip(scratch.iter()) {
                        *t = v * f;
                    }
                    linalg::axpy(C64::new(1.0, 0.0), &term, out);
                }
            }
        }
    }
}

fn trace_of(v: &[C64], d: usize) -> C64 {
    (0..d).map(|i| v[i * d + i]).sum()
}

/// Integrate `d rho / d tau = -L^I(rho)` with trace renormalization after
/// every step until successive states agree to `opts.tol` in trace distance.
///
/// Hermitian superoperators up to dimension 4096 and general ones up to 1024
/// use the exact step propagator; larger ones a fourth-order Taylor step with
/// `d_tau * ||L^I|| <= 1`.
pub fn propagate_imag(sup: &Superoperator, rho0: &DensityMatrix, opts: &PropagateOptions) -> Result<Propagation, EvolveError> {
    if sup.kind() != SuperKind::ImagTime {
        return Err(EvolveError::WrongKind);
    }
    let dt = opts.d_tau;
    let dim = sup.dim();
    let (stepper, integrator) = if !opts.polynomial && sup.is_hermitian() && dim <= EXACT_HERMITIAN_DIM {
        (Stepper::Dense(hermitian_function(&sup.to_dense(), |e| C64::new((-dt * e).exp(), 0.0))), Integrator::ExactHermitian)
    } else if !opts.polynomial && dim <= EXACT_GENERAL_DIM {
        let m = sup.to_dense();
        let a = Mat::from_fn(dim, dim, |i, j| m[(i, j)] * -dt);
        (Stepper::Dense(expm(&a)), Integrator::ExactGeneral)
    } else {
        let bound = sup.norm_bound();
        if dt * bound > 1.0 {
            return Err(EvolveError::StepTooLarge { d_tau: dt, bound });
        }
        (Stepper::Taylor(sup, dt), Integrator::Taylor4)
    };
    let d = rho0.dim();
    let mut v = vectorize(rho0).into_data();
    let mut next = vec![C64::new(0.0, 0.0); v.len()];
    let mut scratch = vec![C64::new(0.0, 0.0); v.len()];
    let mut prev = rho0.matrix().clone();
    let mut log = Vec::new();
    let started = Instant::now();
    for step in 1..=opts.max_steps {
        stepper.step(&v, &mut next, &mut scratch);
        let tr = trace_of(&next, d);
        if !tr.re.is_finite() || tr.norm() < 1e-300 {
            return Err(EvolveError::Vanished(step));
        }
        let inv = tr.inv();
        for x in next.iter_mut() {
            *x *= inv;
        }
        std::mem::swap(&mut v, &mut next);
        let cur = devectorize_slice(&v)?;
        let increment = trace_distance(&cur, &prev);
        prev = cur;
        log.push(TrajectoryRecord { step, tau: step as f64 * dt, increment, norm: tr.re });
        if increment < opts.tol {
            let m = linalg::hermitian_part(&prev);
            return Ok(Propagation { state: DensityMatrix::from_matrix_unchecked(m), steps: step, integrator, log });
        }
        if opts.timeout.is_some_and(|t| started.elapsed() > t) {
            return Err(EvolveError::Timeout { steps: step, increment });
        }
    }
    Err(stall_diagnostic(&log, opts))
}

/// Classify a run that used up its step budget.
fn stall_diagnostic(log: &[TrajectoryRecord], opts: &PropagateOptions) -> EvolveError {
    let last = log.last().map_or(f64::NAN, |r| r.increment);
    let w = opts.window.min(log.len() / 2).max(1);
    if log.len() >= 2 * w {
        let recent = &log[log.len() - w..];
        let earlier = &log[log.len() - 2 * w..log.len() - w];
        let mean = |s: &[TrajectoryRecord]| s.iter().map(|r| r.increment).sum::<f64>() / s.len() as f64;
        let (m_recent, m_earlier) = (mean(recent), mean(earlier));
        if m_recent > 0.5 * m_earlier {
            return EvolveError::NoSteadyState {
                diagnostic: format!(
                    "increments stalled near {m_recent:e} over the last {} steps (previous window {m_earlier:e}); \
                     the ground eigenvalue may be complex or degenerate",
                    2 * w
                ),
            };
        }
    }
    EvolveError::Timeout { steps: log.len(), increment: last }
}

fn ancilla_coupling(gen: &LindbladGenerator, l: &OperatorSum, d_tau: f64, h_weight: f64) -> Result<OperatorSum, EvolveError> {
    // sigma^+ = |1><0| = (X - iY)/2, sigma^- = (X + iY)/2 on the ancilla.
    let x: PauliString = "X".parse()?;
    let y: PauliString = "Y".parse()?;
    let plus = OperatorSum::from_terms(1, [(C64::new(0.5, 0.0), x), (C64::new(0.0, -0.5), y)])?;
    let minus = plus.adjoint();
    let h = gen.hamiltonian().tensor(&OperatorSum::identity(1))?;
    let s = d_tau.sqrt();
    let g = &(&(&h * (d_tau * h_weight)) + &(&l.tensor(&plus)? * s)) + &(&l.adjoint().tensor(&minus)? * s);
    Ok(g)
}

/// `Tr_a[A (rho (x) |0><0|) A^dagger]`.
fn dilate_and_trace(a: &Mat<C64>, rho: &Mat<C64>) -> Mat<C64> {
    let d = rho.nrows();
    // Columns of A restricted to ancilla |0>: system index s maps to row/col 2s.
    let a0 = Mat::from_fn(2 * d, d, |r, s| a[(r, 2 * s)]);
    let full = &a0 * rho * adjoint(&a0);
    Mat::from_fn(d, d, |i, j| full[(2 * i, 2 * j)] + full[(2 * i + 1, 2 * j + 1)])
}

fn collision_step(gen: &LindbladGenerator, rho: &Mat<C64>, d_tau: f64, real_time: bool) -> Result<Mat<C64>, EvolveError> {
    let n = gen.n_qubits();
    if n + 1 > DENSE_QUBIT_LIMIT {
        return Err(EvolveError::TooLarge(n));
    }
    let f = move |e: f64| if real_time { C64::new(0.0, -e).exp() } else { C64::new((-e).exp(), 0.0) };
    if gen.jumps().is_empty() {
        let u = hermitian_function(&gen.hamiltonian().realize_dense()?, |e| f(e * d_tau));
        return Ok(&u * rho * adjoint(&u));
    }
    let weight = 1.0 / gen.jumps().len() as f64;
    let mut state = rho.clone();
    for l in gen.jumps() {
        let g = ancilla_coupling(gen, l, d_tau, weight)?.realize_dense()?;
        let m = hermitian_function(&g, f);
        state = dilate_and_trace(&m, &state);
    }
    Ok(state)
}

/// One imaginary-time collision step: for every jump `L`, with `m` jumps,
/// `M = exp(-(H d/m (x) I + sqrt(d) (L (x) s+ + L^dagger (x) s-)))` and
/// `rho -> Tr_a[M (rho (x) |0><0|) M]`. Not trace preserving.
pub fn collision_step_imag(gen: &LindbladGenerator, rho: &Mat<C64>, d_tau: f64) -> Result<Mat<C64>, EvolveError> {
    collision_step(gen, rho, d_tau, false)
}

/// The real-time counterpart with `U = exp(-i(...))`.
pub fn collision_step_real(gen: &LindbladGenerator, rho: &Mat<C64>, d_t: f64) -> Result<Mat<C64>, EvolveError> {
    collision_step(gen, rho, d_t, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{build_imag_superop, build_real_superop};
    use crate::models::{build_corner, single_qubit_dephasing_pair, Boundary, Corner, LatticeSpec};
    use crate::spectral::{steady_state, SteadyState};

    fn amplitude_damping(rate: f64) -> LindbladGenerator {
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        let z: PauliString = "Z".parse().unwrap();
        let s = rate.sqrt() * 0.5;
        let l = OperatorSum::from_terms(1, [(C64::new(s, 0.0), x), (C64::new(0.0, s), y)]).unwrap();
        LindbladGenerator::new(OperatorSum::from_word(C64::new(0.3, 0.0), &z), vec![l]).unwrap()
    }

    fn state(p: f64, coh: C64) -> Mat<C64> {
        Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(p, 0.0),
            (1, 1) => C64::new(1.0 - p, 0.0),
            (0, 1) => coh,
            _ => coh.conj(),
        })
    }

    #[test]
    fn single_qubit_warm_up_converges_to_maximally_mixed() {
        let sup = build_imag_superop(&single_qubit_dephasing_pair()).unwrap();
        let rho0 = DensityMatrix::new(state(0.9, C64::new(0.1, 0.2))).unwrap();
        let out = propagate_imag(&sup, &rho0, &PropagateOptions::default()).unwrap();
        assert!(out.state.trace_distance(&DensityMatrix::maximally_mixed(1)) < 1e-9);
        assert_eq!(out.integrator, Integrator::ExactHermitian);
        assert!(out.log.windows(2).all(|w| w[1].step == w[0].step + 1));
    }

    #[test]
    fn propagation_agrees_with_spectral_steady_state() {
        let lat = LatticeSpec::new(2, Boundary::Periodic).unwrap();
        let sup = build_imag_superop(&build_corner(Corner::Aspt, &lat)).unwrap();
        let SteadyState::Unique(want) = steady_state(&sup).unwrap() else { panic!("degenerate") };
        let out = propagate_imag(&sup, &DensityMatrix::maximally_mixed(4), &PropagateOptions::default()).unwrap();
        assert!(out.state.trace_distance(&want) < 1e-8);
    }

    #[test]
    fn taylor_step_guard() {
        // Amplitude damping on six qubits is non-Hermitian and too large for expm.
        let n = 6;
        let jumps = (0..n)
            .map(|q| {
                let x = PauliString::single(n, q, crate::pauli::Pauli::X).unwrap();
                let y = PauliString::single(n, q, crate::pauli::Pauli::Y).unwrap();
                &(&OperatorSum::from(x) * 0.5) + &(&OperatorSum::from(y) * C64::new(0.0, -0.5))
            })
            .collect();
        let gen = LindbladGenerator::new(OperatorSum::zero(n), jumps).unwrap();
        let sup = build_imag_superop(&gen).unwrap();
        let opts = PropagateOptions { d_tau: 1.0, ..Default::default() };
        assert!(matches!(
            propagate_imag(&sup, &DensityMatrix::maximally_mixed(n), &opts),
            Err(EvolveError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn polynomial_step_reaches_the_same_state() {
        let lat = LatticeSpec::new(2, Boundary::Periodic).unwrap();
        let sup = build_imag_superop(&build_corner(Corner::Aspt, &lat)).unwrap();
        let rho0 = DensityMatrix::maximally_mixed(4);
        let exact = propagate_imag(&sup, &rho0, &PropagateOptions::default()).unwrap();
        let d_tau = 0.9 / sup.norm_bound();
        let poly = propagate_imag(&sup, &rho0, &PropagateOptions { d_tau, polynomial: true, ..Default::default() }).unwrap();
        assert_eq!(poly.integrator, Integrator::Taylor4);
        assert!(exact.state.trace_distance(&poly.state) < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let sup = build_imag_superop(&single_qubit_dephasing_pair()).unwrap();
        let rho0 = DensityMatrix::new(state(0.9, C64::new(0.0, 0.0))).unwrap();
        let opts = PropagateOptions { d_tau: 1e-4, max_steps: 10, tol: 1e-14, window: 2, timeout: None, polynomial: false };
        let err = propagate_imag(&sup, &rho0, &opts).unwrap_err();
        assert!(matches!(err, EvolveError::NoSteadyState { .. } | EvolveError::Timeout { .. }));
    }

    #[test]
    fn real_superop_is_rejected() {
        let sup = build_real_superop(&single_qubit_dephasing_pair()).unwrap();
        assert!(matches!(
            propagate_imag(&sup, &DensityMatrix::maximally_mixed(1), &PropagateOptions::default()),
            Err(EvolveError::WrongKind)
        ));
    }

    fn defect(gen: &LindbladGenerator, d: f64, real: bool) -> f64 {
        let rho = state(0.7, C64::new(0.2, -0.1));
        let (step, sup) = if real {
            (collision_step_real(gen, &rho, d).unwrap(), build_real_superop(gen).unwrap())
        } else {
            (collision_step_imag(gen, &rho, d).unwrap(), build_imag_superop(gen).unwrap())
        };
        let gen_rho = sup.act(&rho).unwrap();
        let sign = if real { d } else { -d };
        let first = Mat::from_fn(2, 2, |i, j| rho[(i, j)] + gen_rho[(i, j)] * sign);
        linalg::frobenius(&(&step - &first))
    }

    #[test]
    fn collision_defect_is_higher_order() {
        for real in [false, true] {
            for gen in [amplitude_damping(0.8), single_qubit_dephasing_pair()] {
                let (d1, d2) = (1e-2, 1e-3);
                let slope = (defect(&gen, d1, real).ln() - defect(&gen, d2, real).ln()) / (d1 / d2).ln();
                assert!(slope > 1.4, "slope {slope} real={real}");
            }
        }
    }

    #[test]
    fn real_collision_step_preserves_trace() {
        let rho = state(0.3, C64::new(0.1, 0.1));
        let out = collision_step_real(&amplitude_damping(0.5), &rho, 0.05).unwrap();
        assert!((linalg::trace(&out) - C64::new(1.0, 0.0)).norm() < 1e-13);
    }
}
