//! Linear and Renyi-2 observables, correlation lengths, symmetry indicators
//! and supervector entanglement.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liouville::{reorder, DensityMatrix, Ordering, SuperVector};
use crate::models::{string_operator, Boundary, LatticeSpec};
use crate::pauli::{OperatorSum, Pauli, PauliString};
use crate::C64;

/// Correlators at or below this magnitude carry no usable signal.
pub const SIGNAL_FLOOR: f64 = 1e-12;
/// Relative tolerance for grouping Schmidt weights into levels.
pub const SCHMIDT_LEVEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("string order needs i < j, got ({0}, {1})")]
    BadStringEnds(usize, usize),
    #[error("cut after site {cut} is not inside a {n_sites}-site chain")]
    BadCut { cut: usize, n_sites: usize },
    #[error("operator acts on {found} qubits, state on {expected}")]
    RegisterMismatch { expected: usize, found: usize },
    #[error("symmetry operator must be a single Pauli word with unit-modulus coefficient")]
    NotUnitaryWord,
    #[error("only {usable} correlators above the noise floor; need 3")]
    NoSignal { usable: usize },
    #[error("singular value decomposition failed: {0}")]
    Svd(String),
}

/// Single-spin operator placed on a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalObservable {
    SigmaX,
    SigmaY,
    SigmaZ,
    TauX,
    TauY,
    TauZ,
}

impl LocalObservable {
    pub fn at(self, lattice: &LatticeSpec, site: usize) -> Result<PauliString, ObservableError> {
        if site >= lattice.n_sites {
            return Err(ObservableError::SiteOutOfRange { site, n_sites: lattice.n_sites });
        }
        Ok(match self {
            LocalObservable::SigmaX => lattice.sigma_op(site, Pauli::X),
            LocalObservable::SigmaY => lattice.sigma_op(site, Pauli::Y),
            LocalObservable::SigmaZ => lattice.sigma_op(site, Pauli::Z),
            LocalObservable::TauX => lattice.tau_op(site, Pauli::X),
            LocalObservable::TauY => lattice.tau_op(site, Pauli::Y),
            LocalObservable::TauZ => lattice.tau_op(site, Pauli::Z),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            LocalObservable::SigmaX => "sigma_x",
            LocalObservable::SigmaY => "sigma_y",
            LocalObservable::SigmaZ => "sigma_z",
            LocalObservable::TauX => "tau_x",
            LocalObservable::TauY => "tau_y",
            LocalObservable::TauZ => "tau_z",
        }
    }
}

impl fmt::Display for LocalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LocalObservable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "sigma_x" => LocalObservable::SigmaX,
            "sigma_y" => LocalObservable::SigmaY,
            "sigma_z" => LocalObservable::SigmaZ,
            "tau_x" => LocalObservable::TauX,
            "tau_y" => LocalObservable::TauY,
            "tau_z" => LocalObservable::TauZ,
            _ => return Err(format!("unknown local observable {s:?}")),
        })
    }
}

fn check_register(rho: &DensityMatrix, n: usize) -> Result<(), ObservableError> {
    if rho.n_qubits() != n {
        return Err(ObservableError::RegisterMismatch { expected: rho.n_qubits(), found: n });
    }
    Ok(())
}

/// `tr(rho O)`.
pub fn expect_linear(rho: &DensityMatrix, op: &OperatorSum) -> Result<C64, ObservableError> {
    check_register(rho, op.n_qubits())?;
    let m = rho.matrix();
    let mut total = C64::new(0.0, 0.0);
    for (c, w) in op.terms() {
        let mut s = C64::new(0.0, 0.0);
        for b in 0..rho.dim() as u64 {
            let (row, val) = w.apply_basis(b);
            s += m[(b as usize, row as usize)] * val;
        }
        total += c * s;
    }
    Ok(total)
}

/// `M O` with `O` applied from the right.
fn right_multiply(m: &Mat<C64>, op: &OperatorSum) -> Mat<C64> {
    let d = m.nrows();
    let mut out = Mat::<C64>::zeros(d, d);
    for (c, w) in op.terms() {
        for j in 0..d as u64 {
            let (k, val) = w.apply_basis(j);
            let f = c * val;
            for i in 0..d {
                out[(i, j as usize)] += m[(i, k as usize)] * f;
            }
        }
    }
    out
}

fn trace_product(a: &Mat<C64>, b: &Mat<C64>) -> C64 {
    let d = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// `tr(rho O rho O^dagger) / tr(rho^2)`, the doubled-state expectation of `O (x) O^*`.
pub fn expect_renyi2(rho: &DensityMatrix, op: &OperatorSum) -> Result<C64, ObservableError> {
    check_register(rho, op.n_qubits())?;
    let a = right_multiply(rho.matrix(), op);
    let b = right_multiply(rho.matrix(), &op.adjoint());
    Ok(trace_product(&a, &b) / rho.purity())
}

fn pair(lattice: &LatticeSpec, obs: LocalObservable, i: usize, j: usize) -> Result<(OperatorSum, OperatorSum, OperatorSum), ObservableError> {
    let oi = obs.at(lattice, i)?;
    let oj = obs.at(lattice, j)?;
    let prod = oi.mul(&oj).expect("same register");
    Ok((oi.into(), oj.into(), prod.into()))
}

/// `<O_i O_j> - <O_i><O_j>`.
pub fn corr_linear(rho: &DensityMatrix, lattice: &LatticeSpec, obs: LocalObservable, i: usize, j: usize) -> Result<f64, ObservableError> {
    let (oi, oj, prod) = pair(lattice, obs, i, j)?;
    let c = expect_linear(rho, &prod)? - expect_linear(rho, &oi)? * expect_linear(rho, &oj)?;
    Ok(c.re)
}

/// `<<O_i O_j (x) O_i^* O_j^*>> - <<O_i (x) O_i^*>> <<O_j (x) O_j^*>>`.
pub fn corr_renyi2(rho: &DensityMatrix, lattice: &LatticeSpec, obs: LocalObservable, i: usize, j: usize) -> Result<f64, ObservableError> {
    let (oi, oj, prod) = pair(lattice, obs, i, j)?;
    let c = expect_renyi2(rho, &prod)? - expect_renyi2(rho, &oi)? * expect_renyi2(rho, &oj)?;
    Ok(c.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CorrelationKind {
    Linear,
    Renyi2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub kind: CorrelationKind,
    pub observable: LocalObservable,
    /// Chord distances `min(r, N - r)` on rings, plain separations on open chains.
    pub separations: Vec<usize>,
    pub values: Vec<f64>,
}

/// Correlators between site 0 and every distinct separation.
pub fn correlation_series(
    rho: &DensityMatrix,
    lattice: &LatticeSpec,
    obs: LocalObservable,
    kind: CorrelationKind,
) -> Result<CorrelationSeries, ObservableError> {
    let n = lattice.n_sites;
    let max_r = match lattice.boundary {
        Boundary::Periodic => n / 2,
        Boundary::Open => n - 1,
    };
    let mut separations = Vec::new();
    let mut values = Vec::new();
    for r in 0..=max_r {
        let c = match kind {
            CorrelationKind::Linear => corr_linear(rho, lattice, obs, 0, r)?,
            CorrelationKind::Renyi2 => corr_renyi2(rho, lattice, obs, 0, r)?,
        };
        separations.push(r);
        values.push(c);
    }
    Ok(CorrelationSeries { kind, observable: obs, separations, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Xi {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationLength {
    pub xi: Xi,
    pub slope: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fit `ln |C(r)| = c - r / xi` over points above [`SIGNAL_FLOOR`].
///
/// A non-negative slope is reported as an infinite length.
pub fn fit_corr_length(series: &CorrelationSeries) -> Result<CorrelationLength, ObservableError> {
    let pts: Vec<(f64, f64)> = series
        .separations
        .iter()
        .zip(&series.values)
        .filter(|(_, v)| v.abs() > SIGNAL_FLOOR)
        .map(|(&r, v)| (r as f64, v.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(ObservableError::NoSignal { usable: pts.len() });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    let xi = if slope < -1e-12 { Xi::Finite(-1.0 / slope) } else { Xi::Infinite };
    Ok(CorrelationLength { xi, slope, r_squared, points: pts.len() })
}

/// `tr(rho Z_i prod X_tau Z_j)`.
pub fn string_order(rho: &DensityMatrix, lattice: &LatticeSpec, i: usize, j: usize) -> Result<f64, ObservableError> {
    for s in [i, j] {
        if s >= lattice.n_sites {
            return Err(ObservableError::SiteOutOfRange { site: s, n_sites: lattice.n_sites });
        }
    }
    let w = string_operator(lattice, i, j).ok_or(ObservableError::BadStringEnds(i, j))?;
    Ok(expect_linear(rho, &w.into())?.re)
}

fn unitary_word(op: &OperatorSum) -> Result<(), ObservableError> {
    match op.single_word() {
        Some((c, _)) if (c.norm() - 1.0).abs() < 1e-12 => Ok(()),
        _ => Err(ObservableError::NotUnitaryWord),
    }
}

/// `|tr(rho K)|`.
pub fn strong_symmetry_indicator(rho: &DensityMatrix, k: &OperatorSum) -> Result<f64, ObservableError> {
    unitary_word(k)?;
    Ok(expect_linear(rho, k)?.norm())
}

/// `tr(rho U rho U^dagger) / tr(rho^2)`.
pub fn weak_symmetry_indicator(rho: &DensityMatrix, u: &OperatorSum) -> Result<f64, ObservableError> {
    unitary_word(u)?;
    Ok(expect_renyi2(rho, u)?.re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// Sites `0..cut` form the left block.
    pub cut: usize,
    /// Normalized Schmidt weights, descending.
    pub probabilities: Vec<f64>,
    /// Von Neumann entropy of the weights.
    pub entropy: f64,
    /// Multiplicities of the leading weight levels (up to four).
    pub levels: Vec<usize>,
    /// Size of the leading level.
    pub leading_multiplicity: usize,
    /// Splitting between the leading level and the next, over the spread inside it.
    pub gap_ratio: f64,
    /// Entanglement cuts crossed by the bipartition: two on a ring, one on an open chain.
    pub boundaries: usize,
    /// Integer `d` with `d^boundaries` equal to the leading multiplicity, if any.
    pub per_boundary_degeneracy: Option<usize>,
}

fn integer_root(value: usize, k: usize) -> Option<usize> {
    (1..=value).find(|d| d.pow(k as u32) == value)
}

/// Schmidt spectrum of a supervector across the cut after site `cut - 1`.
pub fn supervector_entanglement(v: &SuperVector, lattice: &LatticeSpec, cut: usize) -> Result<EntanglementReport, ObservableError> {
    let n = lattice.n_sites;
    if cut == 0 || cut >= n {
        return Err(ObservableError::BadCut { cut, n_sites: n });
    }
    if v.n_qubits() != lattice.n_qubits() {
        return Err(ObservableError::RegisterMismatch { expected: lattice.n_qubits(), found: v.n_qubits() });
    }
    let inter = reorder(v, Ordering::Interleaved);
    // Each site holds two qubits, four on the doubled register.
    let rows = 1usize << (4 * cut);
    let cols = inter.data().len() / rows;
    let m = Mat::from_fn(rows, cols, |i, j| inter.data()[i * cols + j]);
    let mut sv = m.singular_values().map_err(|e| ObservableError::Svd(format!("{e:?}")))?;
    sv.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sv.iter().map(|s| s * s).sum();
    let probabilities: Vec<f64> = sv.iter().map(|s| s * s / total).collect();
    let entropy = -probabilities.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>();

    let significant: Vec<f64> = probabilities.iter().copied().filter(|&p| p > SIGNAL_FLOOR).collect();
    let mut levels = Vec::new();
    let mut start = 0;
    while start < significant.len() && levels.len() < 4 {
        let head = significant[start];
        let mut end = start + 1;
        while end < significant.len() && head - significant[end] <= SCHMIDT_LEVEL_TOL * head {
            end += 1;
        }
        levels.push(end - start);
        start = end;
    }
    let lead = levels.first().copied().unwrap_or(0);
    let gap_ratio = if lead == 0 {
        0.0
    } else {
        let top = significant[0];
        let bottom = significant[lead - 1];
        let next = probabilities.get(lead).copied().unwrap_or(0.0);
        (bottom - next) / (top - bottom).max(1e-16 * top)
    };
    let boundaries = match lattice.boundary {
        Boundary::Periodic if n >= 2 => 2,
        _ => 1,
    };
    Ok(EntanglementReport {
        cut,
        probabilities,
        entropy,
        per_boundary_degeneracy: integer_root(lead, boundaries),
        leading_multiplicity: lead,
        levels,
        gap_ratio,
        boundaries,
    })
}
