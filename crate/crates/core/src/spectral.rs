//! Spectra, steady states and eigenbasis expansions of superoperators.

use std::io::Write;

use faer::linalg::solvers::Solve;
use faer::Mat;
use thiserror::Error;

use crate::krylov::{smallest_real, KrylovError, KrylovOptions};
use crate::liouville::{devectorize, s_symmetry, vectorize, DensityMatrix, LiouvilleError, Ordering, SuperVector, Superoperator};
use crate::linalg::{self, vdot, vnorm};
use crate::C64;

/// Largest superoperator handled by the dense eigensolver.
pub const DENSE_DIM_LIMIT: usize = 4096;
/// Above this dimension [`steady_state`] switches to the Krylov solver.
pub const AUTO_DENSE_LIMIT: usize = 1024;
/// Relative degeneracy tolerance (fraction of the spectral spread).
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-7;
/// Steady states may have eigenvalues down to this before being rejected.
pub const PSD_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("dimension {dim} exceeds the dense limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("no steady state: ground eigenvalue {ground} ({reason})")]
    NoSteadyState { ground: C64, reason: String },
    #[error("defective eigenvalue {eigenvalue} (eigenvector Gram singular value {smallest:e})")]
    Defective { eigenvalue: C64, smallest: f64 },
    #[error("complex eigenvalue {0} has no conjugate partner")]
    UnpairedEigenvalue(C64),
    #[error("spectrum carries no eigenvectors")]
    NoEigenvectors,
    #[error("spectrum is partial; a complete eigenbasis is required")]
    Incomplete,
    #[error("steady state is not positive (smallest eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("every one of the {0} computed eigenvalues is degenerate with the ground state")]
    DegeneracyExceedsRequest(usize),
    #[error("eigenbasis expansion failed: residual {residual:e}, condition estimate {condition:e}")]
    IllConditioned { residual: f64, condition: f64 },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error(transparent)]
    Krylov(#[from] KrylovError),
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Raw eigenvalues sorted by real part, then imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Blocked supervectors, parallel to `eigenvalues`; empty if not requested.
    pub eigenvectors: Vec<SuperVector>,
    pub shift: f64,
    /// Real-part spread of the full spectrum, or an upper bound for partial spectra.
    pub spread: f64,
    pub ground_is_real: bool,
    /// `Re(E_1 - E_0)`, `NaN` with fewer than two eigenvalues.
    pub gap: f64,
    /// Whether every eigenvalue is present.
    pub complete: bool,
}

impl SpectrumResult {
    fn from_sorted(mut eigenvalues: Vec<C64>, eigenvectors: Vec<SuperVector>, shift: f64, spread: Option<f64>) -> SpectrumResult {
        let computed = eigenvalues.last().map_or(0.0, |l| l.re) - eigenvalues.first().map_or(0.0, |f| f.re);
        let complete = spread.is_none();
        let spread = spread.unwrap_or(computed).max(f64::MIN_POSITIVE);
        let imag_tol = 1e-9 * spread.max(1.0);
        if let Some(e0) = eigenvalues.first_mut() {
            if e0.im.abs() <= imag_tol {
                e0.im = 0.0;
            }
        }
        let ground_is_real = eigenvalues.first().is_some_and(|e| e.im == 0.0);
        let gap = if eigenvalues.len() >= 2 { eigenvalues[1].re - eigenvalues[0].re } else { f64::NAN };
        SpectrumResult { eigenvalues, eigenvectors, shift, spread, ground_is_real, gap, complete }
    }

    pub fn ground(&self) -> C64 {
        self.eigenvalues[0]
    }

    /// Eigenvalues with the identity shift restored.
    pub fn unshifted(&self) -> Vec<C64> {
        self.eigenvalues.iter().map(|e| e - self.shift).collect()
    }

    /// Write one `re im` line per eigenvalue.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for e in &self.eigenvalues {
            writeln!(w, "{} {}", e.re, e.im)?;
        }
        Ok(())
    }
}

fn cmp_c64(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Sort by real part; runs of real parts closer than `tol` are ordered by
/// imaginary part so conjugate partners sit next to each other.
fn sort_spectrum(values: &[C64], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| cmp_c64(&values[i], &values[j]));
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]].re - values[order[end - 1]].re <= tol {
            end += 1;
        }
        order[start..end].sort_by(|&i, &j| values[i].im.total_cmp(&values[j].im));
        start = end;
    }
    order
}

/// Groups of consecutive indices whose eigenvalues agree within `tol`.
fn clusters(values: &[C64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut used = vec![false; values.len()];
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        let mut j = i + 1;
        while j < values.len() && (values[j] - values[i]).norm() <= tol && !used[j] {
            j += 1;
        }
        for u in used.iter_mut().take(j).skip(i) {
            *u = true;
        }
        out.push(i..j);
    }
    out
}

fn column(m: &Mat<C64>, j: usize) -> Vec<C64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

fn normalized(mut v: Vec<C64>) -> Vec<C64> {
    let n = vnorm(&v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    v
}

/// Orthonormalize `candidates`, keeping at most `keep` vectors.
fn gram_schmidt(candidates: Vec<Vec<C64>>, keep: usize, drop_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for mut c in candidates {
        if basis.len() == keep {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let h = vdot(b, &c);
                linalg::axpy(-h, b, &mut c);
            }
        }
        if vnorm(&c) > drop_tol {
            basis.push(normalized(c));
        }
    }
    basis
}

fn blocked(data: Vec<C64>) -> SuperVector {
    SuperVector::new(data, Ordering::Blocked).expect("superoperator dimensions are powers of four")
}

/// Replace the eigenbasis by an `S`-adapted one: `S`-invariant vectors for
/// real clusters, and partners `v' = S v` for conjugate clusters.
fn adapt_to_s(values: &[C64], vectors: &mut [Vec<C64>], tol: f64) {
    let groups = clusters(values, tol);
    let mut done = vec![false; groups.len()];
    for (g, range) in groups.iter().enumerate() {
        if done[g] {
            continue;
        }
        let e = values[range.start];
        if e.im.abs() <= tol {
            let d = range.len();
            let mut cand = Vec::with_capacity(2 * d);
            for v in &vectors[range.clone()] {
                let sv = s_symmetry(&blocked(v.clone())).into_data();
                cand.push(v.iter().zip(&sv).map(|(a, b)| a + b).collect());
                cand.push(v.iter().zip(&sv).map(|(a, b)| (a - b) * C64::new(0.0, 1.0)).collect());
            }
            let basis = gram_schmidt(cand, d, 1e-6);
            if basis.len() == d {
                for (slot, b) in vectors[range.clone()].iter_mut().zip(basis) {
                    *slot = b;
                }
            }
            done[g] = true;
        } else if e.im > 0.0 {
            if let Some(p) = groups.iter().position(|r| (values[r.start] - e.conj()).norm() <= tol && r.len() == range.len()) {
                let partners: Vec<Vec<C64>> =
                    vectors[range.clone()].iter().map(|v| s_symmetry(&blocked(v.clone())).into_data()).collect();
                for (slot, v) in vectors[groups[p].clone()].iter_mut().zip(partners) {
                    *slot = v;
                }
                done[p] = true;
            }
            done[g] = true;
        }
    }
}

fn check_pairs(values: &mut [C64], tol: f64) -> Result<(), SpectralError> {
    let n = values.len();
    let mut matched = vec![false; n];
    for i in 0..n {
        if matched[i] || values[i].im.abs() <= tol {
            if values[i].im.abs() <= tol {
                values[i].im = 0.0;
            }
            continue;
        }
        let target = values[i].conj();
        let partner = (0..n)
            .filter(|&j| j != i && !matched[j])
            .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()));
        match partner {
            Some(j) if (values[j] - target).norm() <= tol.max(1e-12) * 10.0 => {
                let re = 0.5 * (values[i].re + values[j].re);
                let im = 0.5 * (values[i].im - values[j].im);
                values[i] = C64::new(re, im);
                values[j] = C64::new(re, -im);
                matched[i] = true;
                matched[j] = true;
            }
            _ => return Err(SpectralError::UnpairedEigenvalue(values[i])),
        }
    }
    Ok(())
}

fn check_defective(values: &[C64], vectors: &[Vec<C64>], tol: f64) -> Result<(), SpectralError> {
    for range in clusters(values, tol) {
        let d = range.len();
        if d < 2 {
            continue;
        }
        let vs = &vectors[range.clone()];
        let g = Mat::from_fn(d, d, |i, j| vdot(&vs[i], &vs[j]));
        let sv = g.singular_values().map_err(|e| SpectralError::Eigensolver(format!("{e:?}")))?;
        let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if smallest < 1e-6 {
            return Err(SpectralError::Defective { eigenvalue: values[range.start], smallest });
        }
    }
    Ok(())
}

fn dense_checked(sup: &Superoperator) -> Result<Mat<C64>, SpectralError> {
    if sup.dim() > DENSE_DIM_LIMIT {
        return Err(SpectralError::TooLarge { dim: sup.dim(), limit: DENSE_DIM_LIMIT });
    }
    Ok(sup.to_dense())
}

/// All eigenvalues, without eigenvectors.
pub fn full_eigenvalues(sup: &Superoperator) -> Result<SpectrumResult, SpectralError> {
    let m = dense_checked(sup)?;
    let raw: Vec<C64> = if sup.is_hermitian() {
        linalg::hermitian_eigenvalues(&m).into_iter().map(|e| C64::new(e, 0.0)).collect()
    } else {
        m.eigenvalues().map_err(|e| SpectralError::Eigensolver(format!("{e:?}")))?
    };
    let spread = spread_of(&raw);
    let order = sort_spectrum(&raw, 1e-12 * spread.max(1.0));
    let mut values: Vec<C64> = order.iter().map(|&i| raw[i]).collect();
    if sup.is_s_symmetric() {
        check_pairs(&mut values, 1e-9 * spread.max(1.0))?;
        let order = sort_spectrum(&values, 1e-12 * spread.max(1.0));
        values = order.iter().map(|&i| values[i]).collect();
    }
    Ok(SpectrumResult::from_sorted(values, Vec::new(), sup.shift(), None))
}

fn spread_of(values: &[C64]) -> f64 {
    let lo = values.iter().map(|e| e.re).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
    (hi - lo).max(0.0)
}

/// Complete eigendecomposition by a dense solver (dimension at most 4096).
///
/// Hermitian superoperators go to the self-adjoint solver. For `S`-symmetric
/// superoperators complex eigenvalues are paired exactly and the eigenbasis
/// is adapted to `S`.
pub fn full_spectrum(sup: &Superoperator) -> Result<SpectrumResult, SpectralError> {
    let m = dense_checked(sup)?;
    let n = m.nrows();
    let (raw, vecs): (Vec<C64>, Vec<Vec<C64>>) = if sup.is_hermitian() {
        let (vals, u) = linalg::hermitian_eigen(&m);
        (vals.into_iter().map(|e| C64::new(e, 0.0)).collect(), (0..n).map(|j| column(&u, j)).collect())
    } else {
        let e = m.eigen().map_err(|e| SpectralError::Eigensolver(format!("{e:?}")))?;
        let s = e.S().column_vector();
        let u = e.U();
        let vals = (0..n).map(|i| s[i]).collect();
        let vecs = (0..n).map(|j| normalized((0..n).map(|i| u[(i, j)]).collect())).collect();
        (vals, vecs)
    };
    let spread = spread_of(&raw);
    let scale = spread.max(1.0);
    let order = sort_spectrum(&raw, 1e-12 * scale);
    let mut values: Vec<C64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors: Vec<Vec<C64>> = order.iter().map(|&i| vecs[i].clone()).collect();
    let s_sym = sup.is_s_symmetric();
    if s_sym {
        check_pairs(&mut values, 1e-9 * scale)?;
        let order = sort_spectrum(&values, 1e-12 * scale);
        values = order.iter().map(|&i| values[i]).collect();
        vectors = order.iter().map(|&i| vectors[i].clone()).collect();
    }
    let cluster_tol = DEFAULT_DEGENERACY_TOL * scale;
    if !sup.is_hermitian() {
        check_defective(&values, &vectors, cluster_tol)?;
    }
    if s_sym {
        adapt_to_s(&values, &mut vectors, cluster_tol);
    }
    let eigenvectors = vectors.into_iter().map(blocked).collect();
    Ok(SpectrumResult::from_sorted(values, eigenvectors, sup.shift(), None))
}

/// The `k` eigenpairs of smallest real part by restarted Arnoldi.
///
/// The reported spread is twice the operator norm bound.
pub fn extremal_spectrum(sup: &Superoperator, k: usize, opts: &KrylovOptions) -> Result<SpectrumResult, SpectralError> {
    let bound = sup.norm_bound();
    let r = smallest_real(sup, k, sup.is_hermitian(), bound, opts)?;
    let mut values = r.values;
    let mut vectors = r.vectors;
    let scale = (2.0 * bound).max(1.0);
    if sup.is_s_symmetric() {
        adapt_to_s(&values, &mut vectors, DEFAULT_DEGENERACY_TOL * scale);
    }
    for v in values.iter_mut() {
        if v.im.abs() <= 1e-9 * scale {
            v.im = 0.0;
        }
    }
    let eigenvectors = vectors.into_iter().map(blocked).collect();
    Ok(SpectrumResult::from_sorted(values, eigenvectors, sup.shift(), Some(2.0 * bound)))
}

/// Number of eigenvalues within `rel_tol * spread` of the ground eigenvalue.
pub fn degeneracy(spec: &SpectrumResult, rel_tol: f64) -> usize {
    let tol = rel_tol * spec.spread;
    let e0 = spec.eigenvalues[0];
    spec.eigenvalues.iter().filter(|e| (*e - e0).norm() <= tol).count()
}

#[derive(Debug, Clone)]
pub enum SteadyState {
    Unique(DensityMatrix),
    /// Hermitian basis of a degenerate ground space.
    Degenerate { basis: Vec<Mat<C64>>, degeneracy: usize },
}

impl SteadyState {
    pub fn degeneracy(&self) -> usize {
        match self {
            SteadyState::Unique(_) => 1,
            SteadyState::Degenerate { degeneracy, .. } => *degeneracy,
        }
    }

    pub fn unique(&self) -> Option<&DensityMatrix> {
        match self {
            SteadyState::Unique(r) => Some(r),
            SteadyState::Degenerate { .. } => None,
        }
    }
}

/// Rotate a supervector so its matrix has real positive trace, or failing
/// that so it is invariant under `S`.
pub fn phase_fix(v: &SuperVector) -> SuperVector {
    let m = devectorize(v);
    let tr = linalg::trace(&m);
    let norm = v.norm();
    if tr.norm() > 1e-8 * norm {
        return v.scaled(tr.conj() / tr.norm());
    }
    let theta = v.inner(&s_symmetry(v)).arg();
    v.scaled(C64::from_polar(1.0, theta / 2.0))
}

fn hermitian_from(v: &SuperVector) -> Mat<C64> {
    linalg::hermitian_part(&devectorize(&phase_fix(v)))
}

/// Steady state from a spectrum that carries eigenvectors.
pub fn steady_state_from(spec: &SpectrumResult, rel_tol: f64) -> Result<SteadyState, SpectralError> {
    if spec.eigenvectors.is_empty() {
        return Err(SpectralError::NoEigenvectors);
    }
    if !spec.ground_is_real {
        return Err(SpectralError::NoSteadyState { ground: spec.ground(), reason: "ground eigenvalue is complex".into() });
    }
    let d = degeneracy(spec, rel_tol);
    if d == 1 {
        let m = hermitian_from(&spec.eigenvectors[0]);
        let tr = linalg::trace(&m).re;
        if tr.abs() < 1e-10 {
            return Err(SpectralError::NoSteadyState { ground: spec.ground(), reason: "ground eigenvector is traceless".into() });
        }
        let m = Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / tr);
        let rho = DensityMatrix::from_matrix_unchecked(m);
        let min = rho.eigenvalues()[0];
        if min < -PSD_TOL {
            return Err(SpectralError::NotPositive(min));
        }
        return Ok(SteadyState::Unique(rho));
    }
    if !spec.complete && d == spec.eigenvalues.len() {
        return Err(SpectralError::DegeneracyExceedsRequest(d));
    }
    let basis = spec.eigenvectors[..d]
        .iter()
        .map(|v| {
            let m = hermitian_from(v);
            let tr = linalg::trace(&m).re;
            let s = if tr.abs() > 1e-8 { tr } else { linalg::frobenius(&m) };
            Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / s)
        })
        .collect();
    Ok(SteadyState::Degenerate { basis, degeneracy: d })
}

/// Steady state of an imaginary-time superoperator: dense up to dimension
/// 1024, Krylov with six eigenpairs beyond.
pub fn steady_state(sup: &Superoperator) -> Result<SteadyState, SpectralError> {
    let spec = if sup.dim() <= AUTO_DENSE_LIMIT {
        full_spectrum(sup)?
    } else {
        extremal_spectrum(sup, 6, &KrylovOptions::default())?
    };
    steady_state_from(&spec, DEFAULT_DEGENERACY_TOL)
}

#[derive(Debug, Clone)]
pub struct Expansion {
    /// Coefficients `c_k` with `|rho>> = sum_k c_k |v_k>>`.
    pub coefficients: Vec<C64>,
    /// Index pairs `(k, k')` of conjugate eigenvalues, `Im E_k > 0`.
    pub conjugate_pairs: Vec<(usize, usize)>,
    /// Relative residual of the linear solve.
    pub residual: f64,
    /// Cheap lower bound on the eigenbasis condition number.
    pub condition: f64,
}

impl Expansion {
    /// Indices whose eigenvalues are real.
    pub fn real_modes<'a>(&'a self, spec: &'a SpectrumResult) -> impl Iterator<Item = usize> + 'a {
        (0..self.coefficients.len()).filter(move |&k| spec.eigenvalues[k].im == 0.0)
    }

    /// `sum_k c_k |v_k>>` in blocked order.
    pub fn reconstruct(&self, spec: &SpectrumResult) -> SuperVector {
        let dim = spec.eigenvectors[0].data().len();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (c, v) in self.coefficients.iter().zip(&spec.eigenvectors) {
            linalg::axpy(*c, v.data(), &mut out);
        }
        blocked(out)
    }
}

/// Expand a state in the (complete) right eigenbasis.
pub fn expand_in_eigenbasis(spec: &SpectrumResult, rho0: &DensityMatrix) -> Result<Expansion, SpectralError> {
    if spec.eigenvectors.is_empty() {
        return Err(SpectralError::NoEigenvectors);
    }
    if !spec.complete {
        return Err(SpectralError::Incomplete);
    }
    let x = vectorize(rho0);
    let n = x.data().len();
    let v = Mat::from_fn(n, n, |i, j| spec.eigenvectors[j].data()[i]);
    let rhs = Mat::from_fn(n, 1, |i, _| x.data()[i]);
    let c = v.partial_piv_lu().solve(&rhs);
    let coefficients: Vec<C64> = (0..n).map(|i| c[(i, 0)]).collect();
    let back = &v * &c;
    let xn = vnorm(x.data());
    let residual = (0..n).map(|i| (back[(i, 0)] - rhs[(i, 0)]).norm_sqr()).sum::<f64>().sqrt() / xn;
    let condition = (vnorm(&coefficients) * linalg::frobenius(&v) / (xn * (n as f64).sqrt())).max(1.0);
    if !residual.is_finite() || residual > 1e-8 {
        return Err(SpectralError::IllConditioned { residual, condition });
    }
    let tol = DEFAULT_DEGENERACY_TOL * spec.spread.max(1.0);
    let mut conjugate_pairs = Vec::new();
    let mut taken = vec![false; n];
    for k in 0..n {
        let e = spec.eigenvalues[k];
        if e.im <= 0.0 || taken[k] {
            continue;
        }
        // Match each positive-imaginary eigenvector to the vector equal to its S image.
        let sv = s_symmetry(&spec.eigenvectors[k]);
        let partner = (0..n).filter(|&j| !taken[j] && (spec.eigenvalues[j] - e.conj()).norm() <= tol).max_by(|&a, &b| {
            sv.inner(&spec.eigenvectors[a]).norm().total_cmp(&sv.inner(&spec.eigenvectors[b]).norm())
        });
        if let Some(j) = partner {
            taken[k] = true;
            taken[j] = true;
            conjugate_pairs.push((k, j));
        }
    }
    Ok(Expansion { coefficients, conjugate_pairs, residual, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{build_imag_superop, vectorize_matrix};
    use crate::models::{build_corner, Boundary, Corner, LatticeSpec, LindbladGenerator};
    use crate::pauli::{OperatorSum, PauliString};

    pub(crate) fn complex_pair_model() -> LindbladGenerator {
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        let z: PauliString = "Z".parse().unwrap();
        let s = 3f64.sqrt() * 0.5;
        let l = OperatorSum::from_terms(1, [(C64::new(s, 0.0), x), (C64::new(0.0, s), y), (C64::new(s, 0.0), z)]).unwrap();
        LindbladGenerator::new(OperatorSum::from(x), vec![l]).unwrap()
    }

    fn lat(n: usize, bc: Boundary) -> LatticeSpec {
        LatticeSpec::new(n, bc).unwrap()
    }

    #[test]
    fn sorting_groups_conjugates() {
        let v = [C64::new(1.0, 2.0), C64::new(0.0, 0.0), C64::new(1.0 + 1e-15, -2.0), C64::new(0.5, 0.0)];
        let o = sort_spectrum(&v, 1e-12);
        assert_eq!(o, vec![1, 3, 2, 0]);
    }

    #[test]
    fn complex_pairs_are_exact_and_partnered() {
        let sup = build_imag_superop(&complex_pair_model()).unwrap();
        let spec = full_spectrum(&sup).unwrap();
        let complex: Vec<&C64> = spec.eigenvalues.iter().filter(|e| e.im != 0.0).collect();
        assert_eq!(complex.len(), 2);
        assert_eq!(*complex[0], complex[1].conj());
        let i = spec.eigenvalues.iter().position(|e| e.im > 0.0).unwrap();
        let j = spec.eigenvalues.iter().position(|e| e.im < 0.0).unwrap();
        let sv = s_symmetry(&spec.eigenvectors[i]);
        for (a, b) in sv.data().iter().zip(spec.eigenvectors[j].data()) {
            assert!((a - b).norm() < 1e-12);
        }
        // Residual check on the partner.
        let dense = sup.to_dense();
        let mut out = vec![C64::new(0.0, 0.0); 4];
        crate::linalg::LinearOperator::apply(&dense, spec.eigenvectors[j].data(), &mut out);
        for (o, v) in out.iter().zip(spec.eigenvectors[j].data()) {
            assert!((o - spec.eigenvalues[j] * v).norm() < 1e-10);
        }
    }

    #[test]
    fn expansion_reconstructs_with_complex_modes() {
        let sup = build_imag_superop(&complex_pair_model()).unwrap();
        let spec = full_spectrum(&sup).unwrap();
        let rho = DensityMatrix::maximally_mixed(1);
        let ex = expand_in_eigenbasis(&spec, &rho).unwrap();
        assert_eq!(ex.conjugate_pairs.len(), 1);
        let (k, j) = ex.conjugate_pairs[0];
        assert!((ex.coefficients[j] - ex.coefficients[k].conj()).norm() < 1e-10);
        let back = ex.reconstruct(&spec);
        let want = vectorize(&rho);
        for (a, b) in back.data().iter().zip(want.data()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn expansion_of_mixed_state_corner_11() {
        let sup = build_imag_superop(&build_corner(Corner::Aspt, &lat(2, Boundary::Periodic))).unwrap();
        let spec = full_spectrum(&sup).unwrap();
        let rho = DensityMatrix::maximally_mixed(4);
        let ex = expand_in_eigenbasis(&spec, &rho).unwrap();
        let back = ex.reconstruct(&spec);
        let err: f64 = back.data().iter().zip(vectorize(&rho).data()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-8);
    }

    #[test]
    fn steady_state_of_corner_10() {
        // sigma maximally mixed, tau polarized along +x.
        let sup = build_imag_superop(&build_corner(Corner::TrivialMixed, &lat(2, Boundary::Periodic))).unwrap();
        let ss = steady_state(&sup).unwrap();
        let rho = ss.unique().unwrap();
        let plus = [C64::new(0.5, 0.0); 4];
        let tau = crate::liouville::DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let single = crate::linalg::kron(&Mat::from_fn(2, 2, |i, j| if i == j { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) }), tau.matrix());
        let want = crate::linalg::kron(&single, &single);
        assert!(crate::linalg::max_abs_diff(rho.matrix(), &want) < 1e-9);
        let _ = plus;
    }

    #[test]
    fn degenerate_open_chain() {
        let sup = build_imag_superop(&build_corner(Corner::Aspt, &lat(2, Boundary::Open))).unwrap();
        let spec = full_spectrum(&sup).unwrap();
        let d = degeneracy(&spec, DEFAULT_DEGENERACY_TOL);
        assert!(d > 1);
        match steady_state_from(&spec, DEFAULT_DEGENERACY_TOL).unwrap() {
            SteadyState::Degenerate { basis, degeneracy } => {
                assert_eq!(degeneracy, d);
                for m in basis {
                    assert!(crate::linalg::hermiticity_defect(&m) < 1e-12);
                }
            }
            SteadyState::Unique(_) => panic!("expected a degenerate ground space"),
        }
    }

    #[test]
    fn extremal_agrees_with_dense() {
        let sup = build_imag_superop(&build_corner(Corner::Aspt, &lat(2, Boundary::Periodic))).unwrap();
        let full = full_eigenvalues(&sup).unwrap();
        let ext = extremal_spectrum(&sup, 4, &KrylovOptions::default()).unwrap();
        for k in 0..4 {
            assert!((full.eigenvalues[k] - ext.eigenvalues[k]).norm() < 1e-8, "{:?} vs {:?}", &full.eigenvalues[..6], ext.eigenvalues);
        }
        assert!((full.gap - ext.gap).abs() < 1e-8);
    }

    #[test]
    fn dense_limit_enforced() {
        let sup = build_imag_superop(&build_corner(Corner::Aspt, &lat(4, Boundary::Periodic))).unwrap();
        assert!(matches!(full_spectrum(&sup), Err(SpectralError::TooLarge { .. })));
    }

    #[test]
    fn spectrum_text_dump() {
        let sup = build_imag_superop(&complex_pair_model()).unwrap();
        let spec = full_eigenvalues(&sup).unwrap();
        let mut buf = Vec::new();
        spec.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        let first: Vec<f64> = text.lines().next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(first[0], spec.eigenvalues[0].re);
    }

    #[test]
    fn phase_fix_restores_trace() {
        let m = Mat::from_fn(2, 2, |i, j| if i == j { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) });
        let v = vectorize_matrix(&m).unwrap().scaled(C64::from_polar(1.0, 1.1));
        let f = phase_fix(&v);
        let back = devectorize(&f);
        assert!((back[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15);
    }
}
