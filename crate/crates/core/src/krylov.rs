//! Restarted Arnoldi with locking for the few eigenvalues of smallest real part.
//!
//! Converged Ritz vectors are locked one per cycle into an orthonormal partial
//! Schur basis `Q` and the iteration continues on `(I - QQ^*) A`. After every
//! lock a seeded random component is mixed into the restart vector so that
//! further copies of a degenerate eigenvalue are reachable.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{axpy, vdot, vnorm, LinearOperator};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOptions {
    pub seed: u64,
    /// Residual tolerance relative to the operator norm bound.
    pub tol: f64,
    pub krylov_dim: usize,
    pub max_restarts: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions { seed: 0x1a5e_ed01, tol: 1e-11, krylov_dim: 48, max_restarts: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KrylovError {
    #[error("asked for {wanted} eigenvalues of a {dim}-dimensional operator")]
    BadRequest { wanted: usize, dim: usize },
    #[error("only {found} of {wanted} eigenpairs converged after {restarts} restarts (best residual {residual:e})")]
    NotConverged { found: usize, wanted: usize, restarts: usize, residual: f64 },
}

#[derive(Debug, Clone)]
pub struct KrylovResult {
    /// Sorted by real part, then imaginary part.
    pub values: Vec<C64>,
    pub vectors: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
    pub matvecs: usize,
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn project_out(basis: &[Vec<C64>], w: &mut [C64]) -> Vec<C64> {
    let mut coeffs = Vec::with_capacity(basis.len());
    for q in basis {
        let h = vdot(q, w);
        axpy(-h, q, w);
        coeffs.push(h);
    }
    coeffs
}

fn normalize(w: &mut [C64]) -> f64 {
    let nrm = vnorm(w);
    if nrm > 0.0 {
        let inv = 1.0 / nrm;
        for x in w.iter_mut() {
            *x *= inv;
        }
    }
    nrm
}

fn cmp_c64(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenpairs of a small dense matrix, sorted by real part.
fn small_eigen(h: &Mat<C64>, hermitian: bool) -> (Vec<C64>, Mat<C64>) {
    let m = h.nrows();
    let (vals, vecs) = if hermitian {
        let sym = Mat::from_fn(m, m, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
        let e = sym.self_adjoint_eigen(Side::Lower).expect("small hermitian eigensolver");
        let s = e.S().column_vector();
        ((0..m).map(|i| C64::new(s[i].re, 0.0)).collect::<Vec<_>>(), e.U().to_owned())
    } else {
        let e = h.eigen().expect("small eigensolver");
        let s = e.S().column_vector();
        ((0..m).map(|i| s[i]).collect::<Vec<_>>(), e.U().to_owned())
    };
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| cmp_c64(&vals[i], &vals[j]));
    let sv = order.iter().map(|&i| vals[i]).collect();
    let su = Mat::from_fn(m, m, |i, j| vecs[(i, order[j])]);
    (sv, su)
}

fn combine(v: &[Vec<C64>], y: &Mat<C64>, col: usize) -> Vec<C64> {
    let n = v[0].len();
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (i, vi) in v.iter().enumerate().take(y.nrows()) {
        axpy(y[(i, col)], vi, &mut x);
    }
    x
}

/// The `k` eigenpairs of smallest real part.
///
/// `norm_bound` should bound the spectral norm; it scales the residual
/// tolerance and the breakdown test. With `hermitian` set the projected
/// matrices are symmetrized and the Ritz values are real.
pub fn smallest_real(
    op: &dyn LinearOperator,
    k: usize,
    hermitian: bool,
    norm_bound: f64,
    opts: &KrylovOptions,
) -> Result<KrylovResult, KrylovError> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(KrylovError::BadRequest { wanted: k, dim: n });
    }
    let scale = norm_bound.max(f64::MIN_POSITIVE);
    let tol = opts.tol * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<C64>> = Vec::new();
    let mut start = random_vector(&mut rng, n);
    let mut matvecs = 0usize;
    let mut restarts = 0usize;
    let mut best_residual = f64::INFINITY;
    let mut w = vec![C64::new(0.0, 0.0); n];

    while locked.len() < k {
        if restarts > opts.max_restarts {
            return Err(KrylovError::NotConverged { found: locked.len(), wanted: k, restarts, residual: best_residual });
        }
        restarts += 1;
        for _ in 0..2 {
            project_out(&locked, &mut start);
        }
        if normalize(&mut start) < 1e-12 {
            start = random_vector(&mut rng, n);
            project_out(&locked, &mut start);
            normalize(&mut start);
        }
        let m_max = opts.krylov_dim.min(n - locked.len()).max(1);
        let mut v: Vec<Vec<C64>> = vec![start.clone()];
        let mut h = Mat::<C64>::zeros(m_max + 1, m_max);
        let mut m = m_max;
        let mut beta = 0.0;
        for j in 0..m_max {
            op.apply(&v[j], &mut w);
            matvecs += 1;
            project_out(&locked, &mut w);
            for _ in 0..2 {
                let coeffs = project_out(&v, &mut w);
                for (i, c) in coeffs.into_iter().enumerate() {
                    h[(i, j)] += c;
                }
            }
            project_out(&locked, &mut w);
            beta = vnorm(&w);
            h[(j + 1, j)] = C64::new(beta, 0.0);
            if beta <= 1e-13 * scale || j + 1 == m_max {
                m = j + 1;
                if beta <= 1e-13 * scale {
                    beta = 0.0;
                }
                break;
            }
            let mut next = w.clone();
            normalize(&mut next);
            v.push(next);
        }
        let hm = Mat::from_fn(m, m, |i, j| h[(i, j)]);
        let (_, y) = small_eigen(&hm, hermitian);
        let residual = |col: usize| beta * y[(m - 1, col)].norm();
        let wanted = k - locked.len();

        // Lock at most one pair per cycle: a single Krylov space holds only one
        // direction of each eigenspace, so further copies need a fresh start.
        let mut newly = 0;
        let r = residual(0);
        best_residual = best_residual.min(r);
        if r <= tol {
            let mut x = combine(&v, &y, 0);
            for _ in 0..2 {
                project_out(&locked, &mut x);
            }
            if normalize(&mut x) > 1e-8 {
                locked.push(x);
                newly = 1;
            }
        }
        if locked.len() >= k {
            break;
        }
        // Restart from the remaining wanted Ritz vectors.
        let mut next = vec![C64::new(0.0, 0.0); n];
        for col in newly..m.min(newly + wanted) {
            let mut x = combine(&v, &y, col);
            normalize(&mut x);
            axpy(C64::new(1.0, 0.0), &x, &mut next);
        }
        if newly > 0 || m < m_max {
            let mut r = random_vector(&mut rng, n);
            project_out(&locked, &mut r);
            normalize(&mut r);
            let nn = vnorm(&next).max(1.0);
            axpy(C64::new(0.1 * nn, 0.0), &r, &mut next);
        }
        start = next;
    }

    // Rayleigh-Ritz on the locked Schur basis.
    let aq: Vec<Vec<C64>> = locked
        .iter()
        .map(|q| {
            let mut out = vec![C64::new(0.0, 0.0); n];
            op.apply(q, &mut out);
            out
        })
        .collect();
    matvecs += k;
    let t = Mat::from_fn(k, k, |i, j| vdot(&locked[i], &aq[j]));
    let (values, y) = small_eigen(&t, hermitian);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for col in 0..k {
        let mut x = combine(&locked, &y, col);
        let mut ax = combine(&aq, &y, col);
        let nrm = normalize(&mut x);
        for a in ax.iter_mut() {
            *a /= nrm;
        }
        axpy(-values[col], &x, &mut ax);
        residuals.push(vnorm(&ax));
        vectors.push(x);
    }
    Ok(KrylovResult { values, vectors, residuals, restarts, matvecs })
}
