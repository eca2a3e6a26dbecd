//! Small dense and sparse helpers on top of faer.

use faer::{Mat, Side};

use crate::C64;

/// Square complex CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn from_raw(dim: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<C64>) -> CsrMatrix {
        assert_eq!(row_ptr.len(), dim + 1);
        assert_eq!(col_idx.len(), values.len());
        CsrMatrix { dim, row_ptr, col_idx, values }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut trip: Vec<(usize, usize, C64)>) -> CsrMatrix {
        trip.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx: Vec<usize> = Vec::with_capacity(trip.len());
        let mut values: Vec<C64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { dim, row_ptr, col_idx, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yr = acc;
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let mut t: Vec<(usize, usize, C64)> = self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect();
        t.sort_by_key(|e| (e.0, e.1));
        let a: Vec<(usize, usize, C64)> = self.triplets().collect();
        if a.len() != t.len() {
            return false;
        }
        a.iter().zip(&t).all(|(p, q)| p.0 == q.0 && p.1 == q.1 && (p.2 - q.2).norm() <= tol)
    }
}

/// Anything that can act on a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.matvec(x, y)
    }
}

impl LinearOperator for Mat<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                acc += self[(i, j)] * xj;
            }
            *yi = acc;
        }
    }
}

pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub fn dense_mul(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    a * b
}

pub fn adjoint(a: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { zero() })
}

pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn trace(a: &Mat<C64>) -> C64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

pub fn max_abs_diff(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn frobenius(a: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn hermitian_part(a: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn hermiticity_defect(a: &Mat<C64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..=j.min(a.nrows() - 1) {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// Real copy of a matrix whose entries are all real, else `None`.
pub fn as_real(a: &Mat<C64>) -> Option<Mat<f64>> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if a[(i, j)].im != 0.0 {
                return None;
            }
        }
    }
    Some(Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re))
}

/// Ascending eigenvalues of a Hermitian matrix (lower triangle is read).
pub fn hermitian_eigenvalues(a: &Mat<C64>) -> Vec<f64> {
    let mut ev = match as_real(a) {
        Some(r) => r.self_adjoint_eigenvalues(Side::Lower).expect("symmetric eigensolver failed"),
        None => a.self_adjoint_eigenvalues(Side::Lower).expect("hermitian eigensolver failed"),
    };
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenpairs of a Hermitian matrix; eigenvectors are columns.
pub fn hermitian_eigen(a: &Mat<C64>) -> (Vec<f64>, Mat<C64>) {
    let n = a.nrows();
    let (vals, vecs): (Vec<f64>, Mat<C64>) = match as_real(a) {
        Some(r) => {
            let e = r.self_adjoint_eigen(Side::Lower).expect("symmetric eigensolver failed");
            let s = e.S().column_vector();
            let u = e.U();
            ((0..n).map(|i| s[i]).collect(), Mat::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0)))
        }
        None => {
            let e = a.self_adjoint_eigen(Side::Lower).expect("hermitian eigensolver failed");
            let s = e.S().column_vector();
            let u = e.U();
            ((0..n).map(|i| s[i].re).collect(), Mat::from_fn(n, n, |i, j| u[(i, j)]))
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = Mat::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    (sorted_vals, sorted_vecs)
}

/// `f(A) = U f(D) U^dagger` for Hermitian `A`.
pub fn hermitian_function(a: &Mat<C64>, f: impl Fn(f64) -> C64) -> Mat<C64> {
    let (vals, u) = hermitian_eigen(a);
    let n = a.nrows();
    let fu = Mat::from_fn(n, n, |i, j| u[(i, j)] * f(vals[j]));
    &fu * adjoint(&u)
}

/// `exp(A)` for a general matrix by scaling and squaring a Taylor series.
pub fn expm(a: &Mat<C64>) -> Mat<C64> {
    let n = a.nrows();
    let norm = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let b = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=18 {
        term = &term * &b;
        let inv = 1.0 / k as f64;
        term = Mat::from_fn(n, n, |i, j| term[(i, j)] * inv);
        result = &result + &term;
        if frobenius(&term) < 1e-18 * frobenius(&result) {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Trace norm distance `||a - b||_1 / 2` for Hermitian inputs.
pub fn trace_distance(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let d = hermitian_part(&(a - b));
    hermitian_eigenvalues(&d).iter().map(|e| e.abs()).sum::<f64>() * 0.5
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale_in_place(alpha: C64, x: &mut [C64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}
