//! Density matrices, supervectors and the Lindblad superoperators.
//!
//! Vectorization is row-major: `|rho>> = sum_ij rho_ij |i> (x) |j>`, so
//! `A rho B^dagger` becomes `(A (x) B^*) |rho>>`. On the doubled register the
//! ket copy occupies qubits `0..n` and the bra copy qubits `n..2n`.

use std::io::{Read, Write};

use faer::Mat;
use thiserror::Error;

use crate::linalg::{self, CsrMatrix, LinearOperator};
use crate::models::LindbladGenerator;
use crate::pauli::{OperatorSum, PauliError, Realized, SPARSE_QUBIT_LIMIT};
use crate::C64;

/// Largest doubled register kept as a dense matrix inside a [`Superoperator`].
pub const DENSE_SUPEROP_QUBITS: usize = 10;

const DUMP_MAGIC: &[u8; 4] = b"ILSO";

#[derive(Debug, Error)]
pub enum LiouvilleError {
    #[error("length {0} is not a power of four")]
    NotPowerOfFour(usize),
    #[error("matrix is {0}x{1}, expected a square power of two")]
    BadShape(usize, usize),
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    NotNormalized(f64),
    #[error("matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("generator on {0} qubits is too large for a superoperator")]
    TooLarge(usize),
    #[error("superoperator dump is malformed: {0}")]
    BadDump(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tolerance used when validating density matrices.
pub const STATE_TOL: f64 = 1e-10;

fn log2_exact(d: usize) -> Option<usize> {
    d.is_power_of_two().then(|| d.trailing_zeros() as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: Mat<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(matrix: Mat<C64>) -> Result<DensityMatrix, LiouvilleError> {
        let n = log2_exact(matrix.nrows())
            .filter(|_| matrix.nrows() == matrix.ncols())
            .ok_or(LiouvilleError::BadShape(matrix.nrows(), matrix.ncols()))?;
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > STATE_TOL {
            return Err(LiouvilleError::NotHermitian(defect));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(LiouvilleError::NotNormalized(tr));
        }
        let min = linalg::hermitian_eigenvalues(&linalg::hermitian_part(&matrix))[0];
        if min < -STATE_TOL {
            return Err(LiouvilleError::NotPositive(min));
        }
        Ok(DensityMatrix { n_qubits: n, matrix })
    }

    /// Wraps a matrix without any checks beyond its shape.
    pub fn from_matrix_unchecked(matrix: Mat<C64>) -> DensityMatrix {
        let n = log2_exact(matrix.nrows()).expect("dimension must be a power of two");
        DensityMatrix { n_qubits: n, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> DensityMatrix {
        let d = 1usize << n_qubits;
        let m = Mat::from_fn(d, d, |i, j| if i == j { C64::new(1.0 / d as f64, 0.0) } else { C64::new(0.0, 0.0) });
        DensityMatrix { n_qubits, matrix: m }
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[C64]) -> DensityMatrix {
        let norm = linalg::vnorm(psi).powi(2);
        let d = psi.len();
        let m = Mat::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm);
        DensityMatrix::from_matrix_unchecked(m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for j in 0..d {
            for i in 0..d {
                s += (self.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        s
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&linalg::hermitian_part(&self.matrix))
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        linalg::trace_distance(&self.matrix, &other.matrix)
    }
}

/// Index layout of a supervector on the doubled register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// All ket qubits, then all bra qubits.
    Blocked,
    /// Ket and bra copies of each qubit adjacent.
    Interleaved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperVector {
    n_qubits: usize,
    ordering: Ordering,
    data: Vec<C64>,
}

impl SuperVector {
    pub fn new(data: Vec<C64>, ordering: Ordering) -> Result<SuperVector, LiouvilleError> {
        let len = data.len();
        let bits = log2_exact(len).filter(|b| b % 2 == 0).ok_or(LiouvilleError::NotPowerOfFour(len))?;
        Ok(SuperVector { n_qubits: bits / 2, ordering, data })
    }

    /// System qubits (half the doubled register).
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        linalg::vnorm(&self.data)
    }

    pub fn scaled(&self, c: C64) -> SuperVector {
        SuperVector { data: self.data.iter().map(|x| x * c).collect(), ..*self }
    }

    /// `<<self|other>>`, after bringing both to the same ordering.
    pub fn inner(&self, other: &SuperVector) -> C64 {
        let o = reorder(other, self.ordering);
        linalg::vdot(&self.data, &o.data)
    }
}

pub fn vectorize_matrix(m: &Mat<C64>) -> Result<SuperVector, LiouvilleError> {
    let d = m.nrows();
    if d != m.ncols() || !d.is_power_of_two() {
        return Err(LiouvilleError::BadShape(m.nrows(), m.ncols()));
    }
    let mut data = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            data.push(m[(i, j)]);
        }
    }
    SuperVector::new(data, Ordering::Blocked)
}

pub fn vectorize(rho: &DensityMatrix) -> SuperVector {
    vectorize_matrix(&rho.matrix).expect("density matrices are square powers of two")
}

/// Inverse of [`vectorize`]; accepts either ordering.
pub fn devectorize(v: &SuperVector) -> Mat<C64> {
    let b = reorder(v, Ordering::Blocked);
    let d = 1usize << v.n_qubits;
    Mat::from_fn(d, d, |i, j| b.data[i * d + j])
}

/// Devectorize a raw blocked buffer.
pub fn devectorize_slice(data: &[C64]) -> Result<Mat<C64>, LiouvilleError> {
    let v = SuperVector::new(data.to_vec(), Ordering::Blocked)?;
    Ok(devectorize(&v))
}

/// Blocked position of the `k`-th interleaved bit, both counted from the
/// most significant end.
fn interleaved_source(k: usize, n: usize) -> usize {
    let q = k / 2;
    if k.is_multiple_of(2) {
        q
    } else {
        n + q
    }
}

fn permute_bits(idx: usize, n: usize, to_interleaved: bool) -> usize {
    let total = 2 * n;
    let mut out = 0usize;
    for k in 0..total {
        let src = interleaved_source(k, n);
        let (from, to) = if to_interleaved { (src, k) } else { (k, src) };
        let bit = idx >> (total - 1 - from) & 1;
        out |= bit << (total - 1 - to);
    }
    out
}

/// Change the index layout of a supervector.
pub fn reorder(v: &SuperVector, target: Ordering) -> SuperVector {
    if v.ordering == target {
        return v.clone();
    }
    let n = v.n_qubits;
    let to_interleaved = target == Ordering::Interleaved;
    let mut data = vec![C64::new(0.0, 0.0); v.data.len()];
    for (idx, &x) in v.data.iter().enumerate() {
        data[permute_bits(idx, n, to_interleaved)] = x;
    }
    SuperVector { n_qubits: n, ordering: target, data }
}

/// `S|v>> = P |v^*>>` with `P` swapping ket and bra; maps `|A>>` to `|A^dagger>>`.
pub fn s_symmetry(v: &SuperVector) -> SuperVector {
    let b = reorder(v, Ordering::Blocked);
    let d = 1usize << v.n_qubits;
    let mut data = vec![C64::new(0.0, 0.0); b.data.len()];
    for i in 0..d {
        for j in 0..d {
            data[j * d + i] = b.data[i * d + j].conj();
        }
    }
    reorder(&SuperVector { n_qubits: v.n_qubits, ordering: Ordering::Blocked, data }, v.ordering)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuperKind {
    /// `d rho / dt = L(rho)`.
    RealTime,
    /// `d rho / d tau = -L^I(rho)`.
    ImagTime,
}

#[derive(Debug, Clone)]
pub struct Superoperator {
    n_qubits: usize,
    kind: SuperKind,
    terms: OperatorSum,
    matrix: Realized,
    shift: f64,
}

impl Superoperator {
    /// Wrap a Pauli sum on the doubled register.
    pub fn from_terms(terms: OperatorSum, kind: SuperKind, shift: f64) -> Result<Superoperator, LiouvilleError> {
        let nn = terms.n_qubits();
        if !nn.is_multiple_of(2) || nn > SPARSE_QUBIT_LIMIT {
            return Err(LiouvilleError::TooLarge(nn / 2));
        }
        let matrix = if nn <= DENSE_SUPEROP_QUBITS {
            Realized::Dense(terms.realize_dense()?)
        } else {
            Realized::Sparse(terms.realize_sparse()?)
        };
        Ok(Superoperator { n_qubits: nn / 2, kind, terms, matrix, shift })
    }

    /// System qubits.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << (2 * self.n_qubits)
    }

    pub fn kind(&self) -> SuperKind {
        self.kind
    }

    pub fn terms(&self) -> &OperatorSum {
        &self.terms
    }

    pub fn matrix(&self) -> &Realized {
        &self.matrix
    }

    /// Identity coefficient `-sum_k tr(L_k^dagger L_k) / 2^n` removed from the
    /// raw eigenvalues. Unshifted eigenvalues are `E - shift`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.is_hermitian(1e-14)
    }

    pub fn is_real(&self) -> bool {
        self.terms.is_real(1e-14)
    }

    /// Upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.one_norm()
    }

    /// Whether `S L S^-1 = L` holds term by term.
    pub fn is_s_symmetric(&self) -> bool {
        let n = self.n_qubits;
        let c = self.terms.conj();
        let mut swapped = OperatorSum::zero(2 * n);
        let lo = (1u64 << n) - 1;
        for (coeff, w) in c.terms() {
            let sw = |m: u64| (m & lo) << n | (m >> n);
            let word = crate::pauli::PauliString::new(2 * n, sw(w.x_mask()), sw(w.z_mask()), w.phase())
                .expect("same register");
            swapped.add_word(coeff, &word).expect("same register");
        }
        swapped.max_abs_diff(&self.terms) < 1e-13
    }

    pub fn to_dense(&self) -> Mat<C64> {
        match &self.matrix {
            Realized::Dense(m) => m.clone(),
            Realized::Sparse(s) => s.to_dense(),
        }
    }

    /// Apply to a density-like matrix: `devec(S vec(A))`.
    pub fn act(&self, a: &Mat<C64>) -> Result<Mat<C64>, LiouvilleError> {
        let v = vectorize_matrix(a)?;
        if v.n_qubits != self.n_qubits {
            return Err(LiouvilleError::BadShape(a.nrows(), a.ncols()));
        }
        let mut out = vec![C64::new(0.0, 0.0); v.data.len()];
        self.apply(&v.data, &mut out);
        devectorize_slice(&out)
    }

    /// Little-endian dump: magic, `u64` dimension, `u64` count, then
    /// `(u64 row, u64 col, f64 re, f64 im)` per nonzero entry.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<(), LiouvilleError> {
        let entries: Vec<(usize, usize, C64)> = match &self.matrix {
            Realized::Sparse(s) => s.triplets().collect(),
            Realized::Dense(m) => {
                let mut t = Vec::new();
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        if m[(i, j)] != C64::new(0.0, 0.0) {
                            t.push((i, j, m[(i, j)]));
                        }
                    }
                }
                t
            }
        };
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.dim() as u64).to_le_bytes())?;
        w.write_all(&(entries.len() as u64).to_le_bytes())?;
        for (r, c, v) in entries {
            w.write_all(&(r as u64).to_le_bytes())?;
            w.write_all(&(c as u64).to_le_bytes())?;
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Read a dump written by [`Superoperator::write_binary`].
pub fn read_binary<R: Read>(mut r: R) -> Result<CsrMatrix, LiouvilleError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(LiouvilleError::BadDump("wrong magic".into()));
    }
    let mut u = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8], std::io::Error> {
        r.read_exact(&mut u)?;
        Ok(u)
    };
    let dim = u64::from_le_bytes(next(&mut r)?) as usize;
    let count = u64::from_le_bytes(next(&mut r)?) as usize;
    let mut trip = Vec::with_capacity(count);
    for _ in 0..count {
        let row = u64::from_le_bytes(next(&mut r)?) as usize;
        let col = u64::from_le_bytes(next(&mut r)?) as usize;
        let re = f64::from_le_bytes(next(&mut r)?);
        let im = f64::from_le_bytes(next(&mut r)?);
        if row >= dim || col >= dim {
            return Err(LiouvilleError::BadDump(format!("entry ({row}, {col}) outside dimension {dim}")));
        }
        trip.push((row, col, C64::new(re, im)));
    }
    Ok(CsrMatrix::from_triplets(dim, trip))
}

impl LinearOperator for Superoperator {
    fn dim(&self) -> usize {
        Superoperator::dim(self)
    }
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match &self.matrix {
            Realized::Dense(m) => m.apply(x, y),
            Realized::Sparse(s) => s.matvec(x, y),
        }
    }
}

fn check_size(gen: &LindbladGenerator) -> Result<usize, LiouvilleError> {
    let n = gen.n_qubits();
    if 2 * n > SPARSE_QUBIT_LIMIT {
        return Err(LiouvilleError::TooLarge(n));
    }
    Ok(n)
}

/// `sum_k L_k^dagger L_k`.
fn decay_sum(gen: &LindbladGenerator) -> OperatorSum {
    let mut s = OperatorSum::zero(gen.n_qubits());
    for l in gen.jumps() {
        s = &s + &(&l.adjoint() * l);
    }
    s
}

/// `A (x) B^*` on the doubled register.
fn sandwich(a: &OperatorSum, b: &OperatorSum) -> Result<OperatorSum, LiouvilleError> {
    Ok(a.tensor(&b.conj())?)
}

/// `L^I = H_eff (x) I + I (x) H_eff^* - sum_k L_k (x) L_k^*` with
/// `H_eff = H - 1/2 sum_k L_k^dagger L_k`.
pub fn build_imag_superop(gen: &LindbladGenerator) -> Result<Superoperator, LiouvilleError> {
    let n = check_size(gen)?;
    let id = OperatorSum::identity(n);
    let decay = decay_sum(gen);
    let h_eff = gen.hamiltonian() - &(&decay * 0.5);
    let mut terms = &sandwich(&h_eff, &id)? + &sandwich(&id, &h_eff)?;
    for l in gen.jumps() {
        terms = &terms - &sandwich(l, l)?;
    }
    Superoperator::from_terms(terms, SuperKind::ImagTime, -decay.identity_coeff().re)
}

/// `L = -i H_eff (x) I + i I (x) H_eff^* + sum_k L_k (x) L_k^*` with
/// `H_eff = H - i/2 sum_k L_k^dagger L_k`.
pub fn build_real_superop(gen: &LindbladGenerator) -> Result<Superoperator, LiouvilleError> {
    let n = check_size(gen)?;
    let id = OperatorSum::identity(n);
    let decay = decay_sum(gen);
    let h_eff = gen.hamiltonian() - &(&decay * C64::new(0.0, 0.5));
    let mi = C64::new(0.0, -1.0);
    let mut terms = &(&sandwich(&h_eff, &id)? * mi) - &(&sandwich(&id, &h_eff)? * mi);
    for l in gen.jumps() {
        terms = &terms + &sandwich(l, l)?;
    }
    Superoperator::from_terms(terms, SuperKind::RealTime, -decay.identity_coeff().re)
}
