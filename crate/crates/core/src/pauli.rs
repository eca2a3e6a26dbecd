//! Pauli words with exact phases, and sums of them.
//!
//! A [`PauliString`] on `n` qubits is stored as two bit masks plus a phase
//! `i^k`. Qubit 0 is the leftmost tensor factor, so it is the most
//! significant bit of a computational-basis index. Words with `x = z = 1` on
//! a qubit denote the Hermitian `Y`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use faer::Mat;
use thiserror::Error;

use crate::linalg::CsrMatrix;
use crate::C64;

pub const MAX_QUBITS: usize = 64;
/// Largest register realized as a dense matrix.
pub const DENSE_QUBIT_LIMIT: usize = 12;
/// Largest register realized at all.
pub const SPARSE_QUBIT_LIMIT: usize = 26;
/// Coefficients at or below this magnitude are dropped from sums.
pub const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("{0} qubits exceeds the {MAX_QUBITS}-qubit word limit")]
    TooManyQubits(usize),
    #[error("qubit {index} out of range for a {n_qubits}-qubit word")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit-count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("cannot parse Pauli word {0:?}")]
    Parse(String),
    #[error("refusing to realize a {n_qubits}-qubit operator as a {kind} matrix (limit {limit})")]
    TooLarge { n_qubits: usize, limit: usize, kind: &'static str },
}

/// A power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Mirror a qubit mask into basis-index bit order (qubit 0 = most significant).
fn to_index_bits(mask: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - n)
    }
}

impl PauliString {
    /// The identity word. Panics if `n_qubits > 64`.
    pub fn identity(n_qubits: usize) -> PauliString {
        assert!(n_qubits <= MAX_QUBITS, "{n_qubits} qubits exceeds the word limit");
        PauliString { n_qubits, x: 0, z: 0, phase: Phase::ONE }
    }

    pub fn new(n_qubits: usize, x: u64, z: u64, phase: Phase) -> Result<PauliString, PauliError> {
        if n_qubits > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n_qubits));
        }
        let m = full_mask(n_qubits);
        if (x | z) & !m != 0 {
            let bad = ((x | z) & !m).trailing_zeros() as usize;
            return Err(PauliError::QubitOutOfRange { index: bad, n_qubits });
        }
        Ok(PauliString { n_qubits, x, z, phase })
    }

    /// Word acting as `p` on the listed qubits and identity elsewhere.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<PauliString, PauliError> {
        let mut w = PauliString::new(n_qubits, 0, 0, Phase::ONE)?;
        for &(q, p) in ops {
            let single = PauliString::single(n_qubits, q, p)?;
            w = w.mul(&single)?;
        }
        Ok(w)
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<PauliString, PauliError> {
        if qubit >= n_qubits {
            return Err(PauliError::QubitOutOfRange { index: qubit, n_qubits });
        }
        let (x, z) = p.bits();
        PauliString::new(n_qubits, (x as u64) << qubit, (z as u64) << qubit, Phase::ONE)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> PauliString {
        self.phase = phase;
        self
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_qubits).filter(move |&q| (self.x | self.z) >> q & 1 == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn mul(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        pauli_mul(self, other)
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        commutes(self, other)
    }

    pub fn adjoint(&self) -> PauliString {
        PauliString { phase: self.phase.conj(), ..*self }
    }

    /// Entrywise complex conjugate of the matrix. `Y^* = -Y`.
    pub fn conj(&self) -> PauliString {
        let flip = if self.y_count() % 2 == 1 { Phase::MINUS_ONE } else { Phase::ONE };
        PauliString { phase: self.phase.conj() * flip, ..*self }
    }

    /// `self (x) other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliString) -> Result<PauliString, PauliError> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let shift = |m: u64| if self.n_qubits == 64 { 0 } else { m << self.n_qubits };
        Ok(PauliString {
            n_qubits: n,
            x: self.x | shift(other.x),
            z: self.z | shift(other.z),
            phase: self.phase * other.phase,
        })
    }

    /// The same word with the phase reset to `+1`.
    pub fn unsigned(&self) -> PauliString {
        PauliString { phase: Phase::ONE, ..*self }
    }

    /// Column action in basis-index convention: `P|b> = value |row>`.
    pub fn apply_basis(&self, b: u64) -> (u64, C64) {
        let xi = to_index_bits(self.x, self.n_qubits);
        let zi = to_index_bits(self.z, self.n_qubits);
        let k = self.phase.exponent() as u32 + (xi & zi).count_ones() + 2 * (zi & b).count_ones();
        (b ^ xi, Phase::from_exponent(k as i64).to_complex())
    }

    pub fn to_dense(&self) -> Result<Mat<C64>, PauliError> {
        OperatorSum::from_word(C64::new(1.0, 0.0), self).realize_dense()
    }
}

/// Exact product of two words.
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> Result<PauliString, PauliError> {
    if p.n_qubits != q.n_qubits {
        return Err(PauliError::SizeMismatch(p.n_qubits, q.n_qubits));
    }
    let x = p.x ^ q.x;
    let z = p.z ^ q.z;
    let k = (p.x & p.z).count_ones() as i64 + (q.x & q.z).count_ones() as i64
        + 2 * (p.z & q.x).count_ones() as i64
        - (x & z).count_ones() as i64;
    Ok(PauliString {
        n_qubits: p.n_qubits,
        x,
        z,
        phase: p.phase * q.phase * Phase::from_exponent(k),
    })
}

/// Whether two words commute, ignoring phases.
pub fn commutes(p: &PauliString, q: &PauliString) -> bool {
    ((p.x & q.z).count_ones() + (p.z & q.x).count_ones()).is_multiple_of(2)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (sign, imag) = match self.phase.exponent() {
            0 => ('+', false),
            1 => ('+', true),
            2 => ('-', false),
            _ => ('-', true),
        };
        write!(f, "{sign}")?;
        if imag {
            write!(f, "i")?;
        }
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PauliError::Parse(s.to_string());
        let mut rest = s.trim();
        let mut k = 0i64;
        if let Some(r) = rest.strip_prefix('-') {
            k += 2;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            k += 1;
            rest = r;
        }
        if rest.is_empty() {
            return Err(err());
        }
        let n = rest.chars().count();
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in rest.chars().enumerate() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(err()),
            };
            let (bx, bz) = p.bits();
            x |= (bx as u64) << q;
            z |= (bz as u64) << q;
        }
        PauliString::new(n, x, z, Phase::from_exponent(k))
    }
}

/// Realized matrix, dense for small registers and CSR otherwise.
#[derive(Debug, Clone)]
pub enum Realized {
    Dense(Mat<C64>),
    Sparse(CsrMatrix),
}

impl Realized {
    pub fn dim(&self) -> usize {
        match self {
            Realized::Dense(m) => m.nrows(),
            Realized::Sparse(m) => m.dim(),
        }
    }
}

/// Linear combination of Pauli words in canonical form.
///
/// Terms are keyed by their masks with the word phase folded into the
/// coefficient, so two sums describing the same operator compare equal term
/// for term.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), C64>,
}

impl OperatorSum {
    pub fn zero(n_qubits: usize) -> OperatorSum {
        assert!(n_qubits <= MAX_QUBITS, "{n_qubits} qubits exceeds the word limit");
        OperatorSum { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize) -> OperatorSum {
        OperatorSum::from_word(C64::new(1.0, 0.0), &PauliString::identity(n_qubits))
    }

    pub fn from_word(coeff: C64, word: &PauliString) -> OperatorSum {
        let mut s = OperatorSum::zero(word.n_qubits);
        s.push(coeff * word.phase.to_complex(), word.x, word.z);
        s
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<OperatorSum, PauliError>
    where
        I: IntoIterator<Item = (C64, PauliString)>,
    {
        if n_qubits > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n_qubits));
        }
        let mut s = OperatorSum::zero(n_qubits);
        for (c, w) in terms {
            s.add_word(c, &w)?;
        }
        Ok(s)
    }

    fn push(&mut self, c: C64, x: u64, z: u64) {
        let e = self.terms.entry((x, z)).or_insert(C64::new(0.0, 0.0));
        *e += c;
        if e.norm() <= DROP_TOL {
            self.terms.remove(&(x, z));
        }
    }

    pub fn add_word(&mut self, coeff: C64, word: &PauliString) -> Result<(), PauliError> {
        if word.n_qubits != self.n_qubits {
            return Err(PauliError::SizeMismatch(self.n_qubits, word.n_qubits));
        }
        self.push(coeff * word.phase.to_complex(), word.x, word.z);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(coefficient, word)` with every word carrying phase `+1`.
    pub fn terms(&self) -> impl Iterator<Item = (C64, PauliString)> + '_ {
        self.terms.iter().map(move |(&(x, z), &c)| {
            (c, PauliString { n_qubits: self.n_qubits, x, z, phase: Phase::ONE })
        })
    }

    /// Coefficient of the unsigned word with the given masks.
    pub fn coeff(&self, word: &PauliString) -> C64 {
        let c = self.terms.get(&(word.x, word.z)).copied().unwrap_or_default();
        c * word.phase.conj().to_complex()
    }

    /// `tr(A) / 2^n`.
    pub fn identity_coeff(&self) -> C64 {
        self.terms.get(&(0, 0)).copied().unwrap_or_default()
    }

    /// If the sum is a single word, return it with its coefficient.
    pub fn single_word(&self) -> Option<(C64, PauliString)> {
        if self.terms.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    /// Sum of coefficient magnitudes, an upper bound on the operator norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, c: C64) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n_qubits);
        for (&(x, z), &v) in &self.terms {
            out.push(v * c, x, z);
        }
        out
    }

    pub fn checked_add(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        if self.n_qubits != other.n_qubits {
            return Err(PauliError::SizeMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = self.clone();
        for (&(x, z), &v) in &other.terms {
            out.push(v, x, z);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        if self.n_qubits != other.n_qubits {
            return Err(PauliError::SizeMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = OperatorSum::zero(self.n_qubits);
        for (ca, a) in self.terms() {
            for (cb, b) in other.terms() {
                let p = pauli_mul(&a, &b)?;
                out.push(ca * cb * p.phase.to_complex(), p.x, p.z);
            }
        }
        Ok(out)
    }

    pub fn tensor(&self, other: &OperatorSum) -> Result<OperatorSum, PauliError> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let mut out = OperatorSum::zero(n);
        for (ca, a) in self.terms() {
            for (cb, b) in other.terms() {
                let w = a.tensor(&b)?;
                out.push(ca * cb, w.x, w.z);
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n_qubits);
        for (&(x, z), &v) in &self.terms {
            out.push(v.conj(), x, z);
        }
        out
    }

    /// Entrywise complex conjugate of the realized matrix.
    pub fn conj(&self) -> OperatorSum {
        let mut out = OperatorSum::zero(self.n_qubits);
        for (&(x, z), &v) in &self.terms {
            let s = if (x & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out.push(v.conj() * s, x, z);
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Whether the realized matrix has only real entries.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|(&(x, z), c)| {
            if (x & z).count_ones() % 2 == 0 {
                c.im.abs() <= tol
            } else {
                c.re.abs() <= tol
            }
        })
    }

    /// Whether the sum commutes with a word, checked term by term.
    pub fn commutes_with_word(&self, w: &PauliString) -> bool {
        self.terms().all(|(_, t)| commutes(&t, w))
    }

    pub fn max_abs_diff(&self, other: &OperatorSum) -> f64 {
        let mut m = 0.0f64;
        for (k, v) in &self.terms {
            let o = other.terms.get(k).copied().unwrap_or_default();
            m = m.max((v - o).norm());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                m = m.max(v.norm());
            }
        }
        m
    }

    /// Group terms by X mask: each group fills one generalized diagonal.
    fn x_groups(&self) -> Vec<(u64, Vec<(C64, u64)>)> {
        let n = self.n_qubits;
        let mut groups: BTreeMap<u64, Vec<(C64, u64)>> = BTreeMap::new();
        for (&(x, z), &c) in &self.terms {
            let xi = to_index_bits(x, n);
            let zi = to_index_bits(z, n);
            let c = c * Phase::from_exponent((xi & zi).count_ones() as i64).to_complex();
            groups.entry(xi).or_default().push((c, zi));
        }
        groups.into_iter().collect()
    }

    fn check_size(&self, limit: usize, kind: &'static str) -> Result<(), PauliError> {
        if self.n_qubits > limit {
            return Err(PauliError::TooLarge { n_qubits: self.n_qubits, limit, kind });
        }
        Ok(())
    }

    pub fn realize_dense(&self) -> Result<Mat<C64>, PauliError> {
        self.check_size(DENSE_QUBIT_LIMIT, "dense")?;
        let dim = 1usize << self.n_qubits;
        let mut m = Mat::<C64>::zeros(dim, dim);
        for (xi, group) in self.x_groups() {
            for col in 0..dim as u64 {
                let mut v = C64::new(0.0, 0.0);
                for &(c, zi) in &group {
                    if (zi & col).count_ones() % 2 == 1 {
                        v -= c;
                    } else {
                        v += c;
                    }
                }
                m[((col ^ xi) as usize, col as usize)] = v;
            }
        }
        Ok(m)
    }

    pub fn realize_sparse(&self) -> Result<CsrMatrix, PauliError> {
        self.check_size(SPARSE_QUBIT_LIMIT, "sparse")?;
        let dim = 1usize << self.n_qubits;
        let groups = self.x_groups();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::with_capacity(dim * groups.len());
        let mut values = Vec::with_capacity(dim * groups.len());
        row_ptr.push(0);
        let mut row_entries: Vec<(usize, C64)> = Vec::with_capacity(groups.len());
        for row in 0..dim as u64 {
            row_entries.clear();
            for (xi, group) in &groups {
                let col = row ^ xi;
                let mut v = C64::new(0.0, 0.0);
                for &(c, zi) in group {
                    if (zi & col).count_ones() % 2 == 1 {
                        v -= c;
                    } else {
                        v += c;
                    }
                }
                if v != C64::new(0.0, 0.0) {
                    row_entries.push((col as usize, v));
                }
            }
            row_entries.sort_by_key(|e| e.0);
            for &(c, v) in &row_entries {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix::from_raw(dim, row_ptr, col_idx, values))
    }

    /// Dense up to [`DENSE_QUBIT_LIMIT`] qubits, sparse beyond.
    pub fn realize(&self) -> Result<Realized, PauliError> {
        if self.n_qubits <= DENSE_QUBIT_LIMIT {
            self.realize_dense().map(Realized::Dense)
        } else {
            self.realize_sparse().map(Realized::Sparse)
        }
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, w)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            let body = &w.to_string()[1..];
            if c.im == 0.0 {
                write!(f, "{:+}*{body}", c.re)?;
            } else {
                write!(f, "({}{:+}i)*{body}", c.re, c.im)?;
            }
        }
        Ok(())
    }
}

impl Add for &OperatorSum {
    type Output = OperatorSum;
    /// Panics on a qubit-count mismatch; see [`OperatorSum::checked_add`].
    fn add(self, rhs: &OperatorSum) -> OperatorSum {
        self.checked_add(rhs).expect("operator sums on different registers")
    }
}

impl Sub for &OperatorSum {
    type Output = OperatorSum;
    fn sub(self, rhs: &OperatorSum) -> OperatorSum {
        self.checked_add(&-rhs).expect("operator sums on different registers")
    }
}

impl Neg for &OperatorSum {
    type Output = OperatorSum;
    fn neg(self) -> OperatorSum {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &OperatorSum {
    type Output = OperatorSum;
    fn mul(self, rhs: &OperatorSum) -> OperatorSum {
        self.checked_mul(rhs).expect("operator sums on different registers")
    }
}

impl Mul<f64> for &OperatorSum {
    type Output = OperatorSum;
    fn mul(self, rhs: f64) -> OperatorSum {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Mul<C64> for &OperatorSum {
    type Output = OperatorSum;
    fn mul(self, rhs: C64) -> OperatorSum {
        self.scale(rhs)
    }
}

impl From<PauliString> for OperatorSum {
    fn from(w: PauliString) -> OperatorSum {
        OperatorSum::from_word(C64::new(1.0, 0.0), &w)
    }
}
