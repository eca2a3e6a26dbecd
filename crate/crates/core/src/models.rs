//! Lindblad generators on the decorated cluster chain.
//!
//! Site `i` carries the sigma spin on qubit `2i` and the tau spin between
//! sites `i` and `i+1` on qubit `2i+1`. Open chains keep all `2N` qubits and
//! drop every term that would reach past either end.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liouville::DensityMatrix;
use crate::linalg::hermitian_eigen;
use crate::pauli::{commutes, pauli_mul, OperatorSum, Pauli, PauliError, PauliString};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("lattice needs at least one site")]
    NoSites,
    #[error("{n_sites} sites need {} qubits, above the 64-qubit limit", 2 * n_sites)]
    TooManySites { n_sites: usize },
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("hamiltonian is not Hermitian (max imaginary coefficient {0:e})")]
    NotHermitian(f64),
    #[error("operator {index} acts on {found} qubits, expected {expected}")]
    RegisterMismatch { index: usize, found: usize, expected: usize },
    #[error("stabilizers {0} and {1} do not commute")]
    StabilizersAnticommute(usize, usize),
    #[error("stabilizer {0} is a product of the others")]
    DependentStabilizer(usize),
    #[error("excitation {i} must anticommute with stabilizer {i} only, but fails against stabilizer {j}")]
    BadExcitation { i: usize, j: usize },
    #[error("operator {0} is not a single Pauli word with unit coefficient")]
    NotAWord(usize),
    #[error("expected {expected} excitations, got {found}")]
    ExcitationCount { expected: usize, found: usize },
    #[error("inverse temperature must be positive, got {0}")]
    BadTemperature(f64),
    #[error("unknown corner {0:?}; expected 00, 01, 10 or 11")]
    UnknownCorner(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

impl FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "open" | "obc" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            other => Err(format!("unknown boundary {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, boundary: Boundary) -> Result<LatticeSpec, ModelError> {
        if n_sites == 0 {
            return Err(ModelError::NoSites);
        }
        if 2 * n_sites > crate::pauli::MAX_QUBITS {
            return Err(ModelError::TooManySites { n_sites });
        }
        Ok(LatticeSpec { n_sites, boundary })
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites
    }

    /// Qubit of the sigma spin on site `i`.
    pub fn sigma(&self, i: usize) -> usize {
        2 * i
    }

    /// Qubit of the tau spin between `i` and `i+1`.
    pub fn tau(&self, i: usize) -> usize {
        2 * i + 1
    }

    /// Index of the site right of `i`, if the bond exists.
    pub fn right(&self, i: usize) -> Option<usize> {
        match self.boundary {
            Boundary::Periodic => Some((i + 1) % self.n_sites),
            Boundary::Open => (i + 1 < self.n_sites).then_some(i + 1),
        }
    }

    /// Index of the tau bond left of site `i`, if it exists.
    pub fn left_bond(&self, i: usize) -> Option<usize> {
        match self.boundary {
            Boundary::Periodic => Some((i + self.n_sites - 1) % self.n_sites),
            Boundary::Open => i.checked_sub(1),
        }
    }

    fn word(&self, ops: &[(usize, Pauli)]) -> PauliString {
        PauliString::from_sparse(self.n_qubits(), ops).expect("lattice qubits are in range")
    }

    pub fn sigma_op(&self, i: usize, p: Pauli) -> PauliString {
        self.word(&[(self.sigma(i), p)])
    }

    pub fn tau_op(&self, i: usize, p: Pauli) -> PauliString {
        self.word(&[(self.tau(i), p)])
    }

    /// `Z(sigma_i) X(tau_{i+1/2}) Z(sigma_{i+1})`, absent on the open edge.
    pub fn cluster_sigma(&self, i: usize) -> Option<PauliString> {
        let j = self.right(i)?;
        Some(self.word(&[(self.sigma(i), Pauli::Z), (self.tau(i), Pauli::X), (self.sigma(j), Pauli::Z)]))
    }

    /// `Z(tau_{i-1/2}) X(sigma_i) Z(tau_{i+1/2})`, absent on the open left edge.
    pub fn cluster_tau(&self, i: usize) -> Option<PauliString> {
        let l = self.left_bond(i)?;
        Some(self.word(&[(self.tau(l), Pauli::Z), (self.sigma(i), Pauli::X), (self.tau(i), Pauli::Z)]))
    }

    /// Sites touched by a word, as the smallest cyclic window containing them.
    pub fn site_span(&self, w: &PauliString) -> usize {
        let mut occupied = vec![false; self.n_sites];
        for q in w.support() {
            occupied[q / 2] = true;
        }
        let n = self.n_sites;
        if !occupied.iter().any(|&o| o) {
            return 0;
        }
        match self.boundary {
            Boundary::Open => {
                let first = occupied.iter().position(|&o| o).unwrap();
                let last = occupied.iter().rposition(|&o| o).unwrap();
                last - first + 1
            }
            Boundary::Periodic => {
                // Largest cyclic run of empty sites gives the complement.
                let mut best = 0;
                for start in 0..n {
                    let run = (0..n).take_while(|k| !occupied[(start + k) % n]).count();
                    best = best.max(run);
                }
                n - best
            }
        }
    }
}

/// The four fixed-point models at the corners of the phase diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    /// `00`: trivial pure product state.
    #[serde(rename = "00")]
    TrivialPure,
    /// `01`: pure cluster state.
    #[serde(rename = "01")]
    Spt,
    /// `10`: sigma maximally mixed, tau polarized.
    #[serde(rename = "10")]
    TrivialMixed,
    /// `11`: decohered cluster state.
    #[serde(rename = "11")]
    Aspt,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::TrivialPure, Corner::Spt, Corner::TrivialMixed, Corner::Aspt];

    /// `(a, b)` coordinates of the corner.
    pub fn coordinates(self) -> (f64, f64) {
        match self {
            Corner::TrivialPure => (0.0, 0.0),
            Corner::Spt => (0.0, 1.0),
            Corner::TrivialMixed => (1.0, 0.0),
            Corner::Aspt => (1.0, 1.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Corner::TrivialPure => "00",
            Corner::Spt => "01",
            Corner::TrivialMixed => "10",
            Corner::Aspt => "11",
        }
    }
}

impl FromStr for Corner {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "00" => Ok(Corner::TrivialPure),
            "01" => Ok(Corner::Spt),
            "10" => Ok(Corner::TrivialMixed),
            "11" => Ok(Corner::Aspt),
            _ => Err(ModelError::UnknownCorner(s.to_string())),
        }
    }
}

/// Hamiltonian plus jump operators on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    n_qubits: usize,
    hamiltonian: OperatorSum,
    jumps: Vec<OperatorSum>,
    lattice: Option<LatticeSpec>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: OperatorSum, jumps: Vec<OperatorSum>) -> Result<LindbladGenerator, ModelError> {
        let n = hamiltonian.n_qubits();
        for (k, l) in jumps.iter().enumerate() {
            if l.n_qubits() != n {
                return Err(ModelError::RegisterMismatch { index: k, found: l.n_qubits(), expected: n });
            }
        }
        let worst = hamiltonian.terms().map(|(c, _)| c.im.abs()).fold(0.0, f64::max);
        if worst > 1e-12 {
            return Err(ModelError::NotHermitian(worst));
        }
        Ok(LindbladGenerator { n_qubits: n, hamiltonian, jumps, lattice: None })
    }

    pub fn on_lattice(mut self, lattice: LatticeSpec) -> Result<LindbladGenerator, ModelError> {
        if lattice.n_qubits() != self.n_qubits {
            return Err(ModelError::RegisterMismatch { index: 0, found: lattice.n_qubits(), expected: self.n_qubits });
        }
        self.lattice = Some(lattice);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn hamiltonian(&self) -> &OperatorSum {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[OperatorSum] {
        &self.jumps
    }

    pub fn lattice(&self) -> Option<&LatticeSpec> {
        self.lattice.as_ref()
    }

    /// Widest site window touched by any term (lattice models only).
    pub fn locality_span(&self) -> Option<usize> {
        let lat = self.lattice?;
        let words = self.hamiltonian.terms().chain(self.jumps.iter().flat_map(|j| j.terms()));
        Some(words.map(|(_, w)| lat.site_span(&w)).max().unwrap_or(0))
    }
}

/// Point `(a, b)` in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationParams {
    a: f64,
    b: f64,
}

impl InterpolationParams {
    pub fn new(a: f64, b: f64) -> Result<InterpolationParams, ModelError> {
        for (name, v) in [("a", a), ("b", b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::ParameterOutOfRange { name, value: v });
            }
        }
        Ok(InterpolationParams { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn sum_of(n: usize, words: impl IntoIterator<Item = PauliString>, coeff: f64) -> OperatorSum {
    let mut s = OperatorSum::zero(n);
    for w in words {
        s.add_word(real(coeff), &w).expect("word on lattice register");
    }
    s
}

struct ChainTerms {
    tau_x: OperatorSum,
    sigma_x: OperatorSum,
    cluster_sigma: OperatorSum,
    cluster_tau: OperatorSum,
}

fn chain_terms(lat: &LatticeSpec) -> ChainTerms {
    let n = lat.n_qubits();
    let sites = 0..lat.n_sites;
    ChainTerms {
        tau_x: sum_of(n, sites.clone().map(|i| lat.tau_op(i, Pauli::X)), -1.0),
        sigma_x: sum_of(n, sites.clone().map(|i| lat.sigma_op(i, Pauli::X)), -1.0),
        cluster_sigma: sum_of(n, sites.clone().filter_map(|i| lat.cluster_sigma(i)), -1.0),
        cluster_tau: sum_of(n, sites.filter_map(|i| lat.cluster_tau(i)), -1.0),
    }
}

pub fn build_corner(corner: Corner, lattice: &LatticeSpec) -> LindbladGenerator {
    let (a, b) = corner.coordinates();
    build_interpolated(InterpolationParams { a, b }, lattice)
}

/// Generator at an interior point of the phase diagram.
///
/// `H = (1-b) H_tau + b H_zxz + (1-a)[(1-b) H_sigma + b H_zxz']` with jumps
/// `sqrt(a) Z_i`, `sqrt(a(1-b)) X_i` and `sqrt(ab) Z X Z` per site. Jumps
/// with a zero prefactor are left out.
pub fn build_interpolated(p: InterpolationParams, lattice: &LatticeSpec) -> LindbladGenerator {
    let (a, b) = (p.a, p.b);
    let n = lattice.n_qubits();
    let t = chain_terms(lattice);
    let mut h = OperatorSum::zero(n);
    for (coeff, part) in [
        (1.0 - b, &t.tau_x),
        (b, &t.cluster_sigma),
        ((1.0 - a) * (1.0 - b), &t.sigma_x),
        ((1.0 - a) * b, &t.cluster_tau),
    ] {
        if coeff != 0.0 {
            h = &h + &(part * coeff);
        }
    }
    let mut jumps = Vec::new();
    for i in 0..lattice.n_sites {
        let candidates = [
            (a, Some(lattice.sigma_op(i, Pauli::Z))),
            (a * (1.0 - b), Some(lattice.sigma_op(i, Pauli::X))),
            (a * b, lattice.cluster_tau(i)),
        ];
        for (rate, word) in candidates {
            if let (true, Some(w)) = (rate > 0.0, word) {
                jumps.push(OperatorSum::from_word(real(rate.sqrt()), &w));
            }
        }
    }
    LindbladGenerator { n_qubits: n, hamiltonian: h, jumps, lattice: Some(*lattice) }
}

/// Jump strength `2 / sinh(2 beta)` that makes `exp(-beta H)` the fixed point.
pub fn gibbs_rate(beta_t: f64) -> f64 {
    2.0 / (2.0 * beta_t).sinh()
}

/// Commuting stabilizers `h_i`, excitations `o_i` and an inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsSpec {
    stabilizers: Vec<PauliString>,
    excitations: Vec<PauliString>,
    beta_t: f64,
}

fn unit_word(index: usize, s: &OperatorSum) -> Result<PauliString, ModelError> {
    match s.single_word() {
        Some((c, w)) if (c - real(1.0)).norm() < 1e-12 => Ok(w),
        Some((c, w)) if (c + real(1.0)).norm() < 1e-12 => Ok(w.with_phase(crate::pauli::Phase::MINUS_ONE)),
        _ => Err(ModelError::NotAWord(index)),
    }
}

fn gf2_rank(vectors: &[(u64, u64)]) -> usize {
    // Symplectic vectors as 128-bit rows.
    let mut rows: Vec<u128> = vectors.iter().map(|&(x, z)| (x as u128) << 64 | z as u128).collect();
    let mut rank = 0;
    for bit in (0..128).rev() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else { continue };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r] >> bit & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

impl GibbsSpec {
    pub fn new(stabilizers: &[OperatorSum], excitations: &[OperatorSum], beta_t: f64) -> Result<GibbsSpec, ModelError> {
        if !(beta_t > 0.0) {
            return Err(ModelError::BadTemperature(beta_t));
        }
        if stabilizers.len() != excitations.len() {
            return Err(ModelError::ExcitationCount { expected: stabilizers.len(), found: excitations.len() });
        }
        let h: Vec<PauliString> = stabilizers.iter().enumerate().map(|(i, s)| unit_word(i, s)).collect::<Result<_, _>>()?;
        let o: Vec<PauliString> = excitations.iter().enumerate().map(|(i, s)| unit_word(i, s)).collect::<Result<_, _>>()?;
        if let Some(first) = h.first() {
            let n = first.n_qubits();
            for (k, w) in h.iter().chain(&o).enumerate() {
                if w.n_qubits() != n {
                    return Err(ModelError::RegisterMismatch { index: k % h.len(), found: w.n_qubits(), expected: n });
                }
            }
        }
        for i in 0..h.len() {
            for j in i + 1..h.len() {
                if !commutes(&h[i], &h[j]) {
                    return Err(ModelError::StabilizersAnticommute(i, j));
                }
            }
        }
        for i in 0..h.len() {
            let masks: Vec<(u64, u64)> = h[..=i].iter().map(|w| (w.x_mask(), w.z_mask())).collect();
            if gf2_rank(&masks) != i + 1 {
                return Err(ModelError::DependentStabilizer(i));
            }
        }
        for i in 0..o.len() {
            for (j, hj) in h.iter().enumerate() {
                if commutes(&o[i], hj) == (i == j) {
                    return Err(ModelError::BadExcitation { i, j });
                }
            }
        }
        Ok(GibbsSpec { stabilizers: h, excitations: o, beta_t })
    }

    /// Cluster stabilizers of the chain with single-spin flips as excitations.
    pub fn cluster(lattice: &LatticeSpec, beta_t: f64) -> Result<GibbsSpec, ModelError> {
        let mut h = Vec::new();
        let mut o = Vec::new();
        for i in 0..lattice.n_sites {
            if let Some(w) = lattice.cluster_sigma(i) {
                h.push(OperatorSum::from(w));
                o.push(OperatorSum::from(lattice.tau_op(i, Pauli::Z)));
            }
            if let Some(w) = lattice.cluster_tau(i) {
                h.push(OperatorSum::from(w));
                o.push(OperatorSum::from(lattice.sigma_op(i, Pauli::Z)));
            }
        }
        GibbsSpec::new(&h, &o, beta_t)
    }

    pub fn beta_t(&self) -> f64 {
        self.beta_t
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    pub fn excitations(&self) -> &[PauliString] {
        &self.excitations
    }

    pub fn rate(&self) -> f64 {
        gibbs_rate(self.beta_t)
    }

    pub fn n_qubits(&self) -> usize {
        self.stabilizers.first().map_or(0, |w| w.n_qubits())
    }

    /// Unshifted ground eigenvalue `-N sqrt(gamma^2 + 4)` of the imaginary superoperator.
    pub fn ground_eigenvalue(&self) -> f64 {
        let g = self.rate();
        -(self.stabilizers.len() as f64) * (g * g + 4.0).sqrt()
    }
}

/// `H = sum_i h_i`, `L_i = sqrt(gamma) o_i`.
pub fn build_stabilizer_gibbs(spec: &GibbsSpec) -> LindbladGenerator {
    let n = spec.n_qubits();
    let mut h = OperatorSum::zero(n);
    for w in &spec.stabilizers {
        h.add_word(real(1.0), w).expect("validated register");
    }
    let g = spec.rate().sqrt();
    let jumps = spec.excitations.iter().map(|o| OperatorSum::from_word(real(g), o)).collect();
    LindbladGenerator { n_qubits: n, hamiltonian: h, jumps, lattice: None }
}

/// `exp(-beta sum_i h_i) / Z` as a dense matrix.
pub fn gibbs_state(stabilizers: &[PauliString], beta_t: f64) -> Result<DensityMatrix, ModelError> {
    if !(beta_t > 0.0) {
        return Err(ModelError::BadTemperature(beta_t));
    }
    let n = stabilizers.first().map_or(0, |w| w.n_qubits());
    let mut h = OperatorSum::zero(n);
    for w in stabilizers {
        h.add_word(real(1.0), w)?;
    }
    let m = h.realize_dense()?;
    let (vals, u) = hermitian_eigen(&m);
    let e0 = vals.first().copied().unwrap_or(0.0);
    let weights: Vec<f64> = vals.iter().map(|e| (-beta_t * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let d = m.nrows();
    let mut rho = Mat::<C64>::zeros(d, d);
    for k in 0..d {
        let w = weights[k] / z;
        if w == 0.0 {
            continue;
        }
        for j in 0..d {
            let uj = u[(j, k)].conj() * w;
            for i in 0..d {
                rho[(i, j)] += u[(i, k)] * uj;
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// Strong symmetry `K = prod tau^x`.
pub fn strong_symmetry(lattice: &LatticeSpec) -> PauliString {
    let mut k = PauliString::identity(lattice.n_qubits());
    for i in 0..lattice.n_sites {
        k = pauli_mul(&k, &lattice.tau_op(i, Pauli::X)).expect("same register");
    }
    k
}

/// Weak symmetry `U = prod sigma^x`.
pub fn weak_symmetry(lattice: &LatticeSpec) -> PauliString {
    let mut u = PauliString::identity(lattice.n_qubits());
    for i in 0..lattice.n_sites {
        u = pauli_mul(&u, &lattice.sigma_op(i, Pauli::X)).expect("same register");
    }
    u
}

/// `Z(sigma_i) prod_{i<=k<j} X(tau_{k+1/2}) Z(sigma_j)` for `i < j`.
pub fn string_operator(lattice: &LatticeSpec, i: usize, j: usize) -> Option<PauliString> {
    if i >= j || j >= lattice.n_sites {
        return None;
    }
    let mut w = pauli_mul(&lattice.sigma_op(i, Pauli::Z), &lattice.sigma_op(j, Pauli::Z)).ok()?;
    for k in i..j {
        w = pauli_mul(&w, &lattice.tau_op(k, Pauli::X)).ok()?;
    }
    Some(w)
}

/// Single-qubit generator `H = 0`, jumps `Z` and `X`.
pub fn single_qubit_dephasing_pair() -> LindbladGenerator {
    let z: PauliString = "Z".parse().expect("literal");
    let x: PauliString = "X".parse().expect("literal");
    LindbladGenerator::new(OperatorSum::zero(1), vec![z.into(), x.into()]).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, max_abs_diff};
    use proptest::prelude::*;

    fn w(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn pbc(n: usize) -> LatticeSpec {
        LatticeSpec::new(n, Boundary::Periodic).unwrap()
    }

    #[test]
    fn corner_10_single_site() {
        let g = build_corner(Corner::TrivialMixed, &pbc(1));
        assert_eq!(g.hamiltonian(), &OperatorSum::from_word(real(-1.0), &w("IX")));
        assert_eq!(g.jumps(), &[OperatorSum::from(w("ZI")), OperatorSum::from(w("XI"))]);
    }

    #[test]
    fn corner_00_spectrum() {
        let g = build_corner(Corner::TrivialPure, &pbc(1));
        let ev = hermitian_eigenvalues(&g.hamiltonian().realize_dense().unwrap());
        for (e, t) in ev.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((e - t).abs() < 1e-12);
        }
    }

    #[test]
    fn cluster_terms_on_three_sites() {
        let lat = pbc(3);
        // qubits: s0 t0 s1 t1 s2 t2
        assert_eq!(lat.cluster_sigma(2).unwrap(), w("ZIIIZX"));
        assert_eq!(lat.cluster_tau(0).unwrap(), w("XZIIIZ"));
        let obc = LatticeSpec::new(3, Boundary::Open).unwrap();
        assert!(obc.cluster_sigma(2).is_none());
        assert!(obc.cluster_tau(0).is_none());
        assert_eq!(obc.cluster_tau(2).unwrap(), w("IIIZXZ"));
        assert_eq!(obc.cluster_tau(1).unwrap(), w("IZXZII"));
    }

    #[test]
    fn corner_11_jumps() {
        let lat = pbc(2);
        let g = build_corner(Corner::Aspt, &lat);
        assert_eq!(g.jumps().len(), 4);
        assert_eq!(g.hamiltonian().len(), 2);
        let obc = LatticeSpec::new(3, Boundary::Open).unwrap();
        let g = build_corner(Corner::Aspt, &obc);
        assert_eq!(g.jumps().len(), 5);
        assert_eq!(g.hamiltonian().len(), 2);
    }

    #[test]
    fn corners_match_interpolation_endpoints() {
        for n in 1..4 {
            for bc in [Boundary::Open, Boundary::Periodic] {
                let lat = LatticeSpec::new(n, bc).unwrap();
                for c in Corner::ALL {
                    let (a, b) = c.coordinates();
                    let p = InterpolationParams::new(a, b).unwrap();
                    assert_eq!(build_corner(c, &lat), build_interpolated(p, &lat));
                }
            }
        }
    }

    #[test]
    fn parameters_validated() {
        assert!(matches!(InterpolationParams::new(1.5, 0.0), Err(ModelError::ParameterOutOfRange { name: "a", .. })));
        assert!(InterpolationParams::new(0.0, -0.1).is_err());
        assert!(LatticeSpec::new(0, Boundary::Open).is_err());
        assert!(LatticeSpec::new(33, Boundary::Open).is_err());
    }

    #[test]
    fn gibbs_rate_limits() {
        assert!(gibbs_rate(1e3) < 1e-300);
        assert!((gibbs_rate(0.5) - 2.0 / 1.0f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn low_temperature_single_qubit_gibbs() {
        let rho = gibbs_state(&[w("Z")], 10.0).unwrap();
        let m = rho.matrix();
        assert!((m[(1, 1)].re - 1.0).abs() < 1e-8);
        assert!(m[(0, 0)].norm() < 1e-8);
    }

    #[test]
    fn gibbs_state_matches_product_formula() {
        // Commuting stabilizers: exp(-b sum h) = prod (cosh b - sinh b h).
        let hs = [w("ZXZ"), w("XZI"), w("IZX")];
        let beta = 0.4;
        let rho = gibbs_state(&hs, beta).unwrap();
        let mut prod = OperatorSum::identity(3);
        for h in &hs {
            let mut f = OperatorSum::identity(3).scale(real(beta.cosh()));
            f.add_word(real(-beta.sinh()), h).unwrap();
            prod = &prod * &f;
        }
        let z = prod.identity_coeff() * 8.0;
        let want = prod.scale(z.inv()).realize_dense().unwrap();
        assert!(max_abs_diff(rho.matrix(), &want) < 1e-13);
    }

    #[test]
    fn gibbs_spec_validation() {
        let z = OperatorSum::from(w("ZI"));
        let x = OperatorSum::from(w("XI"));
        let zz = OperatorSum::from(w("ZZ"));
        assert!(matches!(GibbsSpec::new(&[z.clone(), x.clone()], &[x.clone(), z.clone()], 1.0), Err(ModelError::StabilizersAnticommute(0, 1))));
        assert!(matches!(GibbsSpec::new(&[z.clone(), z.clone()], &[x.clone(), x.clone()], 1.0), Err(ModelError::DependentStabilizer(1))));
        let x2 = OperatorSum::from(w("IX"));
        assert!(matches!(GibbsSpec::new(&[z.clone(), zz.clone()], &[x.clone(), x2.clone()], 1.0), Err(ModelError::BadExcitation { i: 0, j: 1 })));
        let z2 = OperatorSum::from(w("IZ"));
        assert!(GibbsSpec::new(&[z.clone(), z2], &[x.clone(), x2], 1.0).is_ok());
        assert!(matches!(GibbsSpec::new(&[z], &[x], 0.0), Err(ModelError::BadTemperature(_))));
        assert!(GibbsSpec::cluster(&pbc(3), 0.5).is_ok());
    }

    #[test]
    fn string_operator_telescopes() {
        let lat = pbc(4);
        let s = string_operator(&lat, 0, 2).unwrap();
        let prod = pauli_mul(&lat.cluster_sigma(0).unwrap(), &lat.cluster_sigma(1).unwrap()).unwrap();
        assert_eq!(s, prod);
        assert!(string_operator(&lat, 2, 2).is_none());
    }

    #[test]
    fn site_span_wraps() {
        let lat = pbc(4);
        assert_eq!(lat.site_span(&lat.cluster_sigma(3).unwrap()), 2);
        assert_eq!(lat.site_span(&lat.cluster_tau(0).unwrap()), 2);
    }

    fn params() -> impl Strategy<Value = (f64, f64)> {
        (0.0f64..=1.0, 0.0f64..=1.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn jumps_square_to_identity((a, b) in params(), n in 1usize..5, open in any::<bool>()) {
            let lat = LatticeSpec::new(n, if open { Boundary::Open } else { Boundary::Periodic }).unwrap();
            let g = build_interpolated(InterpolationParams::new(a, b).unwrap(), &lat);
            prop_assert!(g.hamiltonian().is_hermitian(0.0));
            for l in g.jumps() {
                let ll = &l.adjoint() * l;
                prop_assert_eq!(ll.len(), 1);
                prop_assert!(ll.identity_coeff().re > 0.0);
            }
            prop_assert!(g.locality_span().unwrap() <= 2);
        }

        #[test]
        fn strong_symmetry_is_exact((a, b) in params(), n in 1usize..5, open in any::<bool>()) {
            let lat = LatticeSpec::new(n, if open { Boundary::Open } else { Boundary::Periodic }).unwrap();
            let g = build_interpolated(InterpolationParams::new(a, b).unwrap(), &lat);
            let k = strong_symmetry(&lat);
            prop_assert!(g.hamiltonian().commutes_with_word(&k));
            for l in g.jumps() {
                prop_assert!(l.commutes_with_word(&k));
            }
            let u = weak_symmetry(&lat);
            prop_assert!(g.hamiltonian().commutes_with_word(&u));
        }
    }
}
