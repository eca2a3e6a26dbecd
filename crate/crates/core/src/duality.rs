//! Domain-wall decoration `U_DW`, a product of CZ gates between neighbouring
//! sigma and tau spins, and the `b <-> 1 - b` duality it induces on `L^I(a, b)`.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::krylov::KrylovOptions;
use crate::liouville::{build_imag_superop, LiouvilleError, Superoperator};
use crate::models::{build_interpolated, Boundary, InterpolationParams, LatticeSpec, ModelError};
use crate::pauli::{pauli_mul, OperatorSum, Pauli, PauliError, PauliString, Phase, DENSE_QUBIT_LIMIT};
use crate::spectral::{extremal_spectrum, full_eigenvalues, SpectralError, DENSE_DIM_LIMIT};
use crate::C64;

/// Eigenvalues compared per side when the full spectrum is out of reach.
pub const EXTREMAL_COMPARE: usize = 4;

#[derive(Debug, Error)]
pub enum DualityError {
    #[error("word acts on {found} qubits, duality on {expected}")]
    RegisterMismatch { expected: usize, found: usize },
    #[error("the duality only holds without boundaries; got an open chain")]
    OpenBoundary,
    #[error("dense diagonal needs {0} qubits, above the dense limit")]
    TooLarge(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// A product of commuting CZ gates, stored as its edge list and the images
/// of every single-qubit `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainWallDuality {
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
    x_images: Vec<PauliString>,
}

impl DomainWallDuality {
    /// CZ on every sigma-tau bond of the lattice.
    pub fn new(lattice: &LatticeSpec) -> DomainWallDuality {
        let n = lattice.n_qubits();
        let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|q| (q, q + 1)).collect();
        if lattice.boundary == Boundary::Periodic && n > 2 {
            edges.push((n - 1, 0));
        } else if lattice.boundary == Boundary::Periodic {
            // A single site on a ring: both bonds join the same pair and cancel.
            edges.clear();
        }
        DomainWallDuality::from_edges(n, edges)
    }

    pub fn from_edges(n_qubits: usize, edges: Vec<(usize, usize)>) -> DomainWallDuality {
        let x_images = (0..n_qubits)
            .map(|q| {
                let mut z = 0u64;
                for &(a, b) in &edges {
                    if a == q {
                        z ^= 1u64 << b;
                    } else if b == q {
                        z ^= 1u64 << a;
                    }
                }
                PauliString::new(n_qubits, 1u64 << q, z, Phase::ONE).expect("in range")
            })
            .collect();
        DomainWallDuality { n_qubits, edges, x_images }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `U (x) U^*` on the doubled register; `U` is real so both copies carry the same gates.
    pub fn doubled(&self) -> DomainWallDuality {
        let n = self.n_qubits;
        let mut edges = self.edges.clone();
        edges.extend(self.edges.iter().map(|&(a, b)| (a + n, b + n)));
        DomainWallDuality::from_edges(2 * n, edges)
    }

    /// `U p U^dagger`, exactly.
    pub fn conjugate_pauli(&self, p: &PauliString) -> Result<PauliString, DualityError> {
        if p.n_qubits() != self.n_qubits {
            return Err(DualityError::RegisterMismatch { expected: self.n_qubits, found: p.n_qubits() });
        }
        let n = self.n_qubits;
        let mut out = PauliString::identity(n).with_phase(p.phase());
        for q in p.support() {
            let z = PauliString::single(n, q, Pauli::Z)?;
            let image = match p.get(q) {
                Pauli::I => continue,
                Pauli::Z => z,
                Pauli::X => self.x_images[q],
                Pauli::Y => {
                    // Y = i X Z
                    let xz = pauli_mul(&self.x_images[q], &z)?;
                    let ph = Phase::I * xz.phase();
                    xz.with_phase(ph)
                }
            };
            out = pauli_mul(&out, &image)?;
        }
        Ok(out)
    }

    pub fn conjugate_sum(&self, op: &OperatorSum) -> Result<OperatorSum, DualityError> {
        let mut terms = Vec::new();
        for (c, w) in op.terms() {
            terms.push((c, self.conjugate_pauli(&w)?));
        }
        Ok(OperatorSum::from_terms(self.n_qubits, terms)?)
    }

    /// Diagonal of `U` in the computational basis, entries `+-1`.
    pub fn diagonal(&self) -> Result<Vec<f64>, DualityError> {
        if self.n_qubits > DENSE_QUBIT_LIMIT {
            return Err(DualityError::TooLarge(self.n_qubits));
        }
        let n = self.n_qubits;
        Ok((0..1u64 << n)
            .map(|b| {
                let ones = self.edges.iter().filter(|&&(x, y)| b & bit(n, x) != 0 && b & bit(n, y) != 0).count();
                if ones % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect())
    }
}

/// Basis-index bit of qubit `q`; qubit 0 is the most significant.
fn bit(n: usize, q: usize) -> u64 {
    1u64 << (n - 1 - q)
}

/// Outcome of comparing `L^I(a, b)` with `L^I(a, 1 - b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityCheck {
    pub a: f64,
    pub b: f64,
    pub n_sites: usize,
    /// Largest coefficient of `(U (x) U^*) L^I(a,b) (U (x) U^*)^dagger - L^I(a,1-b)`.
    pub intertwining_defect: f64,
    /// Largest distance between the sorted spectra.
    pub spectral_distance: f64,
    /// Number of eigenvalues compared per side.
    pub compared: usize,
    pub gap: f64,
    pub dual_gap: f64,
}

impl DualityCheck {
    pub fn passed(&self, tol: f64) -> bool {
        self.intertwining_defect <= tol && self.spectral_distance <= tol
    }
}

fn spectrum(sup: &Superoperator) -> Result<(Vec<C64>, f64), DualityError> {
    let spec = if sup.dim() <= DENSE_DIM_LIMIT {
        full_eigenvalues(sup)?
    } else {
        extremal_spectrum(sup, EXTREMAL_COMPARE, &KrylovOptions::default())?
    };
    Ok((spec.eigenvalues.clone(), spec.gap))
}

/// Verify the duality at one point of a ring.
pub fn check_duality(a: f64, b: f64, lattice: &LatticeSpec) -> Result<DualityCheck, DualityError> {
    if lattice.boundary != Boundary::Periodic {
        return Err(DualityError::OpenBoundary);
    }
    let sup = build_imag_superop(&build_interpolated(InterpolationParams::new(a, b)?, lattice))?;
    let dual = build_imag_superop(&build_interpolated(InterpolationParams::new(a, 1.0 - b)?, lattice))?;
    let u = DomainWallDuality::new(lattice).doubled();
    let mapped = u.conjugate_sum(sup.terms())?;
    let intertwining_defect = mapped.max_abs_diff(dual.terms()).max((sup.shift() - dual.shift()).abs());
    let (e1, gap) = spectrum(&sup)?;
    let (e2, dual_gap) = spectrum(&dual)?;
    let compared = e1.len().min(e2.len());
    let spectral_distance = e1.iter().zip(&e2).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    Ok(DualityCheck { a, b, n_sites: lattice.n_sites, intertwining_defect, spectral_distance, compared, gap, dual_gap })
}

/// Run [`check_duality`] over a grid; failures become error rows.
pub fn audit(a_values: &[f64], b_values: &[f64], lattice: &LatticeSpec) -> Vec<Result<DualityCheck, DualityError>> {
    let mut rows = Vec::new();
    for &a in a_values {
        for &b in b_values {
            rows.push(check_duality(a, b, lattice));
        }
    }
    rows
}

/// Fixed-width table with one PASS/FAIL line per point.
pub fn write_audit_table<W: Write>(rows: &[Result<DualityCheck, DualityError>], tol: f64, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{:>6} {:>6} {:>14} {:>14} {:>12} {:>12}  status", "a", "b", "intertwining", "spectral", "gap", "dual_gap")?;
    for row in rows {
        match row {
            Ok(c) => writeln!(
                w,
                "{:>6.3} {:>6.3} {:>14.3e} {:>14.3e} {:>12.6} {:>12.6}  {}",
                c.a,
                c.b,
                c.intertwining_defect,
                c.spectral_distance,
                c.gap,
                c.dual_gap,
                if c.passed(tol) { "PASS" } else { "FAIL" }
            )?,
            Err(e) => writeln!(w, "{:>6} {:>6} error: {e}", "-", "-")?,
        }
    }
    Ok(())
}
