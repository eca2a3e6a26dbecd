//! Imaginary-time Lindbladians for mixed-state phases of matter.
//!
//! The crate builds Lindblad generators for the 1D cluster chain and its
//! decohered relatives, maps them to the imaginary-time superoperator
//! `L^I = H_eff (x) I + I (x) H_eff^* - sum_k L_k (x) L_k^*`, and extracts
//! steady states, gaps, degeneracies, symmetry indicators, correlation
//! lengths and entanglement spectra from it.
//!
//! Every operator is stored symbolically as a sum of Pauli words and only
//! realized as a matrix when a solver needs one.
//!
//! ```
//! use imag_lindblad::prelude::*;
//!
//! let lattice = LatticeSpec::new(2, Boundary::Periodic).unwrap();
//! let gen = build_corner(Corner::Aspt, &lattice);
//! let sup = build_imag_superop(&gen).unwrap();
//! let spec = full_spectrum(&sup).unwrap();
//! assert!(spec.gap > 0.5);
//! ```

pub mod duality;
pub mod evolve;
pub mod krylov;
pub mod linalg;
pub mod liouville;
pub mod models;
pub mod observables;
pub mod pauli;
pub mod spectral;
pub mod sweep;

pub use num_complex::Complex64 as C64;

pub mod prelude {
    pub use crate::duality::{check_duality, DomainWallDuality, DualityCheck};
    pub use crate::evolve::{collision_step_imag, collision_step_real, propagate_imag, PropagateOptions};
    pub use crate::liouville::{
        build_imag_superop, build_real_superop, devectorize, reorder, vectorize, DensityMatrix, Ordering,
        SuperKind, SuperVector, Superoperator,
    };
    pub use crate::models::{
        build_corner, build_interpolated, build_stabilizer_gibbs, gibbs_state, Boundary, Corner, GibbsSpec,
        InterpolationParams, LatticeSpec, LindbladGenerator,
    };
    pub use crate::observables::{
        corr_linear, corr_renyi2, expect_linear, expect_renyi2, fit_corr_length, string_order,
        strong_symmetry_indicator, supervector_entanglement, weak_symmetry_indicator, LocalObservable,
    };
    pub use crate::pauli::{commutes, pauli_mul, OperatorSum, Pauli, PauliString, Phase};
    pub use crate::spectral::{
        degeneracy, expand_in_eigenbasis, extremal_spectrum, full_spectrum, steady_state, SpectrumResult,
        SteadyState,
    };
    pub use crate::C64;
}
