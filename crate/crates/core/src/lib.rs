//! Finite-dimensional graded matrix models of asymptotic pairs `(φ, D)`.
//!
//! The crate builds odd self-adjoint operators on Z/2-graded spaces, composes
//! pairs through `(ψ∘φ, ψ(D) + D')`, and measures every operator-norm
//! estimate that the composition rests on: commutator bounds for bounded
//! transforms, factorization of heat semigroups, and exponential product
//! bounds. The Bott–Dirac operator on a Hermite basis is the worked model.

pub mod clifford;
pub mod error;
pub mod estimates;
pub mod funcalc;
pub mod graded;
pub mod pairs;
pub mod profile;
pub mod random;

pub use error::{Error, Result};
pub use funcalc::{apply_function, bounded_transform, ScalarFunction, Spectrum};
pub use graded::{
    conjugate_by_grading, direct_sum, graded_commutator, graded_tensor, operator_norm, GradedMatrix, GradedSpace,
    OddSelfAdjoint, Parity, C64,
};
pub use profile::{decay_profile, DecayProfile, TGrid};
