//! Diagonal products of special unitary matrices.
//!
//! The image of SU(n) under `U ↦ ∏_j U_jj` is a compact region bounded by the
//! curve `γ(α) = e^{iα}(1 − (1 − e^{−iα})/n)^n`. This crate evaluates that
//! curve and its polar profile, decides membership in the region, builds and
//! recognizes the matrices whose diagonal product lands on the boundary,
//! constructs explicit preimages of interior points, and re-checks the
//! extremal property numerically.
//!
//! Module map:
//!
//! * [`matrix`] and [`haar`]: dense complex matrices, group predicates,
//!   generators, the skew-Hermitian exponential and Haar sampling.
//! * [`boundary`]: `γ`, `θ(α)` and its inverse, `r(θ)`, `Γ(α, y)` and its Jacobian.
//! * [`region`]: membership for the SU(n), U(n) and SO(n) images.
//! * [`constructors`]: extremal matrices and the other explicit families.
//! * [`verify`]: Monte-Carlo containment, preimages, constrained maximization.

pub mod boundary;
pub mod constructors;
pub mod error;
pub mod haar;
pub mod matrix;
pub mod region;
pub mod verify;

pub use boundary::{BoundaryModel, PolarPoint};
pub use constructors::ExtremalDecomposition;
pub use error::{BoundaryError, ConstructError, MatrixError, VerifyError};
pub use haar::RngSeed;
pub use matrix::{diag_product, CMatrix, ComplexValue};
pub use region::{MembershipStatus, MembershipVerdict};
pub use verify::{OptimizerConfig, VerificationReport};
