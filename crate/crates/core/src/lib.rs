//! Numerical laboratory for the one-level density of the Γ₁(q) family of
//! weight-`k` cusp forms, computed from the Petersson formula alone.
//!
//! - [`arith`]: integer arithmetic and Dirichlet characters
//! - [`special`]: Bessel functions, windows, quadrature, Mellin probe
//! - [`family`]: `V_qs`, `σ(m, n)`, `Δ(m, n)` with certified truncation
//! - [`testfn`]: test-function pairs `(φ, φ̂)`
//! - [`density`]: prime-side assembly of the one-level density
//! - [`analysis`]: regressions, block diagnostics, probes

pub mod analysis;
pub mod arith;
pub mod density;
pub mod error;
pub mod family;
pub mod phase;
pub mod special;
pub mod sum;
pub mod testfn;

pub use arith::{character_group, CharacterGroup, DirichletCharacter};
pub use density::{one_level_density, DensityReport};
pub use error::{LabError, Result};
pub use family::{FamilyParams, PeterssonValue, TruncationPolicy};
pub use testfn::{TestFnKind, TestFunctionPair};
