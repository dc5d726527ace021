//! Quantum-mechanical anomalies of nonrelativistic Fermi systems in
//! singular external potentials.
//!
//! The regularized trace difference
//! W(Λ) = Tr(Λ+Ĥ)⁻¹ − ∫d³x d³p (Λ + p²/2m + U)⁻¹ is computed either
//! perturbatively ([`perturbation`]) or nonperturbatively from radial
//! channel spectra ([`oracle`]); [`anomaly`] turns a power-law fit of W
//! into the number and energy anomalies δA_N and δA_E. All trace values
//! are reported reduced, i.e. divided by (2πħ)³.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod anomaly;
pub mod error;
pub mod oracle;
pub mod perturbation;
pub mod potentials;
pub mod quadrature;
pub mod report;
pub mod reproduce;

pub use error::{Error, Result};
pub use potentials::{CaseLabel, Family, PotentialSpec, Sign, SingularityClass, TailKind, UnitSystem};
pub use quadrature::{PowerLawFit, QuadratureBudget};
