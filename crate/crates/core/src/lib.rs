//! Complete interpolating sequences for small Fock spaces.
//!
//! The spaces are `F^p_φ` with `φ(z) = α log²|z|` (two-sided, functions
//! analytic on `ℂ \ {0}`) or `φ(z) = α log₊²|z|` (one-sided, entire
//! functions). Sequences are perturbations of the geometric lattice
//! `e^{(k + 2/p)/2α}`, described finitely by [`TailedSpec`]s.
//!
//! - [`criterion`] decides complete interpolation exactly for finitely
//!   described perturbations.
//! - [`products`] builds canonical products and certifies their growth.
//! - [`spaces`] evaluates weights, norms and interpolants.
//! - [`toperator`] assembles the operator carrying `Γ`-coefficients to
//!   `Λ`-coefficients and checks its off-diagonal decay.

pub mod cli;
pub mod criterion;
pub mod error;
pub mod geometry;
pub mod logc;
pub mod products;
pub mod quadrature;
pub mod sequence;
pub mod spaces;
pub mod toperator;

pub use error::{Error, Result};
pub use logc::LogComplex;
pub use sequence::{Exponent, SequenceSpec, Side, SpaceParams, TailedSpec};
