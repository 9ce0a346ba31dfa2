//! The divisor-function Taylor series `T(q) = sum d(k) q^k`: exact
//! coefficient identities, certified evaluation of `T`, `psi_q`, `H`, `F`,
//! the auxiliary functions behind the monotonicity of `F`, and a small
//! engine that re-runs the grid and Sturm computations as certificates.

pub mod divisor;
pub mod error;
pub mod eval;
pub mod lemma;
pub mod real;
pub mod series;
pub mod verifier;

pub use error::{Error, Result};
pub use real::{Approx, Enclosure, Interval, Mode, Real};
