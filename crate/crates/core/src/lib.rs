//! Root dynamics of point charges driven by linear, bilinear and polylinear
//! hypergeometric operators: exact polynomial machinery, ODE integration,
//! conserved quantities and equilibrium certificates.

pub mod cli;
pub mod conserved;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod operators;
pub mod polynomials;
pub mod scalar;

pub use error::{Error, Result};
