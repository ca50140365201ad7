//! Hypergeometric operators, their spectral constants, and the equilibrium
//! gradient/energy of charge configurations.

mod classes;
mod energy;
mod hyper;
mod system;

pub use classes::OperatorClass;
pub use energy::{energy, equilibrium_gradient};
pub use hyper::{bilinear_h, bilinear_h_with, lambda_nm, linear_eigenvalue, linear_l, polylinear_h, polylinear_lambda};
pub use system::{ChargeConfiguration, Mode, Species, SystemCoefficients};
