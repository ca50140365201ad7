//! Root-dynamics right-hand sides, the adaptive integrator and trajectory-level checks.

mod embedding;
mod flow;
mod identities;
mod integrator;
mod residual;
mod symmetric;

pub use embedding::{hamiltonian, newton_mismatch, potential, potential_gradient};
pub use flow::{rhs, FlowKind, FlowSpec, COLLISION_DELTA};
pub use identities::{identity_sweep, identity_values, random_configuration, IdentitySweep, IdentityValues, Phi};
pub use integrator::{integrate, IntegrateOptions, Monitor, OutputGrid, StepStats, Trajectory, MAX_STEPS};
pub use residual::{bilinear_residual, residual_at};
pub use symmetric::{
    check_reduced_flow, derived_reduced_rhs, printed_reduced_rhs, symmetric_reduce, symmetric_reduce_with,
    symmetry_error, ReducedFlowCheck, SYMMETRY_TOL,
};
