//! Z₂-symmetric configurations of the rational system: n = 2l particles paired
//! as x_{j+l} = −xⱼ and a single second-species particle at the origin,
//! reduced to zⱼ = xⱼ².

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::flow::{FlowKind, FlowSpec};
use super::integrator::Trajectory;
use crate::error::{Error, Result};
use crate::operators::ChargeConfiguration;

pub const SYMMETRY_TOL: f64 = 1e-10;

/// Largest violation of the pairing, relative to the configuration scale.
pub fn symmetry_error(state: &ChargeConfiguration) -> Result<f64> {
    let sizes = state.sizes();
    if sizes.len() != 2 || sizes[0] % 2 != 0 || sizes[1] != 1 {
        return Err(Error::SymmetryViolation(format!(
            "expected an even first species and a single second-species particle, got sizes {sizes:?}"
        )));
    }
    let x = &state.species[0].positions;
    let l = x.len() / 2;
    let mut err = state.species[1].positions[0].norm();
    for j in 0..l {
        err = err.max((x[j] + x[j + l]).norm());
    }
    Ok(err / state.scale())
}

/// zⱼ = xⱼ², j = 1..l, after checking the pairing to `tol`.
pub fn symmetric_reduce_with(state: &ChargeConfiguration, tol: f64) -> Result<Vec<Complex64>> {
    let err = symmetry_error(state)?;
    if err > tol {
        return Err(Error::SymmetryViolation(format!(
            "pairing x[j+l] = -x[j], y = 0 violated by {err:e} (tolerance {tol:e})"
        )));
    }
    let x = &state.species[0].positions;
    Ok(x[..x.len() / 2].iter().map(|v| v * v).collect())
}

pub fn symmetric_reduce(state: &ChargeConfiguration) -> Result<Vec<Complex64>> {
    symmetric_reduce_with(state, SYMMETRY_TOL)
}

/// i dzⱼ/dt = −Σ_{k≠j} 4zⱼ/(zⱼ − z_k) + ω
pub fn printed_reduced_rhs(z: &[Complex64], omega: f64) -> Vec<Complex64> {
    (0..z.len())
        .map(|j| {
            let s: Complex64 = (0..z.len()).filter(|&k| k != j).map(|k| z[j] * 4.0 / (z[j] - z[k])).sum();
            -s + omega
        })
        .collect()
}

/// i dzⱼ/dt = 2ωzⱼ + (2 − 4Λ) + Σ_{k≠j} 8zⱼ/(zⱼ − z_k), the reduction of the
/// integrated rational flow.
pub fn derived_reduced_rhs(z: &[Complex64], omega: f64, capital_lambda: f64) -> Vec<Complex64> {
    (0..z.len())
        .map(|j| {
            let s: Complex64 = (0..z.len()).filter(|&k| k != j).map(|k| z[j] * 8.0 / (z[j] - z[k])).sum();
            z[j] * (2.0 * omega) + (2.0 - 4.0 * capital_lambda) + s
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedFlowCheck {
    /// Max relative mismatch of i dz/dt against the printed reduced equation.
    pub printed_mismatch: f64,
    /// Same against the reduction of the integrated flow.
    pub derived_mismatch: f64,
    /// Max symmetry error along the trajectory.
    pub symmetry_drift: f64,
}

fn relative_mismatch(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(0.0, f64::max);
    let diff = a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Compare i dzⱼ/dt (from the flow's velocities, dz/dt = 2x dx/dt) with both
/// reduced equations at every sample.
pub fn check_reduced_flow(flow: &FlowSpec, traj: &Trajectory, tol: f64) -> Result<ReducedFlowCheck> {
    if flow.kind != FlowKind::RationalOmega {
        return Err(Error::Validation("symmetric reduction needs the rational flow".into()));
    }
    let lam = flow.sys.capital_lambda().map_or(1.0, |l| l.re);
    let omega = flow.omega();
    let i = Complex64::new(0.0, 1.0);
    let mut out = ReducedFlowCheck {
        printed_mismatch: 0.0,
        derived_mismatch: 0.0,
        symmetry_drift: 0.0,
    };
    for state in &traj.states {
        let z = symmetric_reduce_with(state, tol)?;
        out.symmetry_drift = out.symmetry_drift.max(symmetry_error(state)?);
        let v = flow.velocities(&state.positions());
        let x = &state.species[0].positions;
        let lhs: Vec<Complex64> = (0..z.len()).map(|j| i * 2.0 * x[j] * v[j]).collect();
        out.printed_mismatch = out.printed_mismatch.max(relative_mismatch(&lhs, &printed_reduced_rhs(&z, omega)));
        out.derived_mismatch = out
            .derived_mismatch
            .max(relative_mismatch(&lhs, &derived_reduced_rhs(&z, omega, lam)));
    }
    Ok(out)
}
