//! Hamiltonians, Lax traces and multiset-return period detection.

mod assignment;
mod lax;
mod period;

pub use assignment::min_cost_assignment;
pub use lax::{integrals, lax, IntegralSet, LaxPair};
pub use period::{detect_period, multiset_distance, PeriodReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{hamiltonian, FlowKind, FlowSpec, Trajectory};
use crate::error::{Error, Result};
use crate::operators::ChargeConfiguration;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonians {
    /// Σ ẋ²/(2P) − V₊ over the +1 species (Λ = 1 only).
    pub plus: Option<Complex64>,
    /// Σ ẏ²/(2P) − V₋ over the −1 species (Λ = 1 only).
    pub minus: Option<Complex64>,
    /// Σ Qⱼżⱼ²/(2Pⱼ) − V for the whole system.
    pub total: Complex64,
}

/// V± = 2Σ_{i<j}(Pᵢ+Pⱼ)/(zᵢ−zⱼ)² + ½Σ U±²/P with U± = U ± ½P′, plus kinetic Σ ż²/(2P).
fn split_hamiltonian(flow: &FlowSpec, z: &[Complex64], v: &[Complex64], sign: f64) -> Complex64 {
    let (p, u, dp) = (&flow.sys.p, &flow.sys.u, flow.sys.p.derivative());
    let mut h = Complex64::new(0.0, 0.0);
    for i in 0..z.len() {
        let pi = p.eval(&z[i]);
        let ui = u.eval(&z[i]) + dp.eval(&z[i]) * (0.5 * sign);
        h += v[i] * v[i] / (pi * 2.0) - ui * ui / (pi * 2.0);
        for j in i + 1..z.len() {
            let d = z[i] - z[j];
            h -= (pi + p.eval(&z[j])) * 2.0 / (d * d);
        }
    }
    h
}

pub fn hamiltonians(flow: &FlowSpec, state: &ChargeConfiguration) -> Result<Hamiltonians> {
    flow.check_layout(state)?;
    state.check_distinct()?;
    if flow.kind == FlowKind::Angular || flow.kind == FlowKind::Linear {
        return Err(Error::Validation("hamiltonians need a bilinear or polylinear flow".into()));
    }
    let z = state.positions();
    for (index, w) in z.iter().enumerate() {
        if flow.sys.p.eval(w).norm() == 0.0 {
            return Err(Error::PZero { index });
        }
    }
    let total = hamiltonian(flow, &z)?;
    let charges = flow.species_charges();
    let (plus, minus) = if charges == [1.0, -1.0] {
        let v = flow.velocities(&z);
        let n = flow.sizes[0];
        (
            Some(split_hamiltonian(flow, &z[..n], &v[..n], 1.0)),
            Some(split_hamiltonian(flow, &z[n..], &v[n..], -1.0)),
        )
    } else {
        (None, None)
    };
    Ok(Hamiltonians { plus, minus, total })
}

/// Max over k of |Iₖ(t) − Iₖ(0)| / max(|Iₖ(0)|, 1e-300) along a trajectory.
pub fn relative_drift(series: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = series.first() else {
        return Vec::new();
    };
    (0..first.len())
        .map(|k| {
            let base = first[k].abs().max(1e-300);
            series.iter().map(|s| (s[k] - first[k]).abs() / base).fold(0.0, f64::max)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedReport {
    /// Rows [t, I₁, …, I_K].
    pub integrals: Vec<Vec<f64>>,
    pub drift: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<PeriodReport>,
}

/// Lax integrals at every sample, their drift, and the detected period when
/// `tol` is given. Also fills the trajectory's conserved monitors.
pub fn conserved_report(flow: &FlowSpec, traj: &mut Trajectory, tol: Option<f64>) -> Result<ConservedReport> {
    let mut rows = Vec::with_capacity(traj.len());
    let mut values = Vec::with_capacity(traj.len());
    for (k, state) in traj.states.iter().enumerate() {
        let set = integrals(state, flow)?;
        let mut row = vec![traj.times[k]];
        row.extend(&set.values);
        rows.push(row);
        traj.monitors[k].conserved = set.values.clone();
        values.push(set.values);
    }
    let period = match tol {
        Some(tol) if flow.omega() > 0.0 => Some(detect_period(traj, 2.0 * std::f64::consts::PI / flow.omega(), tol)?),
        _ => None,
    };
    Ok(ConservedReport {
        integrals: rows,
        drift: relative_drift(&values),
        period,
    })
}
