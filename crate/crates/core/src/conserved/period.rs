use serde::{Deserialize, Serialize};

use super::assignment::min_cost_assignment;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::operators::ChargeConfiguration;

/// Minimum samples per base period for period detection.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 64.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub k: usize,
    pub mismatch: f64,
}

/// Largest displacement in the optimal (minimum total |Δz|) per-species matching
/// between two configurations with the same layout.
pub fn multiset_distance(a: &ChargeConfiguration, b: &ChargeConfiguration) -> Result<f64> {
    if a.sizes() != b.sizes() {
        return Err(Error::Validation("configurations have different species layouts".into()));
    }
    let mut worst = 0.0f64;
    for (sa, sb) in a.species.iter().zip(&b.species) {
        let cost: Vec<Vec<f64>> = sa
            .positions
            .iter()
            .map(|p| sb.positions.iter().map(|q| (p - q).norm()).collect())
            .collect();
        let (perm, _) = min_cost_assignment(&cost);
        for (i, j) in perm.iter().enumerate() {
            worst = worst.max(cost[i][*j]);
        }
    }
    Ok(worst)
}

/// Smallest j ≥ 1 such that the sample nearest j·base_period returns to the
/// initial multiset within tol·scale.
pub fn detect_period(traj: &Trajectory, base_period: f64, tol: f64) -> Result<PeriodReport> {
    if !(base_period > 0.0) {
        return Err(Error::Validation("base period must be positive".into()));
    }
    let (Some(&t0), Some(&t_last)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::Validation("empty trajectory".into()));
    };
    let span = t_last - t0;
    let density = (traj.len() - 1) as f64 * base_period / span.max(f64::MIN_POSITIVE);
    if traj.len() < 2 || density < MIN_SAMPLES_PER_PERIOD - 1e-9 {
        return Err(Error::Validation(format!(
            "period detection needs at least {MIN_SAMPLES_PER_PERIOD} samples per period"
        )));
    }
    let init = &traj.states[0];
    let scale = init.scale();
    let mut best = f64::INFINITY;
    let mut j = 1;
    while t0 + j as f64 * base_period <= t_last + 1e-9 * base_period {
        let target = t0 + j as f64 * base_period;
        let k = traj
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .map(|(k, _)| k)
            .unwrap();
        let d = multiset_distance(init, &traj.states[k])?;
        if d < tol * scale {
            return Ok(PeriodReport { k: j, mismatch: d });
        }
        best = best.min(d);
        j += 1;
    }
    Err(Error::NoReturnFound { span, best })
}
