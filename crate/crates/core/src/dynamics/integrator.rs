//! Dormand–Prince 5(4) with a continuous extension, sampled on a fixed output grid.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::flow::{rhs, FlowSpec};
use super::residual::residual_at;
use crate::error::{Error, Result};
use crate::operators::ChargeConfiguration;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

pub const MAX_STEPS: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputGrid {
    /// `n` equal intervals on [0, t_end] (n + 1 samples).
    Uniform(usize),
    /// Explicit increasing times in [0, t_end]; 0 is always included.
    Times(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    pub grid: OutputGrid,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rtol: 1e-10,
            atol: 1e-12,
            grid: OutputGrid::Uniform(128),
            max_steps: MAX_STEPS,
        }
    }
}

impl IntegrateOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        IntegrateOptions {
            rtol,
            atol,
            ..Default::default()
        }
    }

    pub fn with_grid(mut self, grid: OutputGrid) -> Self {
        self.grid = grid;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    /// Normalized operator residual; `None` for flows without a multilinear operator.
    pub residual: Option<f64>,
    pub min_separation: f64,
    /// Conserved-quantity values (filled by the conserved module).
    pub conserved: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ChargeConfiguration>,
    pub monitors: Vec<Monitor>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &ChargeConfiguration {
        self.states.last().expect("trajectories have at least one sample")
    }

    /// CSV with one row per sample: time, positions, then monitor columns.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let Some(first) = self.states.first() else {
            return Ok(());
        };
        let mut header = vec!["t".to_string()];
        for (s, sp) in first.species.iter().enumerate() {
            for p in 0..sp.positions.len() {
                header.push(format!("s{s}_p{p}_re"));
                header.push(format!("s{s}_p{p}_im"));
            }
        }
        let with_residual = self.monitors.iter().any(|m| m.residual.is_some());
        if with_residual {
            header.push("residual".into());
        }
        header.push("min_sep".into());
        let k = self.monitors.iter().map(|m| m.conserved.len()).max().unwrap_or(0);
        header.extend((1..=k).map(|i| format!("I{i}")));
        writeln!(w, "{}", header.join(","))?;

        let num = |x: f64| format!("{x:.16e}");
        for ((t, state), mon) in self.times.iter().zip(&self.states).zip(&self.monitors) {
            let mut row = vec![num(*t)];
            for z in state.positions() {
                row.push(num(z.re));
                row.push(num(z.im));
            }
            if with_residual {
                row.push(mon.residual.map(num).unwrap_or_default());
            }
            row.push(num(mon.min_separation));
            for i in 0..k {
                row.push(mon.conserved.get(i).copied().map(num).unwrap_or_default());
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn output_times(grid: &OutputGrid, t_end: f64) -> Result<Vec<f64>> {
    let mut ts = match grid {
        OutputGrid::Uniform(n) => {
            if t_end == 0.0 {
                vec![0.0]
            } else {
                let n = (*n).max(1);
                (0..=n).map(|k| t_end * k as f64 / n as f64).collect()
            }
        }
        OutputGrid::Times(ts) => {
            let mut out = vec![0.0];
            for &t in ts {
                if !(0.0..=t_end).contains(&t) {
                    return Err(Error::Validation(format!("output time {t} outside [0, {t_end}]")));
                }
                if t > *out.last().unwrap() {
                    out.push(t);
                } else if t != 0.0 {
                    return Err(Error::Validation("output times must be increasing".into()));
                }
            }
            out
        }
    };
    ts.dedup();
    Ok(ts)
}

fn axpy(y: &[Complex64], h: f64, coeffs: &[f64], k: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = y.to_vec();
    for (c, ki) in coeffs.iter().zip(k) {
        if *c != 0.0 {
            for (o, v) in out.iter_mut().zip(ki) {
                *o += v * (h * c);
            }
        }
    }
    out
}

/// Weighted RMS norm over the real and imaginary parts.
fn error_norm(err: &[Complex64], y0: &[Complex64], y1: &[Complex64], rtol: f64, atol: f64) -> f64 {
    if err.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..err.len() {
        for (e, a, b) in [(err[i].re, y0[i].re, y1[i].re), (err[i].im, y0[i].im, y1[i].im)] {
            let sc = atol + rtol * a.abs().max(b.abs());
            acc += (e / sc).powi(2);
        }
    }
    (acc / (2 * err.len()) as f64).sqrt()
}

struct Dense {
    r: [Vec<Complex64>; 5],
}

impl Dense {
    fn new(y0: &[Complex64], y1: &[Complex64], h: f64, k: &[Vec<Complex64>]) -> Self {
        let n = y0.len();
        let mut r: [Vec<Complex64>; 5] = Default::default();
        r[0] = y0.to_vec();
        r[1] = (0..n).map(|i| y1[i] - y0[i]).collect();
        r[2] = (0..n).map(|i| k[0][i] * h - r[1][i]).collect();
        r[3] = (0..n).map(|i| r[1][i] - k[6][i] * h - r[2][i]).collect();
        r[4] = (0..n)
            .map(|i| (0..7).map(|s| k[s][i] * D[s]).sum::<Complex64>() * h)
            .collect();
        Dense { r }
    }

    fn at(&self, theta: f64) -> Vec<Complex64> {
        let t1 = 1.0 - theta;
        let r = &self.r;
        (0..r[0].len())
            .map(|i| r[0][i] + (r[1][i] + (r[2][i] + (r[3][i] + r[4][i] * t1) * theta) * t1) * theta)
            .collect()
    }
}

fn initial_step(flow: &FlowSpec, y: &[Complex64], f: &[Complex64], rtol: f64, atol: f64, t_end: f64) -> f64 {
    let sc: Vec<f64> = y.iter().map(|z| atol + rtol * z.norm()).collect();
    let n = y.len().max(1) as f64;
    let d0 = (y.iter().zip(&sc).map(|(z, s)| (z.norm() / s).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f.iter().zip(&sc).map(|(z, s)| (z.norm() / s).powi(2)).sum::<f64>() / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t_end);
    let y1: Vec<Complex64> = y.iter().zip(f).map(|(a, b)| a + b * h0).collect();
    let f1 = flow.velocities(&y1);
    let d2 = (f1.iter().zip(f).zip(&sc).map(|((a, b), s)| ((a - b).norm() / s).powi(2)).sum::<f64>() / n).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(t_end)
}

/// Separation (relative to scale) below which a collapsed step size is
/// attributed to an imminent collision.
const STALL_COLLISION: f64 = 1e-3;

fn stall(flow: &FlowSpec, y: &[Complex64], time: f64, reason: String) -> Error {
    match closest_pair(flow, y) {
        Some((separation, i, j)) if separation <= STALL_COLLISION * flow.scale(y) => Error::Collision {
            time,
            i,
            j,
            separation,
        },
        _ => Error::StepFailure { time, reason },
    }
}

fn closest_pair(flow: &FlowSpec, z: &[Complex64]) -> Option<(f64, usize, usize)> {
    flow.min_separation(z)
}

/// Integrate `init` under `flow` to `t_end`, sampling on `opts.grid`.
pub fn integrate(flow: &FlowSpec, init: &ChargeConfiguration, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::Validation(format!("t_end must be finite and nonnegative, got {t_end}")));
    }
    if !(opts.rtol > 0.0 && opts.atol >= 0.0) {
        return Err(Error::Validation("tolerances must be positive".into()));
    }
    let t0 = init.time;
    let start = init.with_positions(&init.positions(), t0);
    let mut f = rhs(flow, &start)?;
    let grid = output_times(&opts.grid, t_end)?;

    let mut y = start.positions();
    let mut times = vec![t0];
    let mut states = vec![start.clone()];
    let mut next_out = 1;
    let mut stats = StepStats {
        evaluations: 1,
        ..Default::default()
    };

    let mut t = 0.0;
    let mut h = if t_end > 0.0 {
        initial_step(flow, &y, &f, opts.rtol, opts.atol, t_end)
    } else {
        0.0
    };
    let h_min = 1e-13 * t_end;

    while t < t_end && next_out < grid.len() {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepFailure {
                time: t0 + t,
                reason: format!("step limit {} reached", opts.max_steps),
            });
        }
        if t + h > t_end || t_end - (t + h) < h_min {
            h = t_end - t;
        }
        let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
        k.push(f.clone());
        for s in 1..7 {
            let ys = axpy(&y, h, &A[s][..s], &k);
            k.push(flow.velocities(&ys));
        }
        stats.evaluations += 6;
        let y_new = axpy(&y, h, &A[6], &k[..6]);
        let err: Vec<Complex64> = (0..y.len())
            .map(|i| (0..7).map(|s| k[s][i] * E[s]).sum::<Complex64>() * h)
            .collect();
        let en = error_norm(&err, &y, &y_new, opts.rtol, opts.atol);
        if !en.is_finite() || y_new.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            stats.rejected += 1;
            h *= 0.25;
            if h < h_min {
                return Err(stall(flow, &y, t0 + t, "non-finite state".into()));
            }
            continue;
        }
        let factor = (0.9 * en.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        if en > 1.0 {
            stats.rejected += 1;
            h *= factor.min(1.0);
            if h < h_min {
                return Err(stall(flow, &y, t0 + t, format!("step size {h:e} below floor {h_min:e}")));
            }
            continue;
        }

        let dense = Dense::new(&y, &y_new, h, &k);
        // Collision scan across the step, then bisection on the first offending interval.
        let mut prev = 0.0;
        for theta in [0.25, 0.5, 0.75, 1.0] {
            let z = if theta == 1.0 { y_new.clone() } else { dense.at(theta) };
            let delta = flow.collision_threshold(&z);
            if let Some((d, _, _)) = closest_pair(flow, &z) {
                if d <= delta {
                    let (mut lo, mut hi) = (prev, theta);
                    while hi - lo > 1e-3 {
                        let mid = 0.5 * (lo + hi);
                        let zm = dense.at(mid);
                        match closest_pair(flow, &zm) {
                            Some((dm, _, _)) if dm <= flow.collision_threshold(&zm) => hi = mid,
                            _ => lo = mid,
                        }
                    }
                    let zc = dense.at(hi);
                    let (sep, i, j) = closest_pair(flow, &zc).unwrap();
                    return Err(Error::Collision {
                        time: t0 + t + hi * h,
                        i,
                        j,
                        separation: sep,
                    });
                }
            }
            prev = theta;
        }

        let t_new = if h == t_end - t { t_end } else { t + h };
        while next_out < grid.len() && grid[next_out] <= t_new {
            let tau = grid[next_out];
            let z = if tau == t_new { y_new.clone() } else { dense.at((tau - t) / h) };
            times.push(t0 + tau);
            states.push(start.with_positions(&z, t0 + tau));
            next_out += 1;
        }
        stats.accepted += 1;
        t = t_new;
        y = y_new;
        f = k.swap_remove(6);
        h *= factor;
    }

    let monitors = states
        .iter()
        .map(|s| {
            let z = s.positions();
            Monitor {
                residual: residual_at(flow, &z),
                min_separation: flow.min_separation(&z).map_or(f64::INFINITY, |m| m.0),
                conserved: Vec::new(),
            }
        })
        .collect();
    Ok(Trajectory {
        times,
        states,
        monitors,
        stats,
    })
}
