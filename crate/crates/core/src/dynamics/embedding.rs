//! Second-order (Newton) form of the first-order flows:
//! Qⱼ [z̈ⱼ/P(zⱼ) − P′(zⱼ)żⱼ²/(2P(zⱼ)²)] = ∂V/∂zⱼ,
//! with conserved energy Σ Qⱼżⱼ²/(2Pⱼ) − V.
//!
//! Polylinear potential, U_Q = U + (Q/2)P′:
//!   V = Σⱼ Qⱼ U_{Qⱼ}(zⱼ)²/(2Pⱼ) + Σ_{k<j} Q_kQⱼ(Q_k+Qⱼ)(P_k+Pⱼ)/(z_k−zⱼ)².
//! Linear potential, P = A + Bz + Cz² + Dz³ + Ez⁴, s = zᵢ + zⱼ:
//!   V = Σ_{i<j} [2(Pᵢ+Pⱼ)/(zᵢ−zⱼ)² + 2(n−2)(Es² + Ds) + 2(Uᵢ−Uⱼ)/(zᵢ−zⱼ)] + ½Σ U²/P.

use num_complex::Complex64;

use super::flow::{FlowKind, FlowSpec};
use super::integrator::Trajectory;
use crate::error::{Error, Result};

struct Fields {
    p: Vec<Complex64>,
    dp: Vec<Complex64>,
    u: Vec<Complex64>,
    du: Vec<Complex64>,
    ddp: Vec<Complex64>,
}

fn fields(flow: &FlowSpec, z: &[Complex64]) -> Result<Fields> {
    let (dp, ddp, du) = (flow.sys.p.derivative(), flow.sys.p.nth_derivative(2), flow.sys.u.derivative());
    let p: Vec<Complex64> = z.iter().map(|w| flow.sys.p.eval(w)).collect();
    if let Some(index) = p.iter().position(|v| v.norm() == 0.0) {
        return Err(Error::PZero { index });
    }
    Ok(Fields {
        dp: z.iter().map(|w| dp.eval(w)).collect(),
        ddp: z.iter().map(|w| ddp.eval(w)).collect(),
        u: z.iter().map(|w| flow.sys.u.eval(w)).collect(),
        du: z.iter().map(|w| du.eval(w)).collect(),
        p,
    })
}

fn check_kind(flow: &FlowSpec) -> Result<()> {
    if flow.kind == FlowKind::Angular {
        return Err(Error::Validation("the angular flow has no Newton embedding here".into()));
    }
    Ok(())
}

fn n_linear(flow: &FlowSpec) -> f64 {
    flow.sizes[0] as f64
}

pub fn potential(flow: &FlowSpec, z: &[Complex64]) -> Result<Complex64> {
    check_kind(flow)?;
    let f = fields(flow, z)?;
    let mut v = Complex64::new(0.0, 0.0);
    if flow.kind == FlowKind::Linear {
        let n = n_linear(flow);
        let (d, e) = (flow.sys.p.coeff(3), flow.sys.p.coeff(4));
        for i in 0..z.len() {
            v += f.u[i] * f.u[i] / (f.p[i] * 2.0);
            for j in i + 1..z.len() {
                let (dz, s) = (z[i] - z[j], z[i] + z[j]);
                v += (f.p[i] + f.p[j]) * 2.0 / (dz * dz)
                    + (e * s * s + d * s) * (2.0 * (n - 2.0))
                    + (f.u[i] - f.u[j]) * 2.0 / dz;
            }
        }
    } else {
        let q = flow.particle_charges();
        for i in 0..z.len() {
            let uq = f.u[i] + f.dp[i] * (q[i] / 2.0);
            v += uq * uq * q[i] / (f.p[i] * 2.0);
            for j in i + 1..z.len() {
                let dz = z[i] - z[j];
                v += (f.p[i] + f.p[j]) * (q[i] * q[j] * (q[i] + q[j])) / (dz * dz);
            }
        }
    }
    Ok(v)
}

pub fn potential_gradient(flow: &FlowSpec, z: &[Complex64]) -> Result<Vec<Complex64>> {
    check_kind(flow)?;
    let f = fields(flow, z)?;
    let mut g = vec![Complex64::new(0.0, 0.0); z.len()];
    if flow.kind == FlowKind::Linear {
        let n = n_linear(flow);
        let (d, e) = (flow.sys.p.coeff(3), flow.sys.p.coeff(4));
        for a in 0..z.len() {
            let (p, dp, u, du) = (f.p[a], f.dp[a], f.u[a], f.du[a]);
            g[a] += u * du / p - u * u * dp / (p * p * 2.0);
            for b in 0..z.len() {
                if b == a {
                    continue;
                }
                let (dz, s) = (z[a] - z[b], z[a] + z[b]);
                g[a] += (dp / (dz * dz) - (p + f.p[b]) * 2.0 / (dz * dz * dz)) * 2.0
                    + (e * s * 2.0 + d) * (2.0 * (n - 2.0))
                    + du * 2.0 / dz
                    - (u - f.u[b]) * 2.0 / (dz * dz);
            }
        }
    } else {
        let q = flow.particle_charges();
        for a in 0..z.len() {
            let p = f.p[a];
            let uq = f.u[a] + f.dp[a] * (q[a] / 2.0);
            let duq = f.du[a] + f.ddp[a] * (q[a] / 2.0);
            g[a] += (uq * duq / p - uq * uq * f.dp[a] / (p * p * 2.0)) * q[a];
            for b in 0..z.len() {
                if b == a {
                    continue;
                }
                let dz = z[a] - z[b];
                let amp = q[a] * q[b] * (q[a] + q[b]);
                g[a] += (f.dp[a] / (dz * dz) - (p + f.p[b]) * 2.0 / (dz * dz * dz)) * amp;
            }
        }
    }
    Ok(g)
}

/// Σ Qⱼżⱼ²/(2Pⱼ) − V with velocities from the flow.
pub fn hamiltonian(flow: &FlowSpec, z: &[Complex64]) -> Result<Complex64> {
    let v = flow.velocities(z);
    let q = match flow.kind {
        FlowKind::Linear => vec![1.0; z.len()],
        _ => flow.particle_charges(),
    };
    let f = fields(flow, z)?;
    let kinetic: Complex64 = (0..z.len()).map(|i| v[i] * v[i] * q[i] / (f.p[i] * 2.0)).sum();
    Ok(kinetic - potential(flow, z)?)
}

/// Relative mismatch of the Newton equations at sample k, with z̈ from the
/// centered second difference of neighbouring samples (uniform spacing
/// required) and ż from the flow.
pub fn newton_mismatch(flow: &FlowSpec, traj: &Trajectory, k: usize) -> Result<f64> {
    check_kind(flow)?;
    if k == 0 || k + 1 >= traj.len() {
        return Err(Error::Validation(format!("sample {k} has no neighbours on both sides")));
    }
    let h = traj.times[k + 1] - traj.times[k];
    let h_prev = traj.times[k] - traj.times[k - 1];
    if (h - h_prev).abs() > 1e-9 * h {
        return Err(Error::Validation("samples around k are not uniformly spaced".into()));
    }
    let (zm, z, zp) = (
        traj.states[k - 1].positions(),
        traj.states[k].positions(),
        traj.states[k + 1].positions(),
    );
    let v = flow.velocities(&z);
    let f = fields(flow, &z)?;
    let grad = potential_gradient(flow, &z)?;
    let q = match flow.kind {
        FlowKind::Linear => vec![1.0; z.len()],
        _ => flow.particle_charges(),
    };
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..z.len() {
        let acc = (zp[j] - z[j] * 2.0 + zm[j]) / (h * h);
        let lhs = (acc / f.p[j] - f.dp[j] * v[j] * v[j] / (f.p[j] * f.p[j] * 2.0)) * q[j];
        diff = diff.max((lhs - grad[j]).norm());
        scale = scale.max(lhs.norm()).max(grad[j].norm());
    }
    Ok(if scale == 0.0 { 0.0 } else { diff / scale })
}
