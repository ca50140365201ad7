use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{FlowKind, FlowSpec};
use crate::error::{Error, Result};
use crate::operators::ChargeConfiguration;

/// Row-major square blocks of the block-diagonal Lax matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaxPair {
    pub lx: Vec<Vec<Complex64>>,
    pub ly: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralSet {
    /// Iₖ = |Tr Lᵏ|², k = 1 … 2(n+m)−1.
    pub values: Vec<f64>,
}

fn block(z: &[Complex64], v: &[Complex64], omega: f64) -> Vec<Vec<Complex64>> {
    let i = Complex64::new(0.0, 1.0);
    (0..z.len())
        .map(|j| {
            (0..z.len())
                .map(|k| {
                    if j == k {
                        (i * v[j] + omega * z[j]) * 0.5
                    } else {
                        (z[j] - z[k]).inv()
                    }
                })
                .collect()
        })
        .collect()
}

/// Lax blocks with diagonal ½(i żⱼ + ωzⱼ) (velocities from the flow) and
/// off-diagonal 1/(zⱼ − z_k).
pub fn lax(state: &ChargeConfiguration, flow: &FlowSpec) -> Result<LaxPair> {
    let lam = flow.sys.capital_lambda().map(|l| l.re);
    if flow.kind != FlowKind::RationalOmega || lam != Some(1.0) {
        return Err(Error::Validation("Lax matrices need the rational flow with Λ = 1".into()));
    }
    flow.check_layout(state)?;
    state.check_distinct()?;
    let z = state.positions();
    let v = flow.velocities(&z);
    let n = flow.sizes[0];
    Ok(LaxPair {
        lx: block(&z[..n], &v[..n], flow.omega()),
        ly: block(&z[n..], &v[n..], flow.omega()),
    })
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn trace(a: &[Vec<Complex64>]) -> Complex64 {
    (0..a.len()).map(|i| a[i][i]).sum()
}

/// Traces of Lᵏ for k = 1..=kmax.
fn power_traces(l: &[Vec<Complex64>], kmax: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(kmax);
    if l.is_empty() {
        return vec![Complex64::new(0.0, 0.0); kmax];
    }
    let mut power = l.to_vec();
    for k in 1..=kmax {
        if k > 1 {
            power = matmul(&power, l);
        }
        out.push(trace(&power));
    }
    out
}

pub fn integrals(state: &ChargeConfiguration, flow: &FlowSpec) -> Result<IntegralSet> {
    let pair = lax(state, flow)?;
    let kmax = (2 * state.len()).saturating_sub(1);
    let tx = power_traces(&pair.lx, kmax);
    let ty = power_traces(&pair.ly, kmax);
    Ok(IntegralSet {
        values: tx.iter().zip(&ty).map(|(a, b)| (a + b).norm_sqr()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegrateOptions};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_particle() {
        let flow = FlowSpec::rational_omega(1.7, 1.0, 1, 0);
        let x = c(0.6, -0.2);
        let state = flow.configuration(&[x], 0.0);
        let l = lax(&state, &flow).unwrap();
        assert!((l.lx[0][0] - 1.7 * x).norm() < 1e-15);
        assert!(l.ly.is_empty());
        let i = integrals(&state, &flow).unwrap();
        assert_eq!(i.values.len(), 1);
        assert!((i.values[0] - 1.7f64.powi(2) * x.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn symmetric_pair_has_zero_trace() {
        let flow = FlowSpec::rational_omega(1.0, 1.0, 2, 0);
        let x = c(0.8, 0.4);
        let i = integrals(&flow.configuration(&[x, -x], 0.0), &flow).unwrap();
        assert!(i.values[0] < 1e-28);
    }

    #[test]
    fn trace_matches_substitution() {
        // Substituting the velocities, like-species sums cancel in the trace:
        // Tr L = ω(Σx + Σy) + 2Σ_{x,y} 1/(y − x).
        let omega = 0.9;
        let flow = FlowSpec::rational_omega(omega, 1.0, 2, 1);
        let (x, y) = ([c(0.3, 0.2), c(-0.7, 0.5)], c(0.4, -0.9));
        let state = flow.configuration(&[x[0], x[1], y], 0.0);
        let l = lax(&state, &flow).unwrap();
        let tr = trace(&l.lx) + trace(&l.ly);
        let cross: Complex64 = x.iter().map(|xi| 2.0 / (y - xi)).sum();
        let expected = omega * (x[0] + x[1] + y) + cross;
        assert!((tr - expected).norm() < 1e-13);
    }

    #[test]
    fn integrals_are_conserved() {
        let flow = FlowSpec::rational_omega(1.0, 1.0, 2, 1);
        let state = flow.configuration(&[c(0.9, 0.3), c(-0.7, 0.2), c(0.1, -0.8)], 0.0);
        let traj = integrate(&flow, &state, 2.0 * PI, &IntegrateOptions::default()).unwrap();
        let i0 = integrals(&traj.states[0], &flow).unwrap().values;
        assert_eq!(i0.len(), 5);
        let i1 = integrals(traj.last(), &flow).unwrap().values;
        for (a, b) in i0.iter().zip(&i1) {
            assert!((a - b).abs() < 1e-6 * a.abs());
        }
    }

    #[test]
    fn highest_symbols() {
        let z = [c(0.9, 0.3), c(-0.7, 0.2), c(0.1, -0.8)];
        let worst = |omega: f64| {
            let flow = FlowSpec::rational_omega(omega, 1.0, 2, 1);
            let values = integrals(&flow.configuration(&z, 0.0), &flow).unwrap().values;
            values
                .iter()
                .enumerate()
                .map(|(k, ik)| {
                    let k = k as i32 + 1;
                    let symbol: Complex64 = z.iter().map(|w| w.powi(k)).sum();
                    (ik / omega.powi(2 * k) / symbol.norm_sqr() - 1.0).abs()
                })
                .fold(0.0, f64::max)
        };
        // The deviation is O(1/ω).
        let (a, b) = (worst(1e6), worst(1e8));
        assert!(a < 1e-4 && b < 1e-6, "{a} {b}");
        assert!((a / b - 100.0).abs() < 10.0, "{a} {b}");
    }

    #[test]
    fn rejects_general_lambda() {
        let flow = FlowSpec::rational_omega(1.0, 1.5, 1, 1);
        let state = flow.configuration(&[c(1.0, 0.0), c(-1.0, 0.0)], 0.0);
        assert!(matches!(lax(&state, &flow), Err(Error::Validation(_))));
    }
}
