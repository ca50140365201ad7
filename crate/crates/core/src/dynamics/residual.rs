//! Consistency between the root velocities and the induced polynomial evolution
//! Σ Qᵢ (dqᵢ/dt) Π_{n≠i} qₙ = H[q₁, …, q_l].

use num_complex::Complex64;

use super::flow::FlowSpec;
use super::integrator::Trajectory;
use crate::error::{Error, Result};
use crate::operators::polylinear_h;
use crate::polynomials::{from_roots, FloatPoly, Poly, RootList};

/// q / (z − r) by synthetic division (r must be a root of q).
fn deflate(q: &FloatPoly, r: Complex64) -> FloatPoly {
    let c = q.coeffs();
    if c.len() < 2 {
        return Poly::zero();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); c.len() - 1];
    let mut acc = Complex64::new(0.0, 0.0);
    for k in (1..c.len()).rev() {
        acc = acc * r + c[k];
        out[k - 1] = acc;
    }
    Poly::new(out)
}

/// Residual of the induced evolution at positions `z`, normalized by the
/// largest coefficient of Π qᵢ. `None` for flows without a multilinear operator.
pub fn residual_at(flow: &FlowSpec, z: &[Complex64]) -> Option<f64> {
    if !flow.has_operator_residual() {
        return None;
    }
    let v = flow.velocities(z);
    let mut qs = Vec::with_capacity(flow.sizes.len());
    let mut dqs = Vec::with_capacity(flow.sizes.len());
    let mut k = 0;
    for &n in &flow.sizes {
        let roots = &z[k..k + n];
        let q = from_roots(&RootList::new(roots.to_vec()));
        // dq/dt = −Σᵣ vᵣ q/(z − rᵣ)
        let mut dq = Poly::zero();
        for (r, vr) in roots.iter().zip(&v[k..k + n]) {
            dq = &dq + &deflate(&q, *r).scale(&-vr);
        }
        qs.push(q);
        dqs.push(dq);
        k += n;
    }
    let mut lhs = Poly::zero();
    for i in 0..qs.len() {
        let rest = qs
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(Poly::one(), |acc, (_, q)| &acc * q);
        lhs = &lhs + &(&dqs[i] * &rest).scale(&flow.sys.charges[i]);
    }
    let h = polylinear_h(&flow.sys, &qs).ok()?;
    let product = qs.iter().fold(Poly::one(), |acc, q| &acc * q);
    Some((&lhs - &h).max_abs() / product.max_abs())
}

/// Residual at sample `k` of a trajectory.
pub fn bilinear_residual(flow: &FlowSpec, traj: &Trajectory, k: usize) -> Result<f64> {
    let state = traj
        .states
        .get(k)
        .ok_or_else(|| Error::Validation(format!("sample {k} out of range ({} samples)", traj.len())))?;
    flow.check_layout(state)?;
    residual_at(flow, &state.positions())
        .ok_or_else(|| Error::Validation(format!("{:?} flows have no operator residual", flow.kind)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::SystemCoefficients;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn deflation() {
        let q = from_roots(&RootList::new(vec![c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.5)]));
        let d = deflate(&q, c(-2.0, 1.0));
        let expected = from_roots(&RootList::new(vec![c(1.0, 0.0), c(0.5, 0.5)]));
        assert!((&d - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn not_defined_for_linear_or_angular() {
        let sys = SystemCoefficients::linear(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(-2.0, 0.0)], 2).unwrap();
        let flow = FlowSpec::linear(sys).unwrap();
        assert_eq!(residual_at(&flow, &[c(1.0, 0.0), c(-1.0, 0.0)]), None);
        assert_eq!(residual_at(&FlowSpec::angular(1, 1), &[c(1.0, 0.0), c(0.0, 0.0)]), None);
    }

    #[test]
    fn wrong_lambda_is_detected() {
        let sys = SystemCoefficients::bilinear(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(-2.0, 0.0)], c(1.0, 0.0))
            .unwrap()
            .with_lambda(c(7.0, 0.0));
        let flow = FlowSpec::bilinear(sys, 2, 1).unwrap();
        assert!(residual_at(&flow, &[c(0.3, 0.0), c(-1.0, 0.2), c(0.8, -0.5)]).unwrap() > 1e-3);
    }

    fn point() -> impl Strategy<Value = Complex64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
    }

    proptest! {
        #[test]
        fn residual_vanishes_for_generic_states(
            pts in prop::collection::vec(point(), 5),
            lam in 0.3..2.5f64,
            p in prop::collection::vec(-1.0..1.0f64, 2),
            u in prop::collection::vec(-1.0..1.0f64, 2),
        ) {
            let min = crate::operators::ChargeConfiguration::bilinear(pts.clone(), vec![], 1.0)
                .min_separation()
                .unwrap()
                .0;
            prop_assume!(min > 0.1);
            let pc: Vec<Complex64> = std::iter::once(1.0).chain(p).map(|x| c(x, 0.0)).collect();
            let uc: Vec<Complex64> = u.iter().map(|&x| c(x, 0.0)).collect();
            let sys = SystemCoefficients::bilinear(&pc, &uc, c(lam, 0.0)).unwrap();
            let flow = FlowSpec::bilinear(sys, 3, 2).unwrap();
            prop_assert!(residual_at(&flow, &pts).unwrap() < 1e-10);
        }
    }
}
