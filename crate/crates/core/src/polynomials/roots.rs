//! Simultaneous root iteration (Aberth–Ehrlich) and the inverse map.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ExactPoly, FloatPoly, Poly};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Ring};

pub const MAX_ROOT_ITERATIONS: usize = 200;
pub const DEFAULT_ROOT_TOL: f64 = 1e-14;
const PHASE_SEED: u64 = 0x5eed_ab37;

/// Root multiset with its magnitude scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootList {
    pub roots: Vec<Complex64>,
    pub scale: f64,
}

impl RootList {
    pub fn new(roots: Vec<Complex64>) -> Self {
        let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
        RootList { roots, scale }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Scale floored at 1 for use in relative tolerances.
    pub fn tol_scale(&self) -> f64 {
        self.scale.max(1.0)
    }
}

/// Monic ∏(z − rᵢ).
pub fn from_roots(roots: &RootList) -> FloatPoly {
    roots
        .roots
        .iter()
        .fold(Poly::one(), |acc, r| &acc * &Poly::linear_factor(*r))
}

pub fn from_roots_exact(roots: &[Rational]) -> ExactPoly {
    roots
        .iter()
        .fold(Poly::one(), |acc, r| &acc * &Poly::linear_factor(r.clone()))
}

/// All roots of `p` (with multiplicity). `rtol` bounds the final Aberth
/// correction relative to the root scale; roots whose residual reaches the
/// rounding floor are also accepted, which is what terminates the iteration
/// on clustered (multiple) roots.
pub fn find_roots(p: &FloatPoly, rtol: f64) -> Result<RootList> {
    let degree = match p.degree() {
        None | Some(0) => {
            return Err(Error::Validation(
                "root finding needs a polynomial of degree >= 1".into(),
            ))
        }
        Some(d) => d,
    };

    // Exact zero roots are deflated up front.
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let deflated = Poly::new(p.coeffs()[zeros..].to_vec());
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if degree > zeros {
        roots.extend(aberth(&deflated, rtol)?);
    }
    Ok(RootList::new(roots))
}

fn aberth(p: &FloatPoly, rtol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree().expect("nonconstant");
    let c = p.coeffs();
    let lead = c[n];
    if n == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    let dp = p.derivative();

    // Fujiwara bound: 2·max |c_{n−k}/c_n|^{1/k}, with the constant term halved.
    let radius = (1..=n)
        .map(|k| {
            let ratio = (c[n - k] / lead).norm();
            if k == n {
                (ratio / 2.0).powf(1.0 / k as f64)
            } else {
                ratio.powf(1.0 / k as f64)
            }
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(PHASE_SEED);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let jitter: f64 = rng.gen_range(-0.25..0.25);
            let theta = std::f64::consts::TAU * (k as f64 + jitter) / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let eps = f64::EPSILON;
    let mut done = vec![false; n];
    let mut max_corr = f64::INFINITY;
    for _ in 0..MAX_ROOT_ITERATIONS {
        let scale = z.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1e-300);
        max_corr = 0.0;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = p.eval(&zi);
            let floor = 8.0 * n as f64 * eps * p.eval_abs(zi.norm());
            if pv.norm() <= floor {
                done[i] = true;
                continue;
            }
            let dv = dp.eval(&zi);
            let ratio = pv / dv;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (zi - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            let w = if w.is_finite() { w } else { ratio };
            z[i] = zi - w;
            max_corr = max_corr.max(w.norm());
            if w.norm() <= rtol * scale {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ROOT_ITERATIONS,
        max_correction: max_corr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fp(cs: &[f64]) -> FloatPoly {
        Poly::new(cs.iter().map(|&x| c(x, 0.0)).collect())
    }

    fn assert_roots(found: &RootList, expected: &[Complex64], tol: f64) {
        assert_eq!(found.len(), expected.len());
        for e in expected {
            assert!(
                found.roots.iter().any(|z| (z - e).norm() < tol),
                "{e} not found in {:?}",
                found.roots
            );
        }
    }

    #[test]
    fn from_roots_examples() {
        let p = from_roots(&RootList::new(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        assert_eq!(p, fp(&[2.0, -3.0, 1.0]));
        assert_eq!(from_roots(&RootList::new(vec![])), FloatPoly::one());
        let p = from_roots(&RootList::new(vec![c(0.0, 1.0), c(0.0, -1.0)]));
        assert_eq!(p, fp(&[1.0, 0.0, 1.0]));
    }

    #[test]
    fn simple_roots() {
        let r = find_roots(&fp(&[1.0, 0.0, 1.0]), DEFAULT_ROOT_TOL).unwrap();
        assert_roots(&r, &[c(0.0, -1.0), c(0.0, 1.0)], 1e-14);
        let r = find_roots(&fp(&[2.0, -3.0, 1.0]), DEFAULT_ROOT_TOL).unwrap();
        assert_roots(&r, &[c(1.0, 0.0), c(2.0, 0.0)], 1e-14);
    }

    #[test]
    fn reduced_q_has_no_real_roots() {
        let q = fp(&[3.0, 0.0, -4.0, 0.0, 4.0]);
        let r = find_roots(&q, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(r.len(), 4);
        for z in &r.roots {
            assert!(z.im.abs() > 0.1, "unexpected real root {z}");
            assert!(q.eval(z).norm() < 1e-12);
        }
    }

    #[test]
    fn wide_coefficient_range() {
        // z^21 − 4^21: Cauchy's bound is ~4e12 while every root has modulus 4.
        let mut cs = vec![0.0; 22];
        cs[0] = -(4.0f64.powi(21));
        cs[21] = 1.0;
        let r = find_roots(&fp(&cs), DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(r.len(), 21);
        for z in &r.roots {
            assert!((z.norm() - 4.0).abs() < 1e-10, "{z}");
        }
    }

    #[test]
    fn multiple_roots_terminate() {
        // (z − 1)^3 (z + 2)
        let p = from_roots(&RootList::new(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-2.0, 0.0),
        ]));
        let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        let near_one = r.roots.iter().filter(|z| (*z - c(1.0, 0.0)).norm() < 1e-4).count();
        assert_eq!(near_one, 3);
    }

    #[test]
    fn zero_roots_are_exact() {
        let p = fp(&[0.0, 0.0, -1.0, 1.0]);
        let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
        assert_eq!(r.roots.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn constant_is_rejected() {
        assert!(find_roots(&fp(&[3.0]), DEFAULT_ROOT_TOL).is_err());
    }

    #[test]
    fn exact_from_roots() {
        let p = from_roots_exact(&[Rational::from_i64(1), Rational::from_i64(2)]);
        assert_eq!(p, ExactPoly::from_i64s(&[2, -3, 1]));
    }

    fn separated_roots() -> impl Strategy<Value = Vec<Complex64>> {
        (1usize..=12, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out: Vec<Complex64> = Vec::new();
            while out.len() < n {
                let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if out.iter().all(|w| (w - z).norm() > 0.05) {
                    out.push(z);
                }
            }
            out
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn roundtrip_coefficients(roots in separated_roots()) {
            let p = from_roots(&RootList::new(roots.clone()));
            let found = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
            let q = from_roots(&found);
            let scale = p.max_abs();
            for k in 0..=roots.len() {
                prop_assert!((p.coeff(k) - q.coeff(k)).norm() <= 1e-8 * scale);
            }
            // multiset recovered
            for r in &roots {
                let best = found.roots.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-9 * found.tol_scale());
            }
        }
    }
}
