//! Equilibrium gradient and log-energy of a configuration of net charges.
//!
//! If H[p, q] = 0 (Λ = 1) and zᵢ is a root of p of multiplicity a and of q of
//! multiplicity b with P(zᵢ) ≠ 0, the double pole of H/(pq) at zᵢ forces
//! (a − b)² = a + b, and the residue is cᵢ·Gᵢ with net charge cᵢ = a − b and
//!
//! Gᵢ = 2P(zᵢ) Σⱼ cⱼ/(zᵢ − zⱼ) + U(zᵢ) + (cᵢ/2) P′(zᵢ).
//!
//! Gᵢ = (P(zᵢ)/cᵢ)·∂E/∂zᵢ for
//!
//! E = Σ_{i<j} cᵢcⱼ ln(zᵢ − zⱼ)² + Σᵢ [cᵢ u(zᵢ) + (cᵢ²/2) ln P(zᵢ)], u′ = U/P.
//!
//! At zeros of P the residue depends on a + b, not only on cᵢ.

use num_complex::Complex64;

use super::{ChargeConfiguration, SystemCoefficients};
use crate::error::{Error, Result};

pub fn equilibrium_gradient(cfg: &ChargeConfiguration, sys: &SystemCoefficients<Complex64>) -> Result<Vec<Complex64>> {
    cfg.check_distinct()?;
    let z = cfg.positions();
    let c = cfg.net_charges();
    let dp = sys.p.derivative();
    Ok((0..z.len())
        .map(|i| {
            let pull: Complex64 = (0..z.len())
                .filter(|&j| j != i)
                .map(|j| c[j] / (z[i] - z[j]))
                .sum();
            sys.p.eval(&z[i]) * 2.0 * pull + sys.u.eval(&z[i]) + dp.eval(&z[i]) * (c[i] / 2.0)
        })
        .collect())
}

/// Diagnostic log-energy with principal-branch logarithms. Requires quadratic
/// P and linear U.
pub fn energy(cfg: &ChargeConfiguration, sys: &SystemCoefficients<Complex64>) -> Result<Complex64> {
    cfg.check_distinct()?;
    let z = cfg.positions();
    let c = cfg.net_charges();
    if sys.p.degree().unwrap_or(0) > 2 || sys.u.degree().unwrap_or(0) > 1 {
        return Err(Error::Validation("energy needs quadratic P and linear U".into()));
    }
    let mut e = Complex64::new(0.0, 0.0);
    for i in 0..z.len() {
        let pz = sys.p.eval(&z[i]);
        if pz.norm() == 0.0 {
            return Err(Error::PZero { index: i });
        }
        for j in i + 1..z.len() {
            let d = z[i] - z[j];
            e += c[i] * c[j] * (d * d).ln();
        }
        e += c[i] * external_potential(sys, z[i]) + c[i] * c[i] / 2.0 * pz.ln();
    }
    Ok(e)
}

/// u with u′ = U/P, by partial fractions.
fn external_potential(sys: &SystemCoefficients<Complex64>, z: Complex64) -> Complex64 {
    let (pa, pb, pc) = (sys.p.coeff(0), sys.p.coeff(1), sys.p.coeff(2));
    let (a, b) = (sys.u.coeff(0), sys.u.coeff(1));
    let zero = Complex64::new(0.0, 0.0);
    if pc == zero {
        if pb == zero {
            return (a * z + b * z * z / 2.0) / pa;
        }
        return b * z / pb + (a - b * pa / pb) / pb * (pa + pb * z).ln();
    }
    let disc = (pb * pb - pc * pa * 4.0).sqrt();
    if disc.norm() <= 1e-14 * (pb.norm() + pc.norm() + pa.norm()) {
        let r = -pb / (pc * 2.0);
        return b / pc * (z - r).ln() - (a + b * r) / (pc * (z - r));
    }
    let r1 = (-pb + disc) / (pc * 2.0);
    let r2 = (-pb - disc) / (pc * 2.0);
    let res1 = (a + b * r1) / (pc * (r1 - r2));
    let res2 = (a + b * r2) / (pc * (r2 - r1));
    res1 * (z - r1).ln() + res2 * (z - r2).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Species;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sys(p: &[Complex64], u: &[Complex64]) -> SystemCoefficients<Complex64> {
        SystemCoefficients::bilinear(p, u, c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn gradient_examples() {
        let hermite = sys(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(-2.0, 0.0)]);
        let single = ChargeConfiguration::bilinear(vec![c(0.0, 0.0)], vec![], 1.0);
        assert_eq!(equilibrium_gradient(&single, &hermite).unwrap(), vec![c(0.0, 0.0)]);

        let free = sys(&[c(1.0, 0.0)], &[]);
        let (x, y) = (c(0.3, -0.2), c(-1.1, 0.5));
        let pair = ChargeConfiguration::bilinear(vec![x], vec![y], 1.0);
        let g = equilibrium_gradient(&pair, &free).unwrap();
        assert!((g[0] + 2.0 / (x - y)).norm() < 1e-15);
        assert!((g[1] - 2.0 / (y - x)).norm() < 1e-15);
        assert!(g[0].norm() > 0.0);

        let coincident = ChargeConfiguration::bilinear(vec![x], vec![x], 1.0);
        assert!(matches!(
            equilibrium_gradient(&coincident, &free),
            Err(Error::CoincidentPositions { .. })
        ));
    }

    #[test]
    fn energy_examples() {
        let free = sys(&[c(1.0, 0.0)], &[]);
        let pair = ChargeConfiguration::bilinear(vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![], 1.0);
        assert!((energy(&pair, &free).unwrap() - c(4f64.ln(), 0.0)).norm() < 1e-15);

        let even = sys(&[c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)], &[c(0.0, 0.0), c(0.7, 0.0)]);
        let cfg = ChargeConfiguration::bilinear(vec![c(0.3, 0.1), c(-0.7, 0.2)], vec![c(0.2, -0.4)], 1.0);
        let mirrored = ChargeConfiguration::bilinear(vec![c(-0.3, -0.1), c(0.7, -0.2)], vec![c(-0.2, 0.4)], 1.0);
        let (e1, e2) = (energy(&cfg, &even).unwrap(), energy(&mirrored, &even).unwrap());
        // Principal branches agree up to multiples of 2πi.
        assert!((e1.re - e2.re).abs() < 1e-12);

        let zero_p = sys(&[c(0.0, 0.0), c(1.0, 0.0)], &[]);
        let at_root = ChargeConfiguration::bilinear(vec![c(0.0, 0.0)], vec![], 1.0);
        assert!(matches!(energy(&at_root, &zero_p), Err(Error::PZero { index: 0 })));
    }

    #[test]
    fn gradient_matches_energy_derivative() {
        let systems = [
            sys(&[c(1.0, 0.0)], &[c(0.4, 0.0), c(-1.3, 0.0)]),
            sys(&[c(0.5, 0.0), c(1.0, 0.0)], &[c(0.2, 0.0), c(0.9, 0.0)]),
            sys(&[c(2.0, 0.0), c(0.3, 0.0), c(-1.0, 0.0)], &[c(1.0, 0.0), c(0.5, 0.0)]),
            sys(&[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)], &[c(-0.4, 0.0), c(1.5, 0.0)]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for s in &systems {
            for _ in 0..20 {
                let mut species = vec![
                    Species {
                        charge: 1.0,
                        positions: vec![],
                        multiplicities: Some(vec![]),
                    },
                    Species {
                        charge: -1.0,
                        positions: vec![],
                        multiplicities: Some(vec![]),
                    },
                ];
                for k in 0..5 {
                    let sp = &mut species[k % 2];
                    sp.positions.push(c(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..2.0)));
                    sp.multiplicities.as_mut().unwrap().push(rng.gen_range(1..4));
                }
                let cfg = ChargeConfiguration::new(species);
                let g = equilibrium_gradient(&cfg, s).unwrap();
                let z = cfg.positions();
                let charges = cfg.net_charges();
                let h = 1e-6;
                for i in 0..z.len() {
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[i] += h;
                    zm[i] -= h;
                    let de = (energy(&cfg.with_positions(&zp, 0.0), s).unwrap()
                        - energy(&cfg.with_positions(&zm, 0.0), s).unwrap())
                        / (2.0 * h);
                    let expected = de * s.p.eval(&z[i]) / charges[i];
                    assert!(
                        (g[i] - expected).norm() <= 1e-6 * expected.norm().max(1.0),
                        "gradient {} vs {}",
                        g[i],
                        expected
                    );
                }
            }
        }
    }
}
