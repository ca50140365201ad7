//! Exact equilibrium pairs: Wronskian constructions and their certificates.
//!
//! Line recipes (Hermite, Laguerre, monomial, Adler–Moser) produce exact
//! (p, q) solving H[p, q] = 0 with Λ = 1. Cylinder pairs are homogeneous
//! polynomials in (X, Y) solving qΔp − 2∇q·∇p + pΔq = 0.

mod cylinder;
mod wronskian_pairs;

pub use cylinder::{cylinder_polynomials, laplace_residual, pi_sixths, Homogeneous, PlanePolynomial};
pub use wronskian_pairs::{adler_moser_chain, adler_moser_theta};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{bilinear_h, equilibrium_gradient, ChargeConfiguration, SystemCoefficients};
use crate::polynomials::{reduce_pair, ChargeSite, ExactPoly, Polynomial, ReducedPair};
use crate::scalar::{rat_to_f64, Rational, Ring};
use cylinder::{plane_max_abs, qsqrt3_string};
use wronskian_pairs::{
    check_indices, hermite_degrees, hermite_polys, laguerre_degrees, laguerre_polys, monomial_degrees, monomial_polys,
};

/// Relative tolerance for float residuals.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-10;
/// Relative tolerance of the gradient cross-check.
pub const GRADIENT_TOL: f64 = 1e-8;
/// Sites with |P| below this are skipped by the gradient cross-check.
const P_ZERO_TOL: f64 = 1e-12;

mod rational_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::scalar::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(|_| D::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(rs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(rs.len()))?;
            for r in rs {
                seq.serialize_element(&r.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .into_iter()
                .map(|s| s.trim().parse().map_err(|_| D::Error::custom(format!("bad rational {s:?}"))))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Recipe {
    HermiteWronskian {
        indices: Vec<usize>,
        #[serde(with = "rational_str")]
        b: Rational,
    },
    LaguerreWronskian {
        indices: Vec<usize>,
        #[serde(with = "rational_str")]
        b: Rational,
    },
    Monomial {
        indices: Vec<usize>,
        #[serde(with = "rational_str")]
        b: Rational,
    },
    /// (θ_{k+1}, θ_k); `ts` holds t₁…t_{k+1}, missing entries are 0.
    AdlerMoser {
        k: usize,
        #[serde(with = "rational_str::vec")]
        ts: Vec<Rational>,
    },
    Cylinder { indices: Vec<usize>, ts: Vec<f64> },
}

impl Recipe {
    /// The bilinear system (Λ = 1) a line recipe solves; None for the cylinder.
    pub fn system(&self) -> Option<SystemCoefficients<Rational>> {
        let zero = <Rational as Zero>::zero;
        let one = <Rational as One>::one;
        let (p, u) = match self {
            Recipe::HermiteWronskian { b, .. } => (vec![one()], vec![zero(), b.clone()]),
            Recipe::LaguerreWronskian { b, .. } => (vec![zero(), one()], vec![zero(), b.clone()]),
            Recipe::Monomial { b, .. } => (vec![zero(), zero(), -one()], vec![zero(), b.clone()]),
            Recipe::AdlerMoser { .. } => (vec![one()], vec![]),
            Recipe::Cylinder { .. } => return None,
        };
        Some(SystemCoefficients::bilinear(&p, &u, one()).expect("quadratic P and linear U"))
    }

    /// Degrees (n, m) predicted by the construction.
    pub fn expected_degrees(&self) -> (usize, usize) {
        match self {
            Recipe::HermiteWronskian { indices, .. } => hermite_degrees(indices),
            Recipe::LaguerreWronskian { indices, .. } => laguerre_degrees(indices),
            Recipe::Monomial { indices, .. } => monomial_degrees(indices),
            Recipe::AdlerMoser { k, .. } => ((k + 1) * (k + 2) / 2, k * (k + 1) / 2),
            Recipe::Cylinder { indices, .. } => {
                let k = indices.len().saturating_sub(1);
                (indices.iter().sum(), indices[..k].iter().sum())
            }
        }
    }
}

/// p or q: a univariate polynomial, or a homogeneous one in (X, Y).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairPolynomial {
    Line(Polynomial),
    Plane(PlanePolynomial),
}

impl PairPolynomial {
    pub fn degree(&self) -> Option<usize> {
        match self {
            PairPolynomial::Line(p) => p.degree(),
            PairPolynomial::Plane(h) => Some(h.degree()),
        }
    }

    pub fn as_line(&self) -> Option<&Polynomial> {
        match self {
            PairPolynomial::Line(p) => Some(p),
            PairPolynomial::Plane(_) => None,
        }
    }

    pub fn as_plane(&self) -> Option<&PlanePolynomial> {
        match self {
            PairPolynomial::Plane(h) => Some(h),
            PairPolynomial::Line(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Residual {
    Unchecked,
    ExactZero,
    Float { norm: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumCertificate {
    pub recipe: Recipe,
    pub p: PairPolynomial,
    pub q: PairPolynomial,
    pub degrees: (usize, usize),
    /// p̄, q̄ and the net-charge inventory (line pairs only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedPair>,
    pub residual: Residual,
    /// max |Gᵢ| / (local scale) over sites where P does not vanish.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gradient: Option<f64>,
}

impl EquilibriumCertificate {
    fn line(recipe: Recipe, p: ExactPoly, q: ExactPoly) -> Result<Self> {
        let degrees = (p.degree().unwrap_or(0), q.degree().unwrap_or(0));
        if degrees != recipe.expected_degrees() {
            return Err(Error::Validation(format!(
                "construction produced degrees {degrees:?}, expected {:?}",
                recipe.expected_degrees()
            )));
        }
        Ok(EquilibriumCertificate {
            recipe,
            p: PairPolynomial::Line(Polynomial::Exact(p)),
            q: PairPolynomial::Line(Polynomial::Exact(q)),
            degrees,
            reduced: None,
            residual: Residual::Unchecked,
            max_gradient: None,
        })
    }

    pub fn inventory(&self) -> &[ChargeSite] {
        self.reduced.as_ref().map_or(&[], |r| &r.inventory)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.residual == Residual::ExactZero
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn certified(cert: EquilibriumCertificate) -> Result<EquilibriumCertificate> {
    certify_recipe(&cert)
}

/// p = W[Q_I], q = W[Q_{i₁…i_k}] for P = 1, U = bz.
pub fn hermite_pair(indices: &[usize], b: &Rational) -> Result<EquilibriumCertificate> {
    let (p, q) = hermite_polys(indices, b)?;
    let recipe = Recipe::HermiteWronskian {
        indices: indices.to_vec(),
        b: b.clone(),
    };
    certified(EquilibriumCertificate::line(recipe, p, q)?)
}

/// P = z, U = bz; k = |I| − 1 must be a multiple of 4.
pub fn laguerre_pair(indices: &[usize], b: &Rational) -> Result<EquilibriumCertificate> {
    let (p, q) = laguerre_polys(indices, b)?;
    let recipe = Recipe::LaguerreWronskian {
        indices: indices.to_vec(),
        b: b.clone(),
    };
    certified(EquilibriumCertificate::line(recipe, p, q)?)
}

/// P = −z², U = bz with monomial eigenfunctions.
pub fn monomial_pair(indices: &[usize], b: &Rational) -> Result<EquilibriumCertificate> {
    let (p, q) = monomial_polys(indices, b)?;
    let recipe = Recipe::Monomial {
        indices: indices.to_vec(),
        b: b.clone(),
    };
    certified(EquilibriumCertificate::line(recipe, p, q)?)
}

/// (θ_{k+1}, θ_k) solving p″q − 2p′q′ + pq″ = 0. `ts` = t₁…t_{k+1} (shorter
/// lists are padded with zeros).
pub fn adler_moser(k: usize, ts: &[Rational]) -> Result<EquilibriumCertificate> {
    if ts.len() > k + 1 {
        return Err(Error::Validation(format!(
            "θ_{} has {} free constants, got {}",
            k + 1,
            k + 1,
            ts.len()
        )));
    }
    let p = adler_moser_theta(k + 1, ts);
    let q = adler_moser_theta(k, ts);
    let recipe = Recipe::AdlerMoser { k, ts: ts.to_vec() };
    certified(EquilibriumCertificate::line(recipe, p, q)?)
}

/// Trigonometric Wronskians of sin(iⱼφ + tⱼ) as homogeneous polynomials.
pub fn cylinder_pair(indices: &[usize], ts: &[f64]) -> Result<EquilibriumCertificate> {
    check_indices(indices)?;
    let (p, q) = cylinder_polynomials(indices, ts)?;
    let recipe = Recipe::Cylinder {
        indices: indices.to_vec(),
        ts: ts.to_vec(),
    };
    let degrees = (p.degree(), q.degree());
    certified(EquilibriumCertificate {
        recipe,
        p: PairPolynomial::Plane(p),
        q: PairPolynomial::Plane(q),
        degrees,
        reduced: None,
        residual: Residual::Unchecked,
        max_gradient: None,
    })
}

/// `certify` against the system the recipe was built for.
pub fn certify_recipe(cert: &EquilibriumCertificate) -> Result<EquilibriumCertificate> {
    match cert.recipe.system() {
        Some(sys) => certify(cert, &sys),
        None => certify_plane(cert),
    }
}

fn first_nonzero<T: Ring>(coeffs: &[T]) -> Option<usize> {
    coeffs.iter().position(|c| !c.is_zero())
}

/// Recompute the residual of H[p, q] = 0 (λ from `sys` or λ_nm of the
/// degrees), reduce the pair, and cross-check the equilibrium gradient of the
/// net charges at float precision. Cylinder certificates are checked against
/// the Laplace form and `sys` is not used.
pub fn certify(cert: &EquilibriumCertificate, sys: &SystemCoefficients<Rational>) -> Result<EquilibriumCertificate> {
    let (p, q) = match (&cert.p, &cert.q) {
        (PairPolynomial::Line(p), PairPolynomial::Line(q)) => (p, q),
        (PairPolynomial::Plane(_), PairPolynomial::Plane(_)) => return certify_plane(cert),
        _ => return Err(Error::Validation("p and q must both be univariate or both bivariate".into())),
    };
    check_degrees(cert, p.degree(), q.degree())?;
    let residual = match (p, q) {
        (Polynomial::Exact(pe), Polynomial::Exact(qe)) => {
            let h = bilinear_h(sys, pe, qe);
            if let Some(index) = first_nonzero(h.coeffs()) {
                return Err(Error::CertificationFailure {
                    index,
                    value: h.coeffs()[index].to_string(),
                });
            }
            Residual::ExactZero
        }
        _ => {
            let (pf, qf) = (p.to_float(), q.to_float());
            let h = bilinear_h(&sys.to_float(), &pf, &qf);
            let scale = (pf.max_abs() * qf.max_abs()).max(1e-300);
            if let Some(index) = h.coeffs().iter().position(|c| c.norm() > FLOAT_RESIDUAL_TOL * scale) {
                return Err(Error::CertificationFailure {
                    index,
                    value: format!("{:e}", h.coeffs()[index].norm() / scale),
                });
            }
            Residual::Float {
                norm: h.max_abs() / scale,
            }
        }
    };
    let reduced = reduce_pair(p, q, 1e-6)?;
    let max_gradient = gradient_check(&reduced.inventory, sys)?;
    Ok(EquilibriumCertificate {
        reduced: Some(reduced),
        residual,
        max_gradient: Some(max_gradient),
        ..cert.clone()
    })
}

fn check_degrees(cert: &EquilibriumCertificate, n: Option<usize>, m: Option<usize>) -> Result<()> {
    let (Some(n), Some(m)) = (n, m) else {
        return Err(Error::DegenerateWronskian);
    };
    if (n, m) != cert.degrees {
        return Err(Error::Validation(format!(
            "certificate records degrees {:?} but p, q have degrees ({n}, {m})",
            cert.degrees
        )));
    }
    Ok(())
}

/// Largest |Gᵢ| relative to the sum of magnitudes of its terms, over sites
/// where P(zᵢ) ≠ 0; fails when it exceeds `GRADIENT_TOL`.
fn gradient_check(inventory: &[ChargeSite], sys: &SystemCoefficients<Rational>) -> Result<f64> {
    if inventory.is_empty() {
        return Ok(0.0);
    }
    let fsys = sys.to_float();
    let cfg = ChargeConfiguration::from_inventory(inventory);
    let g = equilibrium_gradient(&cfg, &fsys)?;
    let z = cfg.positions();
    let c = cfg.net_charges();
    let dp = fsys.p.derivative();
    let mut worst: f64 = 0.0;
    for i in 0..z.len() {
        let pz = fsys.p.eval(&z[i]);
        if pz.norm() < P_ZERO_TOL {
            continue;
        }
        let pull: f64 = (0..z.len())
            .filter(|&j| j != i)
            .map(|j| c[j].abs() / (z[i] - z[j]).norm())
            .sum();
        let scale = 2.0 * pz.norm() * pull + fsys.u.eval(&z[i]).norm() + 0.5 * c[i].abs() * dp.eval(&z[i]).norm();
        let rel = g[i].norm() / scale.max(1e-300);
        if rel > GRADIENT_TOL {
            return Err(Error::CertificationFailure {
                index: i,
                value: format!("gradient {:e} at charge {} site {}", g[i].norm(), c[i], fmt_c(z[i])),
            });
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12}{:+.12}i", z.re, z.im)
}

fn certify_plane(cert: &EquilibriumCertificate) -> Result<EquilibriumCertificate> {
    let (Some(p), Some(q)) = (cert.p.as_plane(), cert.q.as_plane()) else {
        return Err(Error::Validation("cylinder certificates need bivariate p and q".into()));
    };
    check_degrees(cert, Some(p.degree()), Some(q.degree()))?;
    let residual = match (p, q) {
        (PlanePolynomial::Exact(pe), PlanePolynomial::Exact(qe)) => {
            let r = laplace_residual(pe, qe);
            if let Some(index) = first_nonzero(r.coeffs()) {
                return Err(Error::CertificationFailure {
                    index,
                    value: qsqrt3_string(&r.coeffs()[index]),
                });
            }
            Residual::ExactZero
        }
        _ => {
            let r = laplace_residual(&p.to_float(), &q.to_float());
            let scale = (plane_max_abs(p) * plane_max_abs(q)).max(1e-300);
            if let Some(index) = r.coeffs().iter().position(|c| c.norm() > FLOAT_RESIDUAL_TOL * scale) {
                return Err(Error::CertificationFailure {
                    index,
                    value: format!("{:e}", r.coeffs()[index].norm() / scale),
                });
            }
            Residual::Float {
                norm: r.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max) / scale,
            }
        }
    };
    Ok(EquilibriumCertificate {
        residual,
        ..cert.clone()
    })
}

/// Sum of net charges; equals deg p̄ − deg q̄.
pub fn net_charge(inventory: &[ChargeSite]) -> i64 {
    inventory.iter().map(|s| s.charge).sum()
}

/// Ratio p / reference when p is a constant multiple of `reference`.
pub fn proportionality(p: &ExactPoly, reference: &ExactPoly) -> Option<Rational> {
    let (Some(dp), Some(dr)) = (p.degree(), reference.degree()) else {
        return None;
    };
    if dp != dr {
        return None;
    }
    let ratio = p.coeff(dp) / reference.coeff(dr);
    (p == &reference.scale(&ratio)).then_some(ratio)
}

/// Float value of a rational parameter, for reports.
pub fn param_f64(r: &Rational) -> f64 {
    rat_to_f64(r)
}
