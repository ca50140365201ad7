use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomials::{ChargeSite, Poly};
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Single species; P up to quartic, U up to cubic, `n` is the operator dimension.
    Linear { n: usize },
    /// Two species with charges {+1, −Λ}.
    Bilinear,
    Polylinear,
}

/// P, U, the species charges and the spectral constant λ.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemCoefficients<T> {
    pub p: Poly<T>,
    pub u: Poly<T>,
    pub charges: Vec<T>,
    pub mode: Mode,
    pub omega: f64,
    pub lambda: Option<T>,
}

fn check_degree<T: Field>(poly: &Poly<T>, limit: usize) -> Result<()> {
    match poly.degree() {
        Some(d) if d > limit => Err(Error::DegreeViolation { degree: d, limit }),
        _ => Ok(()),
    }
}

impl<T: Field> SystemCoefficients<T> {
    /// Linear mode. `p` = [A, B, C, D, E], `u` = [a, b, c] or [a, b, c, d] with
    /// d forced to −2(n−1)E.
    pub fn linear(p: &[T], u: &[T], n: usize) -> Result<Self> {
        let p = Poly::new(p.to_vec());
        check_degree(&p, 4)?;
        let u_given = Poly::new(u.to_vec());
        check_degree(&u_given, 3)?;
        let forced = p.coeff(4).mul(&T::from_i64(-2 * (n as i64 - 1)));
        let given = u_given.coeff(3);
        if u_given.degree() == Some(3) && given != forced {
            return Err(Error::Validation(format!(
                "cubic coefficient of U must equal -2(n-1)E = {:?}, got {:?}",
                forced, given
            )));
        }
        let mut uc: Vec<T> = (0..3).map(|k| u_given.coeff(k)).collect();
        uc.push(forced);
        Ok(SystemCoefficients {
            p,
            u: Poly::new(uc),
            charges: vec![T::one()],
            mode: Mode::Linear { n },
            omega: 0.0,
            lambda: None,
        })
    }

    /// Bilinear mode with quadratic P, linear U and charges {+1, −Λ}.
    pub fn bilinear(p: &[T], u: &[T], capital_lambda: T) -> Result<Self> {
        let p = Poly::new(p.to_vec());
        let u = Poly::new(u.to_vec());
        check_degree(&p, 2)?;
        check_degree(&u, 1)?;
        Ok(SystemCoefficients {
            p,
            u,
            charges: vec![T::one(), capital_lambda.neg()],
            mode: Mode::Bilinear,
            omega: 0.0,
            lambda: None,
        })
    }

    pub fn polylinear(p: &[T], u: &[T], charges: Vec<T>) -> Result<Self> {
        let p = Poly::new(p.to_vec());
        let u = Poly::new(u.to_vec());
        check_degree(&p, 2)?;
        check_degree(&u, 1)?;
        if charges.is_empty() {
            return Err(Error::Validation("at least one species charge is required".into()));
        }
        for i in 0..charges.len() {
            for j in i + 1..charges.len() {
                if charges[i] == charges[j] {
                    return Err(Error::Validation(format!(
                        "species charges must be distinct (species {i} and {j})"
                    )));
                }
            }
        }
        Ok(SystemCoefficients {
            p,
            u,
            charges,
            mode: Mode::Polylinear,
            omega: 0.0,
            lambda: None,
        })
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// Λ for a bilinear system.
    pub fn capital_lambda(&self) -> Option<T> {
        match self.mode {
            Mode::Bilinear => Some(self.charges[1].neg()),
            _ => None,
        }
    }

    /// Same system as a polylinear one (the bilinear case is l = 2, Q = {1, −Λ}).
    pub fn as_polylinear(&self) -> Result<Self> {
        let mut out = SystemCoefficients::polylinear(self.p.coeffs(), self.u.coeffs(), self.charges.clone())?;
        out.omega = self.omega;
        out.lambda = self.lambda.clone();
        Ok(out)
    }

    pub fn to_float(&self) -> SystemCoefficients<Complex64> {
        SystemCoefficients {
            p: self.p.to_float(),
            u: self.u.to_float(),
            charges: self.charges.iter().map(|c| c.to_c64()).collect(),
            mode: self.mode,
            omega: self.omega,
            lambda: self.lambda.as_ref().map(|l| l.to_c64()),
        }
    }
}

impl SystemCoefficients<Complex64> {
    /// P = i, U = iωz with charges {+1, −Λ}.
    pub fn rational_omega(omega: f64, capital_lambda: f64) -> Self {
        let i = Complex64::new(0.0, 1.0);
        SystemCoefficients::bilinear(
            &[i],
            &[Complex64::new(0.0, 0.0), i * omega],
            Complex64::new(capital_lambda, 0.0),
        )
        .expect("constant P and linear U")
        .with_omega(omega)
    }

    /// Real charges (imaginary parts dropped).
    pub fn real_charges(&self) -> Vec<f64> {
        self.charges.iter().map(|c| c.re).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub charge: f64,
    pub positions: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u32>>,
}

impl Species {
    pub fn new(charge: f64, positions: Vec<Complex64>) -> Self {
        Species {
            charge,
            positions,
            multiplicities: None,
        }
    }

    fn multiplicity(&self, k: usize) -> f64 {
        self.multiplicities.as_ref().map_or(1.0, |m| m[k] as f64)
    }
}

/// Positions grouped by species, at a time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeConfiguration {
    pub species: Vec<Species>,
    #[serde(default)]
    pub time: f64,
}

impl ChargeConfiguration {
    pub fn new(species: Vec<Species>) -> Self {
        ChargeConfiguration { species, time: 0.0 }
    }

    /// Two species with charges +1 and −Λ.
    pub fn bilinear(x: Vec<Complex64>, y: Vec<Complex64>, capital_lambda: f64) -> Self {
        ChargeConfiguration::new(vec![Species::new(1.0, x), Species::new(-capital_lambda, y)])
    }

    /// Net-charge sites as a configuration: one species per distinct charge,
    /// unit species charge sign, multiplicity |charge|.
    pub fn from_inventory(sites: &[ChargeSite]) -> Self {
        let mut species: Vec<Species> = Vec::new();
        for s in sites {
            let charge = s.charge.signum() as f64;
            let mult = s.charge.unsigned_abs() as u32;
            let sp = match species.iter_mut().find(|sp| sp.charge == charge) {
                Some(sp) => sp,
                None => {
                    species.push(Species {
                        charge,
                        positions: Vec::new(),
                        multiplicities: Some(Vec::new()),
                    });
                    species.last_mut().unwrap()
                }
            };
            sp.positions.push(s.position);
            sp.multiplicities.get_or_insert_with(Vec::new).push(mult);
        }
        ChargeConfiguration::new(species)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.species.iter().map(|s| s.positions.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.species.iter().map(|s| s.positions.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All positions, species-major.
    pub fn positions(&self) -> Vec<Complex64> {
        self.species.iter().flat_map(|s| s.positions.iter().copied()).collect()
    }

    /// Per-particle net charge: species charge times multiplicity.
    pub fn net_charges(&self) -> Vec<f64> {
        self.species
            .iter()
            .flat_map(|s| (0..s.positions.len()).map(move |k| s.charge * s.multiplicity(k)))
            .collect()
    }

    /// Replace positions (species-major order) keeping the species layout.
    pub fn with_positions(&self, z: &[Complex64], time: f64) -> Self {
        let mut out = self.clone();
        let mut k = 0;
        for s in &mut out.species {
            for p in &mut s.positions {
                *p = z[k];
                k += 1;
            }
        }
        out.time = time;
        out
    }

    /// Largest |z|, floored at 1.
    pub fn scale(&self) -> f64 {
        self.positions().iter().map(|z| z.norm()).fold(1.0, f64::max)
    }

    /// Smallest pairwise distance with the offending pair (flat indices).
    pub fn min_separation(&self) -> Option<(f64, usize, usize)> {
        min_pair_distance(&self.positions())
    }

    pub fn check_distinct(&self) -> Result<()> {
        match self.min_separation() {
            Some((d, i, j)) if d == 0.0 || !d.is_finite() => Err(Error::CoincidentPositions { i, j, separation: d }),
            _ => Ok(()),
        }
    }
}

pub(crate) fn min_pair_distance(z: &[Complex64]) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = (z[i] - z[j]).norm();
            if best.map_or(true, |b| d < b.0) {
                best = Some((d, i, j));
            }
        }
    }
    best
}
