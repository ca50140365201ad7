use num_bigint::BigInt;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactPoly, FloatPoly, Poly};
use crate::scalar::Rational;

/// A polynomial tagged with its arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum Polynomial {
    Exact(ExactPoly),
    Float(FloatPoly),
}

impl Polynomial {
    pub fn is_exact(&self) -> bool {
        matches!(self, Polynomial::Exact(_))
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Polynomial::Exact(p) => p.degree(),
            Polynomial::Float(p) => p.degree(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn to_float(&self) -> FloatPoly {
        match self {
            Polynomial::Exact(p) => p.to_float(),
            Polynomial::Float(p) => p.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&ExactPoly> {
        match self {
            Polynomial::Exact(p) => Some(p),
            Polynomial::Float(_) => None,
        }
    }
}

impl From<ExactPoly> for Polynomial {
    fn from(p: ExactPoly) -> Self {
        Polynomial::Exact(p)
    }
}

impl From<FloatPoly> for Polynomial {
    fn from(p: FloatPoly) -> Self {
        Polynomial::Float(p)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Pair {
    Exact(String, String),
    Float(f64, f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    exact: bool,
    coeffs: Vec<Pair>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire = match self {
            Polynomial::Exact(p) => Wire {
                exact: true,
                coeffs: p
                    .coeffs()
                    .iter()
                    .map(|c| Pair::Exact(c.numer().to_string(), c.denom().to_string()))
                    .collect(),
            },
            Polynomial::Float(p) => Wire {
                exact: false,
                coeffs: p.coeffs().iter().map(|c| Pair::Float(c.re, c.im)).collect(),
            },
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = Wire::deserialize(d)?;
        if wire.exact {
            let coeffs = wire
                .coeffs
                .into_iter()
                .map(|pair| match pair {
                    Pair::Exact(n, d) => {
                        let n: BigInt = n.parse().map_err(D::Error::custom)?;
                        let d: BigInt = d.parse().map_err(D::Error::custom)?;
                        if d == BigInt::from(0) {
                            return Err(D::Error::custom("zero denominator"));
                        }
                        Ok(Rational::new(n, d))
                    }
                    Pair::Float(..) => Err(D::Error::custom(
                        "exact polynomial needs [numerator, denominator] strings",
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Polynomial::Exact(Poly::new(coeffs)))
        } else {
            let coeffs = wire
                .coeffs
                .into_iter()
                .map(|pair| match pair {
                    Pair::Float(re, im) => Ok(Complex64::new(re, im)),
                    Pair::Exact(..) => Err(D::Error::custom("float polynomial needs [re, im] numbers")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Polynomial::Float(Poly::new(coeffs)))
        }
    }
}
