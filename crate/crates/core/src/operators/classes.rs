//! The four generic classes of polynomial eigenfunctions of P d² + U d with
//! U = a + bz.

use super::SystemCoefficients;
use crate::error::Result;
use crate::polynomials::{classical, hermite_scaled, ClassicalFamily, ExactPoly};
use crate::scalar::{rat_int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorClass {
    /// P = 1: scaled Hermite.
    Hermite,
    /// P = z: L_n^{(a−1)}(−bz).
    Laguerre,
    /// P = −z²: zⁿ L_n^{(b−2n+1)}(−a/z).
    BesselType,
    /// P = 1 − z²: Jacobi with α = −(a+b+2)/2, β = (a−b−2)/2.
    Jacobi,
}

impl OperatorClass {
    pub const ALL: [OperatorClass; 4] = [
        OperatorClass::Hermite,
        OperatorClass::Laguerre,
        OperatorClass::BesselType,
        OperatorClass::Jacobi,
    ];

    pub fn p(self) -> Vec<Rational> {
        match self {
            OperatorClass::Hermite => vec![rat_int(1)],
            OperatorClass::Laguerre => vec![rat_int(0), rat_int(1)],
            OperatorClass::BesselType => vec![rat_int(0), rat_int(0), rat_int(-1)],
            OperatorClass::Jacobi => vec![rat_int(1), rat_int(0), rat_int(-1)],
        }
    }

    /// Linear-mode system of dimension n with U = a + bz.
    pub fn system(self, a: &Rational, b: &Rational, n: usize) -> Result<SystemCoefficients<Rational>> {
        SystemCoefficients::linear(&self.p(), &[a.clone(), b.clone()], n)
    }

    /// Degree-n eigenpolynomial.
    pub fn eigenpolynomial(self, a: &Rational, b: &Rational, n: usize) -> ExactPoly {
        let two = rat_int(2);
        match self {
            OperatorClass::Hermite => hermite_scaled(a, b, n),
            OperatorClass::Laguerre => {
                classical(&ClassicalFamily::Laguerre { alpha: a - rat_int(1) }, n).compose_linear(&-b.clone(), &rat_int(0))
            }
            OperatorClass::BesselType => classical(
                &ClassicalFamily::Bessel {
                    a: a.clone(),
                    b: b.clone(),
                },
                n,
            ),
            OperatorClass::Jacobi => classical(
                &ClassicalFamily::Jacobi {
                    alpha: -(a + b + &two) / &two,
                    beta: (a - b - &two) / &two,
                },
                n,
            ),
        }
    }
}
