//! Dense univariate polynomials over exact and floating-point fields.

mod classical;
mod json;
mod reduce;
mod roots;
mod wronskian;

pub use classical::{classical, hermite_scaled, ClassicalFamily};
pub use json::Polynomial;
pub use reduce::{reduce_pair, reduce_pair_exact, squarefree_decomposition, ChargeSite, ReducedPair};
pub use roots::{find_roots, from_roots, from_roots_exact, RootList, DEFAULT_ROOT_TOL, MAX_ROOT_ITERATIONS};
pub use wronskian::{determinant_expansion, wronskian, wronskian_exact};

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::scalar::{Field, Rational, Ring};

/// Coefficients c₀ … c_d; the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type ExactPoly = Poly<Rational>;
pub type FloatPoly = Poly<Complex64>;

impl<T: Field> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// c·z^k
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// The identity polynomial z.
    pub fn z() -> Self {
        Poly::monomial(T::one(), 1)
    }

    /// z − r
    pub fn linear_factor(root: T) -> Self {
        Poly::new(vec![root.neg(), T::one()])
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| T::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc.mul(z).add(c))
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul(&T::from_i64(k as i64)))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut coeffs = vec![T::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.div(&T::from_i64(k as i64 + 1))),
        );
        Poly::new(coeffs)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiplication by z^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// p(a·z + b)
    pub fn compose_linear(&self, a: &T, b: &T) -> Self {
        let inner = Poly::new(vec![b.clone(), a.clone()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &inner) + &Poly::constant(c.clone()))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(lead) => {
                let inv = T::one().div(lead);
                self.scale(&inv)
            }
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].div(&lead);
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].sub(&c.mul(d));
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor (Euclid). Meaningful for exact fields only.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_float(&self) -> FloatPoly {
        self.map(|c| c.to_c64())
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }
}

impl FloatPoly {
    /// Horner evaluation of the majorant Σ|c_k| r^k, used for rounding-error bounds.
    pub fn eval_abs(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }
}

impl ExactPoly {
    pub fn from_rationals(cs: Vec<Rational>) -> Self {
        Poly::new(cs)
    }
}

impl<'a, T: Field> Add<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &'a Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeff(k).add(&rhs.coeff(k)))
                .collect(),
        )
    }
}

impl<'a, T: Field> Sub<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &'a Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeff(k).sub(&rhs.coeff(k)))
                .collect(),
        )
    }
}

impl<'a, T: Field> Mul<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &'a Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }
}

impl<'a, T: Field> Neg for &'a Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }
}

impl<T: Field> Ring for Poly<T> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Complex evaluation of either representation; exact coefficients are
/// converted explicitly first.
pub fn eval(p: &Polynomial, z: Complex64) -> Complex64 {
    match p {
        Polynomial::Exact(e) => e.to_float().eval(&z),
        Polynomial::Float(f) => f.eval(&z),
    }
}

pub fn derivative(p: &Polynomial) -> Polynomial {
    match p {
        Polynomial::Exact(e) => Polynomial::Exact(e.derivative()),
        Polynomial::Float(f) => Polynomial::Float(f.derivative()),
    }
}
