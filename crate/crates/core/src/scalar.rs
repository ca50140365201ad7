//! Coefficient fields.
//!
//! Exact and floating-point values never mix implicitly: every conversion
//! goes through [`Field::from_rational`] or [`Field::to_c64`].

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Commutative ring operations by reference.
pub trait Ring: Clone + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

pub trait Field: Ring + PartialEq {
    fn div(&self, other: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_c64(&self) -> Complex64;
    /// True for exact arithmetic (rationals and their extensions).
    fn is_exact() -> bool;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }
}

/// Fields containing the imaginary unit.
pub trait ComplexField: Field {
    fn i() -> Self;
    fn conj(&self) -> Self;
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    // Scale down huge numerators/denominators before dividing.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Exact binary value of a finite double.
pub fn rat_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
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

impl Field for Rational {
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
    fn is_exact() -> bool {
        true
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
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

impl Field for Complex64 {
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rat_to_f64(r), 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
}

impl ComplexField for Complex64 {
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

/// a + b·√3 with rational a, b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSqrt3 {
    pub a: Rational,
    pub b: Rational,
}

impl QSqrt3 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt3 { a, b }
    }

    pub fn sqrt3() -> Self {
        QSqrt3::new(Zero::zero(), One::one())
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * 3f64.sqrt()
    }
}

impl Ring for QSqrt3 {
    fn zero() -> Self {
        QSqrt3::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        QSqrt3::new(One::one(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn add(&self, o: &Self) -> Self {
        QSqrt3::new(&self.a + &o.a, &self.b + &o.b)
    }
    fn sub(&self, o: &Self) -> Self {
        QSqrt3::new(&self.a - &o.a, &self.b - &o.b)
    }
    fn mul(&self, o: &Self) -> Self {
        let three = rat_int(3);
        QSqrt3::new(
            &self.a * &o.a + three * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
    fn neg(&self) -> Self {
        QSqrt3::new(-&self.a, -&self.b)
    }
}

impl Field for QSqrt3 {
    fn div(&self, o: &Self) -> Self {
        // (a + b√3)^{-1} = (a − b√3) / (a² − 3b²); the norm is nonzero for nonzero input.
        let norm = &o.a * &o.a - rat_int(3) * &o.b * &o.b;
        let inv = QSqrt3::new(&o.a / &norm, -(&o.b / &norm));
        self.mul(&inv)
    }
    fn from_rational(r: &Rational) -> Self {
        QSqrt3::new(r.clone(), Zero::zero())
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Complex numbers over an exact real field (e.g. Gaussian rationals).
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: Field> Cx<T> {
    pub fn new(re: T, im: T) -> Self {
        Cx { re, im }
    }

    pub fn real(re: T) -> Self {
        Cx { re, im: T::zero() }
    }
}

impl<T: Field> Ring for Cx<T> {
    fn zero() -> Self {
        Cx::new(T::zero(), T::zero())
    }
    fn one() -> Self {
        Cx::new(T::one(), T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        Cx::new(self.re.add(&o.re), self.im.add(&o.im))
    }
    fn sub(&self, o: &Self) -> Self {
        Cx::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }
    fn mul(&self, o: &Self) -> Self {
        Cx::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }
    fn neg(&self) -> Self {
        Cx::new(self.re.neg(), self.im.neg())
    }
}

impl<T: Field> Field for Cx<T> {
    fn div(&self, o: &Self) -> Self {
        let norm = o.re.mul(&o.re).add(&o.im.mul(&o.im));
        let num = self.mul(&o.conj());
        Cx::new(num.re.div(&norm), num.im.div(&norm))
    }
    fn from_rational(r: &Rational) -> Self {
        Cx::real(T::from_rational(r))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_c64().re, self.im.to_c64().re)
    }
    fn is_exact() -> bool {
        T::is_exact()
    }
}

impl<T: Field> ComplexField for Cx<T> {
    fn i() -> Self {
        Cx::new(T::zero(), T::one())
    }
    fn conj(&self) -> Self {
        Cx::new(self.re.clone(), self.im.neg())
    }
}

/// Generalized binomial coefficient C(r, k) for rational r.
pub fn binomial(r: &Rational, k: usize) -> Rational {
    let mut acc = <Rational as One>::one();
    for j in 0..k {
        acc = acc * (r - rat_int(j as i64)) / rat_int(j as i64 + 1);
    }
    acc
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k as u64).fold(<BigInt as One>::one(), |acc, j| acc * BigInt::from(j))
}

/// Magnitude used for normalizing exact residuals.
pub fn rat_abs_f64(r: &Rational) -> f64 {
    rat_to_f64(&r.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_normalized() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn qsqrt3_inverse() {
        let x = QSqrt3::new(rat(1, 2), rat(3, 5));
        let y = QSqrt3::one().div(&x);
        assert_eq!(x.mul(&y), QSqrt3::one());
        let s = QSqrt3::sqrt3();
        assert_eq!(s.mul(&s), QSqrt3::from_i64(3));
    }

    #[test]
    fn gaussian_division() {
        let a: Cx<Rational> = Cx::new(rat(1, 1), rat(2, 1));
        let b: Cx<Rational> = Cx::new(rat(3, 1), rat(-1, 1));
        assert_eq!(a.div(&b).mul(&b), a);
        assert_eq!(Cx::<Rational>::i().mul(&Cx::i()), Cx::from_i64(-1));
    }

    #[test]
    fn generalized_binomial() {
        assert_eq!(binomial(&rat(5, 1), 2), rat(10, 1));
        // C(-1/2, 2) = (-1/2)(-3/2)/2 = 3/8
        assert_eq!(binomial(&rat(-1, 2), 2), rat(3, 8));
    }

    #[test]
    fn huge_rational_to_float() {
        let big = Rational::from_integer(BigInt::from(10).pow(400));
        let r = (&big + rat_int(1)) / (&big * rat_int(4));
        assert!((rat_to_f64(&r) - 0.25).abs() < 1e-15);
    }
}
