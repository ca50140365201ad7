//! Classical orthogonal families in exact rational arithmetic.

use num_traits::{One, Zero};

use super::{ExactPoly, Poly};
use crate::scalar::{binomial, factorial, rat_int, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalFamily {
    /// Physicists' convention, leading coefficient 2ⁿ.
    Hermite,
    /// L_n^{(α)}(z).
    Laguerre { alpha: Rational },
    /// P_n^{(α,β)}(z).
    Jacobi { alpha: Rational, beta: Rational },
    Monomial,
    /// zⁿ L_n^{(b−2n+1)}(−a/z): eigenfunctions for P = −z², U = a + bz.
    Bessel { a: Rational, b: Rational },
}

pub fn classical(family: &ClassicalFamily, n: usize) -> ExactPoly {
    match family {
        ClassicalFamily::Hermite => hermite(n),
        ClassicalFamily::Laguerre { alpha } => laguerre(alpha, n),
        ClassicalFamily::Jacobi { alpha, beta } => jacobi(alpha, beta, n),
        ClassicalFamily::Monomial => Poly::monomial(Rational::one(), n),
        ClassicalFamily::Bessel { a, b } => bessel_type(a, b, n),
    }
}

/// Hₙ(z) = n! Σ_m (−1)^m (2z)^{n−2m} / (m!(n−2m)!)
fn hermite(n: usize) -> ExactPoly {
    let nf = Rational::from_integer(factorial(n));
    let mut coeffs = vec![Rational::zero(); n + 1];
    for m in 0..=n / 2 {
        let k = n - 2 * m;
        let denom = Rational::from_integer(factorial(m) * factorial(k));
        let sign = if m % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        let two_k = Rational::from_integer(num_bigint::BigInt::from(2).pow(k as u32));
        coeffs[k] = &nf * sign * two_k / denom;
    }
    Poly::new(coeffs)
}

/// L_n^{(α)}(z) = Σ_i (−1)^i C(n+α, n−i) z^i / i!
fn laguerre(alpha: &Rational, n: usize) -> ExactPoly {
    let top = alpha + rat_int(n as i64);
    Poly::new(
        (0..=n)
            .map(|i| {
                let sign = if i % 2 == 0 { rat_int(1) } else { rat_int(-1) };
                sign * binomial(&top, n - i) / Rational::from_integer(factorial(i))
            })
            .collect(),
    )
}

/// P_n^{(α,β)}(z) = Σ_s C(n+α, n−s) C(n+β, s) ((z−1)/2)^s ((z+1)/2)^{n−s}
fn jacobi(alpha: &Rational, beta: &Rational, n: usize) -> ExactPoly {
    let half = Rational::new(1.into(), 2.into());
    let zm = Poly::new(vec![-half.clone(), half.clone()]);
    let zp = Poly::new(vec![half.clone(), half]);
    let na = alpha + rat_int(n as i64);
    let nb = beta + rat_int(n as i64);
    (0..=n).fold(Poly::zero(), |acc, s| {
        let c = binomial(&na, n - s) * binomial(&nb, s);
        let term = (&zm.pow(s) * &zp.pow(n - s)).scale(&c);
        &acc + &term
    })
}

fn bessel_type(a: &Rational, b: &Rational, n: usize) -> ExactPoly {
    // zⁿ L_n^{(α)}(−a/z) = Σ_i (−1)^i C(n+α, n−i) (−a)^i z^{n−i} / i!
    let alpha = b - rat_int(2 * n as i64 - 1);
    let top = &alpha + rat_int(n as i64);
    let mut coeffs = vec![Rational::zero(); n + 1];
    let mut minus_a_pow = Rational::one();
    for i in 0..=n {
        let sign = if i % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        coeffs[n - i] =
            sign * binomial(&top, n - i) * &minus_a_pow / Rational::from_integer(factorial(i));
        minus_a_pow = minus_a_pow * (-a);
    }
    Poly::new(coeffs)
}

/// c^{−n} Hₙ(c(z + a/b)) with c² = −b/2, which has rational coefficients for
/// any rational b ≠ 0. These are the polynomial eigenfunctions of
/// f″ + (a + bz) f′ (the P = 1 row).
pub fn hermite_scaled(a: &Rational, b: &Rational, n: usize) -> ExactPoly {
    assert!(!b.is_zero(), "Hermite class needs b != 0");
    let c2 = -b / rat_int(2);
    let h = hermite(n);
    // Coefficient k survives only for k ≡ n (mod 2); c^{k−n} = (c²)^{−(n−k)/2}.
    let scaled = Poly::new(
        h.coeffs()
            .iter()
            .enumerate()
            .map(|(k, hk)| {
                if hk.is_zero() {
                    Rational::zero()
                } else {
                    let steps = ((n - k) / 2) as i32;
                    hk / num_traits::pow::Pow::pow(&c2, steps as u32)
                }
            })
            .collect(),
    );
    scaled.compose_linear(&Rational::one(), &(a / b))
}
