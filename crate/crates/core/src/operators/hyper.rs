//! The linear, bilinear and polylinear hypergeometric operators.

use super::SystemCoefficients;
use crate::error::{Error, Result};
use crate::polynomials::Poly;
use crate::scalar::Field;

/// L = P d² + U d − (n/2)U′ − (n(n−1)/6)P″ acting on polynomials of degree ≤ n.
pub fn linear_l<T: Field>(sys: &SystemCoefficients<T>, n: usize, p: &Poly<T>) -> Result<Poly<T>> {
    if let Some(d) = p.degree() {
        if d > n {
            return Err(Error::DegreeViolation { degree: d, limit: n });
        }
    }
    let nn = T::from_i64(n as i64);
    let two = T::from_i64(2);
    let shift = &sys.u.derivative().scale(&nn.div(&two))
        + &sys
            .p
            .nth_derivative(2)
            .scale(&T::from_i64((n * n.saturating_sub(1)) as i64).div(&T::from_i64(6)));
    let d1 = p.derivative();
    let d2 = d1.derivative();
    Ok(&(&(&sys.p * &d2) + &(&sys.u * &d1)) - &(&shift * p))
}

/// λ_nm = (Λm − n)(U′ + (n − Λm)P″/2)
pub fn lambda_nm<T: Field>(n: usize, m: usize, sys: &SystemCoefficients<T>) -> T {
    let capital = sys.capital_lambda().unwrap_or_else(T::one);
    let s = T::from_i64(n as i64).sub(&capital.mul(&T::from_i64(m as i64)));
    polylinear_lambda_from_sum(sys, &s)
}

/// λ = −(U′ + ½P″ S)·S with S = Σ Qᵢnᵢ.
pub fn polylinear_lambda<T: Field>(sys: &SystemCoefficients<T>, degrees: &[usize]) -> T {
    let s = sys
        .charges
        .iter()
        .zip(degrees)
        .fold(T::zero(), |acc, (q, &n)| acc.add(&q.mul(&T::from_i64(n as i64))));
    polylinear_lambda_from_sum(sys, &s)
}

fn polylinear_lambda_from_sum<T: Field>(sys: &SystemCoefficients<T>, s: &T) -> T {
    // U′ and P″ are constants for linear U and quadratic P.
    let du = sys.u.coeff(1);
    let ddp = sys.p.coeff(2).mul(&T::from_i64(2));
    let half = T::one().div(&T::from_i64(2));
    du.add(&half.mul(&ddp).mul(s)).mul(s).neg()
}

/// H[f, g] = (f″g − 2Λf′g′ + Λ²g″f)P + ½(f′g + Λ²g′f)P′ + (f′g − Λg′f)U + λfg.
/// λ defaults to λ_nm of the input degrees when the system does not fix it.
pub fn bilinear_h<T: Field>(sys: &SystemCoefficients<T>, f: &Poly<T>, g: &Poly<T>) -> Poly<T> {
    let lambda = sys.lambda.clone().unwrap_or_else(|| {
        lambda_nm(f.degree().unwrap_or(0), g.degree().unwrap_or(0), sys)
    });
    bilinear_h_with(sys, &lambda, f, g)
}

pub fn bilinear_h_with<T: Field>(sys: &SystemCoefficients<T>, lambda: &T, f: &Poly<T>, g: &Poly<T>) -> Poly<T> {
    let cap = sys.capital_lambda().unwrap_or_else(T::one);
    let cap2 = cap.mul(&cap);
    let (f1, g1) = (f.derivative(), g.derivative());
    let (f2, g2) = (f1.derivative(), g1.derivative());
    let two_cap = cap.mul(&T::from_i64(2));
    let half = T::one().div(&T::from_i64(2));

    let second = &(&(&f2 * g) - &(&f1 * &g1).scale(&two_cap)) + &(&g2 * f).scale(&cap2);
    let first_sym = &(&f1 * g) + &(&g1 * f).scale(&cap2);
    let first_anti = &(&f1 * g) - &(&g1 * f).scale(&cap);
    let dp = sys.p.derivative();
    let mut out = &sys.p * &second;
    out = &out + &(&dp * &first_sym).scale(&half);
    out = &out + &(&sys.u * &first_anti);
    &out + &(f * g).scale(lambda)
}

/// The l-linear operator
/// P(Σ Qᵢ²qᵢ″Π′ + 2Σ_{i<j} QᵢQⱼqᵢ′qⱼ′Π″) + ½P′ΣQᵢ²qᵢ′Π′ + UΣQᵢqᵢ′Π′ + λΠ.
pub fn polylinear_h<T: Field>(sys: &SystemCoefficients<T>, qs: &[Poly<T>]) -> Result<Poly<T>> {
    let l = sys.charges.len();
    if qs.len() != l {
        return Err(Error::ArityMismatch { expected: l, got: qs.len() });
    }
    let lambda = match &sys.lambda {
        Some(lam) => lam.clone(),
        None => {
            let degrees: Vec<usize> = qs.iter().map(|q| q.degree().unwrap_or(0)).collect();
            polylinear_lambda(sys, &degrees)
        }
    };
    let product_except = |skip: &[usize]| -> Poly<T> {
        qs.iter()
            .enumerate()
            .filter(|(k, _)| !skip.contains(k))
            .fold(Poly::one(), |acc, (_, q)| &acc * q)
    };
    let d1: Vec<Poly<T>> = qs.iter().map(|q| q.derivative()).collect();
    let d2: Vec<Poly<T>> = d1.iter().map(|q| q.derivative()).collect();

    let mut p_part = Poly::zero();
    let mut dp_part = Poly::zero();
    let mut u_part = Poly::zero();
    for i in 0..l {
        let qi = &sys.charges[i];
        let qi2 = qi.mul(qi);
        let rest = product_except(&[i]);
        p_part = &p_part + &(&d2[i] * &rest).scale(&qi2);
        dp_part = &dp_part + &(&d1[i] * &rest).scale(&qi2);
        u_part = &u_part + &(&d1[i] * &rest).scale(qi);
        for j in i + 1..l {
            let c = qi.mul(&sys.charges[j]).mul(&T::from_i64(2));
            p_part = &p_part + &(&(&d1[i] * &d1[j]) * &product_except(&[i, j])).scale(&c);
        }
    }
    let half = T::one().div(&T::from_i64(2));
    let mut out = &sys.p * &p_part;
    out = &out + &(&sys.p.derivative() * &dp_part).scale(&half);
    out = &out + &(&sys.u * &u_part);
    Ok(&out + &product_except(&[]).scale(&lambda))
}

/// Eigenvalue λ with (L + λ)p = 0, read from leading coefficients. Returns
/// `None` if p is zero or L maps p to a polynomial of different degree.
pub fn linear_eigenvalue<T: Field>(sys: &SystemCoefficients<T>, n: usize, p: &Poly<T>) -> Result<Option<T>> {
    let lp = linear_l(sys, n, p)?;
    let Some(d) = p.degree() else { return Ok(None) };
    if lp.is_zero() {
        return Ok(Some(T::zero()));
    }
    if lp.degree() != Some(d) {
        return Ok(None);
    }
    Ok(Some(lp.coeff(d).div(&p.coeff(d)).neg()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{classical, ClassicalFamily, ExactPoly};
    use crate::scalar::{rat, rat_int, Rational};
    use proptest::prelude::*;

    fn ep(cs: &[i64]) -> ExactPoly {
        Poly::from_i64s(cs)
    }

    fn hermite_sys() -> SystemCoefficients<Rational> {
        SystemCoefficients::bilinear(&[rat_int(1)], &[rat_int(0), rat_int(-2)], rat_int(1)).unwrap()
    }

    #[test]
    fn linear_on_hermite() {
        // H″ − 2zH′ + 2H for n = 2: the −(n/2)U′ shift adds n·H to −2n·H.
        let sys = SystemCoefficients::linear(&[rat_int(1)], &[rat_int(0), rat_int(-2)], 2).unwrap();
        let h2 = classical(&ClassicalFamily::Hermite, 2);
        let lh = linear_l(&sys, 2, &h2).unwrap();
        assert_eq!(lh, h2.scale(&rat_int(-2)));
        assert_eq!(linear_eigenvalue(&sys, 2, &h2).unwrap(), Some(rat_int(2)));
        assert!(matches!(
            linear_l(&sys, 1, &h2),
            Err(Error::DegreeViolation { degree: 2, limit: 1 })
        ));
        let free = SystemCoefficients::linear(&[rat_int(1)], &[], 0).unwrap();
        assert!(linear_l(&free, 0, &ep(&[1])).unwrap().is_zero());
    }

    #[test]
    fn linear_laguerre_eigenrelation() {
        // P = z, U = bz, Q₁ = L₁^{(−1)}(−bz) = bz
        let b = rat(3, 2);
        let sys = SystemCoefficients::linear(&[rat_int(0), rat_int(1)], &[rat_int(0), b.clone()], 1).unwrap();
        let q1 = classical(&ClassicalFamily::Laguerre { alpha: rat_int(-1) }, 1).compose_linear(&-b.clone(), &rat_int(0));
        assert_eq!(q1, ExactPoly::monomial(b.clone(), 1));
        let lambda = linear_eigenvalue(&sys, 1, &q1).unwrap().unwrap();
        assert!((&linear_l(&sys, 1, &q1).unwrap() + &q1.scale(&lambda)).is_zero());
    }

    #[test]
    fn lambda_examples() {
        let a = rat(5, 7);
        let b = rat(-3, 4);
        let sys = SystemCoefficients::bilinear(&[rat_int(1)], &[a, b.clone()], rat_int(1)).unwrap();
        assert_eq!(lambda_nm(1, 0, &sys), -b);
        assert_eq!(lambda_nm(2, 0, &hermite_sys()), rat_int(4));
        let quad = SystemCoefficients::bilinear(&[rat_int(2), rat_int(-1), rat(3, 5)], &[rat_int(1), rat_int(7)], rat_int(1)).unwrap();
        for n in 0..6 {
            assert_eq!(lambda_nm(n, n, &quad), rat_int(0));
        }
    }

    #[test]
    fn bilinear_examples() {
        // g = 1 reduces to the Gauss-type operator.
        let sys = SystemCoefficients::bilinear(&[rat_int(1), rat_int(2), rat_int(-1)], &[rat_int(3), rat_int(1)], rat(3, 2))
            .unwrap()
            .with_lambda(rat(1, 3));
        let f = ep(&[1, -2, 0, 5]);
        let gauss = &(&(&sys.p * &f.nth_derivative(2)) + &(&(&sys.u + &sys.p.derivative().scale(&rat(1, 2))) * &f.derivative()))
            + &f.scale(&rat(1, 3));
        assert_eq!(bilinear_h(&sys, &f, &ep(&[1])), gauss);

        // Adler–Moser θ₂ = z³ + τ, θ₁ = z with P = 1, U = 0, λ = 0.
        let free = SystemCoefficients::bilinear(&[rat_int(1)], &[], rat_int(1)).unwrap().with_lambda(rat_int(0));
        for tau in [-3, 0, 7] {
            assert!(bilinear_h(&free, &ep(&[tau, 0, 0, 1]), &ep(&[0, 1])).is_zero());
        }

        let h2 = classical(&ClassicalFamily::Hermite, 2);
        assert!(bilinear_h(&hermite_sys(), &h2, &ep(&[1])).is_zero());
    }

    #[test]
    fn polylinear_examples() {
        let free = SystemCoefficients::polylinear(&[rat_int(1)], &[], vec![rat_int(1), rat_int(-1)])
            .unwrap()
            .with_lambda(rat_int(0));
        assert!(polylinear_h(&free, &[ep(&[5, 0, 0, 1]), ep(&[0, 1])]).unwrap().is_zero());

        // l = 1: f″P + ½P′f′ + Uf′ + λf
        let single = SystemCoefficients::polylinear(&[rat_int(1), rat_int(1)], &[rat_int(2), rat_int(-1)], vec![rat_int(1)])
            .unwrap()
            .with_lambda(rat_int(3));
        let f = ep(&[1, 1, 1, 1]);
        let expected = &(&(&(&single.p * &f.nth_derivative(2)) + &f.derivative().scale(&rat(1, 2)))
            + &(&single.u * &f.derivative()))
            + &f.scale(&rat_int(3));
        assert_eq!(polylinear_h(&single, &[f]).unwrap(), expected);

        let three = SystemCoefficients::polylinear(&[rat_int(1)], &[rat_int(0), rat_int(1)], vec![rat_int(1), rat_int(2), rat_int(-1)])
            .unwrap()
            .with_lambda(rat(7, 3));
        assert_eq!(polylinear_h(&three, &[ep(&[1]), ep(&[1]), ep(&[1])]).unwrap(), ExactPoly::constant(rat(7, 3)));
        assert!(matches!(
            polylinear_h(&three, &[ep(&[1])]),
            Err(Error::ArityMismatch { expected: 3, got: 1 })
        ));
    }

    fn small_poly() -> impl Strategy<Value = ExactPoly> {
        prop::collection::vec((-9i64..10, 1i64..4), 0..7)
            .prop_map(|cs| Poly::new(cs.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    fn system_strategy() -> impl Strategy<Value = SystemCoefficients<Rational>> {
        (prop::collection::vec(-5i64..6, 3), prop::collection::vec(-5i64..6, 2), 1i64..5, 1i64..4).prop_map(
            |(p, u, ln, ld)| {
                let p: Vec<Rational> = p.into_iter().map(rat_int).collect();
                let u: Vec<Rational> = u.into_iter().map(rat_int).collect();
                SystemCoefficients::bilinear(&p, &u, rat(ln, ld)).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn symmetric_without_drift(f in small_poly(), g in small_poly(), p in prop::collection::vec(-5i64..6, 3), lam in -5i64..6) {
            let p: Vec<Rational> = p.into_iter().map(rat_int).collect();
            let sys = SystemCoefficients::bilinear(&p, &[], rat_int(1)).unwrap().with_lambda(rat_int(lam));
            prop_assert_eq!(bilinear_h(&sys, &f, &g), bilinear_h(&sys, &g, &f));
        }

        #[test]
        fn polylinear_matches_bilinear(sys in system_strategy(), f in small_poly(), g in small_poly(), lam in -5i64..6) {
            let sys = sys.with_lambda(rat_int(lam));
            let poly = sys.as_polylinear().unwrap();
            prop_assert_eq!(polylinear_h(&poly, &[f.clone(), g.clone()]).unwrap(), bilinear_h(&sys, &f, &g));
        }

        #[test]
        fn lambda_formulas_agree(sys in system_strategy(), n in 0usize..12, m in 0usize..12) {
            prop_assert_eq!(lambda_nm(n, m, &sys), polylinear_lambda(&sys.as_polylinear().unwrap(), &[n, m]));
        }
    }
}
