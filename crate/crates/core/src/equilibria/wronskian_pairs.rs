//! Wronskian constructions of polynomial pairs on the line.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polynomials::{classical, hermite_scaled, wronskian_exact, ClassicalFamily, ExactPoly, Poly};
use crate::scalar::{rat, Rational};

pub(crate) fn check_indices(indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::Validation("index set must be nonempty".into()));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation(format!("indices must be strictly increasing, got {indices:?}")));
    }
    Ok(())
}

fn check_b(b: &Rational) -> Result<()> {
    if b.is_zero() {
        return Err(Error::Validation("b must be nonzero".into()));
    }
    Ok(())
}

/// (W[Q_I], W[Q_{I without its last index}])
fn wronskian_pair(qs: &[ExactPoly]) -> Result<(ExactPoly, ExactPoly)> {
    let p = wronskian_exact(qs);
    let q = wronskian_exact(&qs[..qs.len() - 1]);
    if p.is_zero() || q.is_zero() {
        return Err(Error::DegenerateWronskian);
    }
    Ok((p, q))
}

/// z-power of P^e for P = c·z^d; the constant c^e is dropped.
fn prefactor_power(d: usize, e: &Rational) -> Result<usize> {
    let power = e * Rational::from_integer((d as i64).into());
    if !power.is_integer() {
        return Err(Error::NonIntegerPower(format!("z^({power})")));
    }
    Ok(power.to_integer().try_into().map_err(|_| Error::NonIntegerPower(power.to_string()))?)
}

fn triangular(k: usize) -> usize {
    k * (k + 1) / 2
}

/// P = 1, U = bz with Hermite-class eigenfunctions.
pub(crate) fn hermite_polys(indices: &[usize], b: &Rational) -> Result<(ExactPoly, ExactPoly)> {
    check_indices(indices)?;
    check_b(b)?;
    let qs: Vec<ExactPoly> = indices.iter().map(|&i| hermite_scaled(&Rational::zero(), b, i)).collect();
    wronskian_pair(&qs)
}

pub(crate) fn hermite_degrees(indices: &[usize]) -> (usize, usize) {
    let k = indices.len() - 1;
    let total: usize = indices.iter().sum();
    let first: usize = indices[..k].iter().sum();
    (total - triangular(k), first - triangular(k.saturating_sub(1)))
}

/// P = z, U = bz with Qᵢ = Lᵢ^{(−1/2)}(−bz) and z-prefactors k(k±1)/4.
pub(crate) fn laguerre_polys(indices: &[usize], b: &Rational) -> Result<(ExactPoly, ExactPoly)> {
    check_indices(indices)?;
    check_b(b)?;
    let k = indices.len() - 1;
    if k % 4 != 0 {
        return Err(Error::BadK(k));
    }
    let family = ClassicalFamily::Laguerre { alpha: rat(-1, 2) };
    let qs: Vec<ExactPoly> = indices
        .iter()
        .map(|&i| classical(&family, i).compose_linear(&-b, &Rational::zero()))
        .collect();
    let (p, q) = wronskian_pair(&qs)?;
    let ep = prefactor_power(1, &rat((k * (k + 1)) as i64, 4))?;
    let eq = prefactor_power(1, &rat((k * k.saturating_sub(1)) as i64, 4))?;
    Ok((p.shift(ep), q.shift(eq)))
}

pub(crate) fn laguerre_degrees(indices: &[usize]) -> (usize, usize) {
    let k = indices.len() - 1;
    let (n, m) = hermite_degrees(indices);
    (n + k * (k + 1) / 4, m + k * k.saturating_sub(1) / 4)
}

/// P = −z², U = bz with eigenfunctions zⁱ and P-power prefactors k(k±1)/4.
pub(crate) fn monomial_polys(indices: &[usize], b: &Rational) -> Result<(ExactPoly, ExactPoly)> {
    check_indices(indices)?;
    check_b(b)?;
    let k = indices.len() - 1;
    let family = ClassicalFamily::Monomial;
    let qs: Vec<ExactPoly> = indices.iter().map(|&i| classical(&family, i)).collect();
    let (p, q) = wronskian_pair(&qs)?;
    let ep = prefactor_power(2, &rat((k * (k + 1)) as i64, 4))?;
    let eq = prefactor_power(2, &rat((k * k.saturating_sub(1)) as i64, 4))?;
    Ok((p.shift(ep), q.shift(eq)))
}

pub(crate) fn monomial_degrees(indices: &[usize]) -> (usize, usize) {
    let k = indices.len() - 1;
    (indices.iter().sum(), indices[..k].iter().sum())
}

/// ψ₀ = 1, ψ₁ = z + t₁, ψⱼ = ∬ψⱼ₋₁ + tⱼ (the z-coefficient of each double
/// integral set to 0). Missing tⱼ are 0.
pub fn adler_moser_chain(len: usize, ts: &[Rational]) -> Vec<ExactPoly> {
    let t = |j: usize| ts.get(j - 1).cloned().unwrap_or_else(Rational::zero);
    let mut chain = Vec::with_capacity(len);
    let mut prev = Poly::one();
    for j in 1..=len {
        let psi = if j == 1 {
            Poly::new(vec![t(1), Rational::one()])
        } else {
            &prev.integral().integral() + &Poly::constant(t(j))
        };
        chain.push(psi.clone());
        prev = psi;
    }
    chain
}

/// θₖ = W[ψ₁…ψₖ], θ₀ = 1.
pub fn adler_moser_theta(k: usize, ts: &[Rational]) -> ExactPoly {
    wronskian_exact(&adler_moser_chain(k, ts))
}
