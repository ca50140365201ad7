//! Wronskian determinants W[ψ₁…ψ_k] = det‖ψ_i^{(j)}‖, row i = ψ_i, column j = j-th derivative.

use super::{ExactPoly, Poly};
use crate::scalar::{Field, Ring};

/// Wronskian of a list of polynomials. The empty list gives 1.
///
/// Exact fields use fraction-free (Bareiss) elimination; floating point
/// falls back to cofactor expansion, which avoids polynomial division.
pub fn wronskian<T: Field>(fs: &[Poly<T>]) -> Poly<T> {
    let matrix = derivative_matrix(fs);
    if T::is_exact() {
        bareiss(matrix)
    } else {
        determinant_expansion(&matrix)
    }
}

pub fn wronskian_exact(fs: &[ExactPoly]) -> ExactPoly {
    wronskian(fs)
}

fn derivative_matrix<T: Field>(fs: &[Poly<T>]) -> Vec<Vec<Poly<T>>> {
    let k = fs.len();
    fs.iter()
        .map(|f| {
            let mut row = Vec::with_capacity(k);
            let mut d = f.clone();
            for _ in 0..k {
                let next = d.derivative();
                row.push(d);
                d = next;
            }
            row
        })
        .collect()
}

fn bareiss<T: Field>(mut m: Vec<Vec<Poly<T>>>) -> Poly<T> {
    let k = m.len();
    if k == 0 {
        return Poly::one();
    }
    let mut negate = false;
    let mut prev: Poly<T> = Poly::one();
    for col in 0..k {
        let Some(pivot) = (col..k).find(|&r| !m[r][col].is_zero()) else {
            return Poly::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            negate = !negate;
        }
        for i in col + 1..k {
            for j in col + 1..k {
                let num = &(&m[i][j] * &m[col][col]) - &(&m[i][col] * &m[col][j]);
                let (quot, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[i][j] = quot;
            }
            m[i][col] = Poly::zero();
        }
        prev = m[col][col].clone();
    }
    let det = m[k - 1][k - 1].clone();
    if negate {
        -&det
    } else {
        det
    }
}

/// Determinant over a commutative ring by subset dynamic programming
/// (O(2^k · k) ring products). Suitable for k ≲ 12.
pub fn determinant_expansion<R: Ring>(m: &[Vec<R>]) -> R {
    let k = m.len();
    if k == 0 {
        return R::one();
    }
    assert!(k < usize::BITS as usize, "matrix too large for subset expansion");
    let mut partial: Vec<Option<R>> = vec![None; 1 << k];
    partial[0] = Some(R::one());
    for mask in 0usize..(1 << k) {
        let Some(acc) = partial[mask].take() else {
            continue;
        };
        let row = mask.count_ones() as usize;
        if row == k {
            return acc;
        }
        for col in 0..k {
            if mask & (1 << col) != 0 || m[row][col].is_zero() {
                continue;
            }
            let inversions = (mask >> (col + 1)).count_ones();
            let term = acc.mul(&m[row][col]);
            let term = if inversions % 2 == 1 { term.neg() } else { term };
            let slot = &mut partial[mask | (1 << col)];
            *slot = Some(match slot.take() {
                Some(s) => s.add(&term),
                None => term,
            });
        }
    }
    partial[(1 << k) - 1].take().unwrap_or_else(R::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{classical, ClassicalFamily, FloatPoly};
    use crate::scalar::{rat, rat_int, Rational};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn ep(cs: &[i64]) -> ExactPoly {
        Poly::from_i64s(cs)
    }

    /// Independent oracle: Leibniz sum over all permutations.
    fn leibniz(fs: &[ExactPoly]) -> ExactPoly {
        let k = fs.len();
        let rows: Vec<Vec<ExactPoly>> = fs
            .iter()
            .map(|f| (0..k).map(|j| f.nth_derivative(j)).collect())
            .collect();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut total = ExactPoly::zero();
        permutations(&mut perm, 0, &mut |p| {
            let inv = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let prod = (0..k).fold(ExactPoly::one(), |acc, i| &acc * &rows[i][p[i]]);
            total = if inv % 2 == 0 { &total + &prod } else { &total - &prod };
        });
        total
    }

    fn permutations(v: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
        if start == v.len() {
            f(v);
            return;
        }
        for i in start..v.len() {
            v.swap(start, i);
            permutations(v, start + 1, f);
            v.swap(start, i);
        }
    }

    #[test]
    fn small_wronskians() {
        assert_eq!(wronskian_exact(&[ep(&[1]), ep(&[0, 1])]), ep(&[1]));
        // ψ₂ = z³/3: W = z·z² − 1·z³/3 = (2/3)z³
        let psi2 = ExactPoly::from_rationals(vec![rat_int(0), rat_int(0), rat_int(0), rat(1, 3)]);
        let w = wronskian_exact(&[ep(&[0, 1]), psi2.clone()]);
        let two_by_two = &(&ep(&[0, 1]) * &psi2.derivative()) - &(&ep(&[1]) * &psi2);
        assert_eq!(w, two_by_two);
        assert_eq!(w, ExactPoly::monomial(rat(2, 3), 3));
    }

    #[test]
    fn hermite_triple_matches_worked_example() {
        let h: Vec<ExactPoly> = [2, 4, 6]
            .iter()
            .map(|&n| classical(&ClassicalFamily::Hermite, n))
            .collect();
        let w = wronskian_exact(&h);
        let expected = &ExactPoly::monomial(rat_int(8192), 3) * &ep(&[-15, 0, 18, 0, -12, 0, 8]);
        assert_eq!(w, expected);
        assert_eq!(w, leibniz(&h));
        assert_eq!(wronskian_exact(&h[..2]), &ep(&[0, 32]) * &ep(&[3, 0, -4, 0, 4]));
    }

    #[test]
    fn float_wronskian_agrees() {
        let h: Vec<ExactPoly> = [1, 3, 4]
            .iter()
            .map(|&n| classical(&ClassicalFamily::Hermite, n))
            .collect();
        let exact = wronskian_exact(&h).to_float();
        let fl: Vec<FloatPoly> = h.iter().map(|p| p.to_float()).collect();
        let w = wronskian(&fl);
        for k in 0..=exact.degree().unwrap() {
            assert!((w.coeff(k) - exact.coeff(k)).norm() < 1e-9);
        }
        let _ = Complex64::new(0.0, 0.0);
    }

    #[test]
    fn empty_and_dependent() {
        assert_eq!(wronskian_exact(&[]), ExactPoly::one());
        let f = ep(&[1, 2, 3]);
        assert!(wronskian_exact(&[f.clone(), f.scale(&rat_int(4))]).is_zero());
    }

    fn poly_list() -> impl Strategy<Value = Vec<ExactPoly>> {
        prop::collection::vec(prop::collection::vec(-5i64..6, 1..6), 2..5)
            .prop_map(|v| v.into_iter().map(|cs| ep(&cs)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn alternating(fs in poly_list(), a in 0usize..4, b in 0usize..4) {
            let (a, b) = (a % fs.len(), b % fs.len());
            prop_assume!(a != b);
            let mut swapped = fs.clone();
            swapped.swap(a, b);
            prop_assert_eq!(wronskian_exact(&swapped), -&wronskian_exact(&fs));
        }

        #[test]
        fn scaling(fs in poly_list(), c in -7i64..8) {
            let c: Rational = rat_int(c);
            let mut scaled = fs.clone();
            scaled[0] = scaled[0].scale(&c);
            prop_assert_eq!(wronskian_exact(&scaled), wronskian_exact(&fs).scale(&c));
        }

        #[test]
        fn bareiss_matches_leibniz(fs in poly_list()) {
            prop_assert_eq!(wronskian_exact(&fs), leibniz(&fs));
            let m = derivative_matrix(&fs);
            prop_assert_eq!(determinant_expansion(&m), leibniz(&fs));
        }
    }
}
