//! Cancellation of common roots between the numerator and denominator of p/q.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{find_roots, from_roots, ExactPoly, FloatPoly, Polynomial, RootList, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};

/// A distinct root position with its net charge (multiplicity in p minus
/// multiplicity in q).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeSite {
    pub position: Complex64,
    pub charge: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedPair {
    pub pbar: Polynomial,
    pub qbar: Polynomial,
    pub inventory: Vec<ChargeSite>,
}

/// Yun's algorithm: `f = c · Π f_k^k` with squarefree, pairwise coprime,
/// monic f_k. Returns the nonconstant `(f_k, k)`.
pub fn squarefree_decomposition(f: &ExactPoly) -> Vec<(ExactPoly, usize)> {
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_rem(&a0).0;
    let c = df.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut k = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.monic(), k));
        }
        let next_b = b.div_rem(&a).0;
        let next_c = d.div_rem(&a).0;
        d = &next_c - &next_b.derivative();
        b = next_b;
        k += 1;
    }
    out
}

/// Exact reduction: divide out gcd(p, q), then read multiplicities from the
/// squarefree decomposition. Positions are numerical roots of the factors.
pub fn reduce_pair_exact(p: &ExactPoly, q: &ExactPoly) -> Result<ReducedPair> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Validation("reduce_pair needs nonzero p and q".into()));
    }
    let g = p.gcd(q);
    let pbar = p.div_rem(&g).0.monic();
    let qbar = q.div_rem(&g).0.monic();
    let mut inventory = Vec::new();
    for (poly, sign) in [(&pbar, 1i64), (&qbar, -1i64)] {
        for (factor, mult) in squarefree_decomposition(poly) {
            for z in find_roots(&factor.to_float(), DEFAULT_ROOT_TOL)?.roots {
                inventory.push(ChargeSite {
                    position: z,
                    charge: sign * mult as i64,
                });
            }
        }
    }
    Ok(ReducedPair {
        pbar: Polynomial::Exact(pbar),
        qbar: Polynomial::Exact(qbar),
        inventory,
    })
}

/// Reduce p/q. Exact inputs take the GCD route; otherwise roots are
/// clustered with relative tolerance `ctol` and each cluster is replaced by
/// its centroid.
pub fn reduce_pair(p: &Polynomial, q: &Polynomial, ctol: f64) -> Result<ReducedPair> {
    if let (Polynomial::Exact(pe), Polynomial::Exact(qe)) = (p, q) {
        return reduce_pair_exact(pe, qe);
    }
    if p.is_zero() || q.is_zero() {
        return Err(Error::Validation("reduce_pair needs nonzero p and q".into()));
    }
    let roots_of = |f: &FloatPoly| -> Result<Vec<Complex64>> {
        if f.degree() == Some(0) {
            Ok(Vec::new())
        } else {
            Ok(find_roots(f, DEFAULT_ROOT_TOL)?.roots)
        }
    };
    let pr = roots_of(&p.to_float())?;
    let qr = roots_of(&q.to_float())?;
    let all: Vec<(Complex64, i64)> = pr
        .iter()
        .map(|&z| (z, 1))
        .chain(qr.iter().map(|&z| (z, -1)))
        .collect();
    let scale = RootList::new(all.iter().map(|r| r.0).collect()).tol_scale();
    let join = ctol * scale;

    // Single-linkage clustering with union-find.
    let n = all.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (all[i].0 - all[j].0).norm();
            if d > join / 10.0 && d <= join {
                return Err(Error::ClusterAmbiguity { distance: d, ctol });
            }
            if d <= join {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut clusters: Vec<(usize, Complex64, usize, i64)> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        match clusters.iter_mut().find(|c| c.0 == r) {
            Some(c) => {
                c.1 += all[i].0;
                c.2 += 1;
                c.3 += all[i].1;
            }
            None => clusters.push((r, all[i].0, 1, all[i].1)),
        }
    }
    let mut inventory = Vec::new();
    let mut pbar_roots = Vec::new();
    let mut qbar_roots = Vec::new();
    for (_, sum, count, charge) in clusters {
        if charge == 0 {
            continue;
        }
        let centroid = sum / count as f64;
        let target = if charge > 0 { &mut pbar_roots } else { &mut qbar_roots };
        target.extend(std::iter::repeat(centroid).take(charge.unsigned_abs() as usize));
        inventory.push(ChargeSite {
            position: centroid,
            charge,
        });
    }
    Ok(ReducedPair {
        pbar: Polynomial::Float(from_roots(&RootList::new(pbar_roots))),
        qbar: Polynomial::Float(from_roots(&RootList::new(qbar_roots))),
        inventory,
    })
}
