//! Cubic Φ-identities for two real point sets x (n points) and y (m points):
//!
//! I₁ = Σₙ Σ_{i≠n} Σ_{j≠n} Φ(xₙ−xᵢ)Φ(xₙ−xⱼ)
//! I₂ = 2Σ_{y}Σ_{i}Σ_{j≠i} Φ(xⱼ−y)Φ(xᵢ−xⱼ) − 2Σ_{x}Σ_{i}Σ_{j≠i} Φ(yⱼ−x)Φ(yᵢ−yⱼ)
//!    + Σ_{x}Σ_{i}Σ_{j} Φ(yⱼ−x)Φ(xᵢ−yⱼ) − Σ_{y}Σ_{i}Σ_{j} Φ(xⱼ−y)Φ(yᵢ−xⱼ)
//!
//! For Φ with Φ(a)Φ(b) + Φ(b)Φ(c) + Φ(c)Φ(a) = 0 whenever a+b+c = 0 (Φ = 1/x)
//! one has I₁ = 2Σ_{i<j}Φ(xᵢ−xⱼ)² and I₂ = 0. For coth the three-term sum is
//! −1 instead, giving I₁ − 2ΣΦ² = 2·C(n,3) and I₂ = nm(m−n).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phi {
    Inverse,
    Coth,
}

impl Phi {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Phi::Inverse => 1.0 / x,
            Phi::Coth => 1.0 / x.tanh(),
        }
    }

    /// Closed-form value of I₁ − 2ΣΦ².
    pub fn i1_offset(self, n: usize, _m: usize) -> f64 {
        match self {
            Phi::Inverse => 0.0,
            Phi::Coth => {
                let n = n as f64;
                n * (n - 1.0) * (n - 2.0) / 3.0
            }
        }
    }

    /// Closed-form value of I₂.
    pub fn i2_value(self, n: usize, m: usize) -> f64 {
        match self {
            Phi::Inverse => 0.0,
            Phi::Coth => (n * m) as f64 * (m as f64 - n as f64),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityValues {
    pub i1: f64,
    /// 2Σ_{i<j}Φ(xᵢ−xⱼ)²
    pub pair_sum: f64,
    pub i2: f64,
}

impl IdentityValues {
    pub fn i1_deviation(&self) -> f64 {
        self.i1 - self.pair_sum
    }
}

pub fn identity_values(phi: Phi, x: &[f64], y: &[f64]) -> IdentityValues {
    let f = |a: f64| phi.eval(a);
    let mut i1 = 0.0;
    let mut pair_sum = 0.0;
    for n in 0..x.len() {
        let s: f64 = (0..x.len()).filter(|&i| i != n).map(|i| f(x[n] - x[i])).sum();
        i1 += s * s;
        for j in n + 1..x.len() {
            pair_sum += 2.0 * f(x[n] - x[j]).powi(2);
        }
    }

    let mut i2 = 0.0;
    for &ym in y {
        for i in 0..x.len() {
            for j in 0..x.len() {
                if j != i {
                    i2 += 2.0 * f(x[j] - ym) * f(x[i] - x[j]);
                }
            }
        }
    }
    for &xm in x {
        for i in 0..y.len() {
            for j in 0..y.len() {
                if j != i {
                    i2 -= 2.0 * f(y[j] - xm) * f(y[i] - y[j]);
                }
            }
        }
    }
    for &xm in x {
        for &xi in x {
            for &yj in y {
                i2 += f(yj - xm) * f(xi - yj);
            }
        }
    }
    for &ym in y {
        for &yi in y {
            for &xj in x {
                i2 -= f(xj - ym) * f(yi - xj);
            }
        }
    }
    IdentityValues { i1, pair_sum, i2 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySweep {
    pub phi: Phi,
    pub trials: usize,
    /// max |I₁ − 2ΣΦ²| and max |I₂| as stated for 1/x.
    pub max_i1_deviation: f64,
    pub max_i2: f64,
    /// Same after subtracting the closed-form offsets.
    pub max_i1_corrected: f64,
    pub max_i2_corrected: f64,
}

/// Random real configurations with 1 ≤ n, m ≤ `max_size`, points in [−2, 2]
/// separated by at least 0.2.
pub fn random_configuration(rng: &mut ChaCha8Rng, max_size: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rng.gen_range(1..=max_size);
    let m = rng.gen_range(1..=max_size);
    let mut pts: Vec<f64> = Vec::with_capacity(n + m);
    while pts.len() < n + m {
        let p = rng.gen_range(-2.0..2.0);
        if pts.iter().all(|q: &f64| (p - q).abs() >= 0.2) {
            pts.push(p);
        }
    }
    let y = pts.split_off(n);
    (pts, y)
}

pub fn identity_sweep(phi: Phi, trials: usize, max_size: usize, seed: u64) -> IdentitySweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = IdentitySweep {
        phi,
        trials,
        max_i1_deviation: 0.0,
        max_i2: 0.0,
        max_i1_corrected: 0.0,
        max_i2_corrected: 0.0,
    };
    for _ in 0..trials {
        let (x, y) = random_configuration(&mut rng, max_size);
        let v = identity_values(phi, &x, &y);
        let (n, m) = (x.len(), y.len());
        out.max_i1_deviation = out.max_i1_deviation.max(v.i1_deviation().abs());
        out.max_i2 = out.max_i2.max(v.i2.abs());
        out.max_i1_corrected = out.max_i1_corrected.max((v.i1_deviation() - phi.i1_offset(n, m)).abs());
        out.max_i2_corrected = out.max_i2_corrected.max((v.i2 - phi.i2_value(n, m)).abs());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_identities_hold() {
        let s = identity_sweep(Phi::Inverse, 200, 6, 1);
        assert!(s.max_i1_deviation < 1e-10, "{s:?}");
        assert!(s.max_i2 < 1e-10, "{s:?}");
    }

    #[test]
    fn coth_closed_forms() {
        let s = identity_sweep(Phi::Coth, 200, 6, 2);
        assert!(s.max_i1_corrected < 1e-10, "{s:?}");
        assert!(s.max_i2_corrected < 1e-10, "{s:?}");
        // The uncorrected forms fail as soon as three x's or n ≠ m occur.
        assert!(s.max_i1_deviation > 1.0);
        assert!(s.max_i2 > 1.0);
    }

    #[test]
    fn three_term_sums() {
        let (a, b) = (0.37, -1.21);
        let c = -a - b;
        let three = |p: Phi| p.eval(a) * p.eval(b) + p.eval(b) * p.eval(c) + p.eval(c) * p.eval(a);
        assert!(three(Phi::Inverse).abs() < 1e-14);
        assert!((three(Phi::Coth) + 1.0).abs() < 1e-13);
    }

    #[test]
    fn two_points() {
        let v = identity_values(Phi::Inverse, &[1.0, -1.0], &[]);
        assert_eq!(v.i1, 0.5);
        assert_eq!(v.pair_sum, 0.5);
        assert_eq!(v.i2, 0.0);
    }
}
