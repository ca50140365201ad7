use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{ChargeConfiguration, Mode, Species, SystemCoefficients};

/// Collision threshold relative to the configuration scale.
pub const COLLISION_DELTA: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// dzᵢ/dt = −2P(zᵢ)Σ 1/(zᵢ − zⱼ) − U(zᵢ)
    Linear,
    /// Charges {+1, −Λ}; same right-hand side as `Polylinear`.
    Bilinear,
    /// dzᵢ/dt = −2P(zᵢ)Σ Qⱼ/(zᵢ − zⱼ) − U(zᵢ) − (Qᵢ/2)P′(zᵢ)
    Polylinear,
    /// P = i, U = iωz: i dxⱼ/dt = 2Σ 1/(xⱼ − x_k) − 2ΛΣ 1/(xⱼ − y_k) + ωxⱼ, and
    /// i dyⱼ/dt = 2Σ 1/(yⱼ − x_k) − 2ΛΣ 1/(yⱼ − y_k) + ωyⱼ.
    RationalOmega,
    /// dφᵢ/dt = −2Σ cot(φᵢ − φⱼ) + 2Σ cot(φᵢ − θⱼ),
    /// dθᵢ/dt = 2Σ cot(θᵢ − θⱼ) − 2Σ cot(θᵢ − φⱼ).
    Angular,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub sys: SystemCoefficients<Complex64>,
    pub sizes: Vec<usize>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl FlowSpec {
    pub fn linear(sys: SystemCoefficients<Complex64>) -> Result<Self> {
        let Mode::Linear { n } = sys.mode else {
            return Err(Error::Validation("linear flow needs a linear-mode system".into()));
        };
        Ok(FlowSpec {
            kind: FlowKind::Linear,
            sys,
            sizes: vec![n],
        })
    }

    pub fn bilinear(sys: SystemCoefficients<Complex64>, n: usize, m: usize) -> Result<Self> {
        if sys.mode != Mode::Bilinear {
            return Err(Error::Validation("bilinear flow needs a bilinear-mode system".into()));
        }
        Ok(FlowSpec {
            kind: FlowKind::Bilinear,
            sys,
            sizes: vec![n, m],
        })
    }

    pub fn polylinear(sys: SystemCoefficients<Complex64>, sizes: Vec<usize>) -> Result<Self> {
        if sys.charges.len() != sizes.len() {
            return Err(Error::ArityMismatch {
                expected: sys.charges.len(),
                got: sizes.len(),
            });
        }
        Ok(FlowSpec {
            kind: FlowKind::Polylinear,
            sys,
            sizes,
        })
    }

    pub fn rational_omega(omega: f64, capital_lambda: f64, n: usize, m: usize) -> Self {
        FlowSpec {
            kind: FlowKind::RationalOmega,
            sys: SystemCoefficients::rational_omega(omega, capital_lambda),
            sizes: vec![n, m],
        }
    }

    /// Angles on the cylinder; the associated operator has P = −z², U = 0.
    pub fn angular(n: usize, m: usize) -> Self {
        let sys = SystemCoefficients::bilinear(&[c(0.0), c(0.0), c(-1.0)], &[], c(1.0)).expect("quadratic P");
        FlowSpec {
            kind: FlowKind::Angular,
            sys,
            sizes: vec![n, m],
        }
    }

    pub fn omega(&self) -> f64 {
        self.sys.omega
    }

    /// Per-species charges (real parts).
    pub fn species_charges(&self) -> Vec<f64> {
        match self.kind {
            FlowKind::Linear => vec![1.0],
            _ => self.sys.charges.iter().map(|q| q.re).collect(),
        }
    }

    /// Charge of each particle, species-major.
    pub fn particle_charges(&self) -> Vec<f64> {
        let q = self.species_charges();
        self.sizes
            .iter()
            .zip(&q)
            .flat_map(|(&n, &qi)| std::iter::repeat(qi).take(n))
            .collect()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Does the evolution come from a multilinear operator (so the residual
    /// monitor applies)?
    pub fn has_operator_residual(&self) -> bool {
        matches!(
            self.kind,
            FlowKind::Bilinear | FlowKind::Polylinear | FlowKind::RationalOmega
        )
    }

    /// Configuration with this flow's species layout.
    pub fn configuration(&self, positions: &[Complex64], time: f64) -> ChargeConfiguration {
        let q = self.species_charges();
        let mut k = 0;
        let species = self
            .sizes
            .iter()
            .zip(q)
            .map(|(&n, charge)| {
                let s = Species::new(charge, positions[k..k + n].to_vec());
                k += n;
                s
            })
            .collect();
        ChargeConfiguration { species, time }
    }

    pub fn check_layout(&self, state: &ChargeConfiguration) -> Result<()> {
        let sizes = state.sizes();
        if sizes != self.sizes {
            return Err(Error::Validation(format!(
                "species sizes {:?} do not match the flow's {:?}",
                sizes, self.sizes
            )));
        }
        Ok(())
    }

    /// Pairwise "distance" used for collision detection: |Δz|, or |sin Δ| for angles.
    pub fn separation(&self, a: Complex64, b: Complex64) -> f64 {
        match self.kind {
            FlowKind::Angular => (a - b).sin().norm(),
            _ => (a - b).norm(),
        }
    }

    pub fn scale(&self, z: &[Complex64]) -> f64 {
        match self.kind {
            FlowKind::Angular => 1.0,
            _ => z.iter().map(|w| w.norm()).fold(1.0, f64::max),
        }
    }

    /// Smallest pairwise separation and its pair.
    pub fn min_separation(&self, z: &[Complex64]) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                let d = self.separation(z[i], z[j]);
                if best.map_or(true, |b| d < b.0) {
                    best = Some((d, i, j));
                }
            }
        }
        best
    }

    pub fn collision_threshold(&self, z: &[Complex64]) -> f64 {
        COLLISION_DELTA * self.scale(z)
    }

    /// Velocities without the collision check.
    pub fn velocities(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = z.len();
        match self.kind {
            FlowKind::Linear => (0..n)
                .map(|i| {
                    let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                    -self.sys.p.eval(&z[i]) * s * 2.0 - self.sys.u.eval(&z[i])
                })
                .collect(),
            FlowKind::Bilinear | FlowKind::Polylinear | FlowKind::RationalOmega => {
                let q = self.particle_charges();
                let dp = self.sys.p.derivative();
                (0..n)
                    .map(|i| {
                        let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| q[j] / (z[i] - z[j])).sum();
                        -self.sys.p.eval(&z[i]) * s * 2.0 - self.sys.u.eval(&z[i]) - dp.eval(&z[i]) * (q[i] / 2.0)
                    })
                    .collect()
            }
            FlowKind::Angular => {
                let q = self.particle_charges();
                (0..n)
                    .map(|i| {
                        let s: Complex64 = (0..n)
                            .filter(|&j| j != i)
                            .map(|j| {
                                let d = z[i] - z[j];
                                q[j] * d.cos() / d.sin()
                            })
                            .sum();
                        s * -2.0
                    })
                    .collect()
            }
        }
    }
}

/// Velocities of every particle, species-major. Fails with `Collision` when
/// two particles are closer than the collision threshold.
pub fn rhs(flow: &FlowSpec, state: &ChargeConfiguration) -> Result<Vec<Complex64>> {
    flow.check_layout(state)?;
    let z = state.positions();
    if let Some((d, i, j)) = flow.min_separation(&z) {
        if d <= flow.collision_threshold(&z) {
            return Err(Error::Collision {
                time: state.time,
                i,
                j,
                separation: d,
            });
        }
    }
    Ok(flow.velocities(&z))
}
