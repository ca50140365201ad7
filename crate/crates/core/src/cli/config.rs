//! The JSON run configuration.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{FlowSpec, OutputGrid, IntegrateOptions, Phi};
use crate::equilibria::{EquilibriumCertificate, Recipe};
use crate::error::{Error, Result};
use crate::operators::{ChargeConfiguration, SystemCoefficients};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Simulate,
    Equilibrium,
    Conserved,
    Period,
    VerifyIdentities,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    /// P = i, U = iωz with charges {+1, −Λ}.
    RationalOmega {
        omega: f64,
        capital_lambda: f64,
        sizes: Vec<usize>,
    },
    Bilinear {
        p: Vec<Complex64>,
        #[serde(default)]
        u: Vec<Complex64>,
        capital_lambda: f64,
        sizes: Vec<usize>,
        #[serde(default)]
        lambda: Option<Complex64>,
    },
    Polylinear {
        p: Vec<Complex64>,
        #[serde(default)]
        u: Vec<Complex64>,
        charges: Vec<f64>,
        sizes: Vec<usize>,
        #[serde(default)]
        lambda: Option<Complex64>,
    },
    Linear {
        p: Vec<Complex64>,
        #[serde(default)]
        u: Vec<Complex64>,
        n: usize,
    },
    Angular {
        sizes: Vec<usize>,
    },
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig::RationalOmega {
            omega: 1.0,
            capital_lambda: 1.213579,
            sizes: vec![6, 1],
        }
    }
}

fn two_sizes(sizes: &[usize]) -> Result<(usize, usize)> {
    match sizes {
        [n, m] => Ok((*n, *m)),
        _ => Err(Error::ArityMismatch {
            expected: 2,
            got: sizes.len(),
        }),
    }
}

impl SystemConfig {
    pub fn flow(&self) -> Result<FlowSpec> {
        let re = |x: f64| Complex64::new(x, 0.0);
        match self {
            SystemConfig::RationalOmega {
                omega,
                capital_lambda,
                sizes,
            } => {
                let (n, m) = two_sizes(sizes)?;
                if !(*omega >= 0.0 && omega.is_finite()) {
                    return Err(Error::Validation(format!("omega must be finite and >= 0, got {omega}")));
                }
                Ok(FlowSpec::rational_omega(*omega, *capital_lambda, n, m))
            }
            SystemConfig::Bilinear {
                p,
                u,
                capital_lambda,
                sizes,
                lambda,
            } => {
                let (n, m) = two_sizes(sizes)?;
                let mut sys = SystemCoefficients::bilinear(p, u, re(*capital_lambda))?;
                sys.lambda = *lambda;
                FlowSpec::bilinear(sys, n, m)
            }
            SystemConfig::Polylinear {
                p,
                u,
                charges,
                sizes,
                lambda,
            } => {
                let mut sys = SystemCoefficients::polylinear(p, u, charges.iter().map(|&q| re(q)).collect())?;
                sys.lambda = *lambda;
                FlowSpec::polylinear(sys, sizes.clone())
            }
            SystemConfig::Linear { p, u, n } => FlowSpec::linear(SystemCoefficients::linear(p, u, *n)?),
            SystemConfig::Angular { sizes } => {
                let (n, m) = two_sizes(sizes)?;
                Ok(FlowSpec::angular(n, m))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Positions per species as [re, im] pairs.
    Positions { positions: Vec<Vec<Complex64>> },
    /// Uniform in the square [−w, w]² with a minimum pairwise separation.
    Random {
        #[serde(default = "default_half_width")]
        half_width: f64,
        #[serde(default = "default_min_separation")]
        min_separation: f64,
    },
    /// Roots of p̄ and q̄ of a certificate file (all net charges ±1).
    Certificate { path: PathBuf },
}

fn default_half_width() -> f64 {
    2.0
}

fn default_min_separation() -> f64 {
    0.3
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Random {
            half_width: default_half_width(),
            min_separation: default_min_separation(),
        }
    }
}

/// `total` complex points uniform in [−w, w]², pairwise at least `min_sep` apart.
pub fn random_positions(rng: &mut ChaCha8Rng, total: usize, half_width: f64, min_sep: f64) -> Result<Vec<Complex64>> {
    let mut pts: Vec<Complex64> = Vec::with_capacity(total);
    let mut attempts = 0usize;
    while pts.len() < total {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::Validation(format!(
                "cannot place {total} points with separation {min_sep} in a box of half-width {half_width}"
            )));
        }
        let z = Complex64::new(rng.gen_range(-half_width..half_width), rng.gen_range(-half_width..half_width));
        if pts.iter().all(|w| (z - w).norm() >= min_sep) {
            pts.push(z);
        }
    }
    Ok(pts)
}

impl InitialConfig {
    pub fn configuration(&self, flow: &FlowSpec, seed: u64, base: &Path) -> Result<ChargeConfiguration> {
        let z = match self {
            InitialConfig::Positions { positions } => {
                let sizes: Vec<usize> = positions.iter().map(Vec::len).collect();
                if sizes != flow.sizes {
                    return Err(Error::Validation(format!(
                        "initial species sizes {sizes:?} do not match the system sizes {:?}",
                        flow.sizes
                    )));
                }
                positions.concat()
            }
            InitialConfig::Random {
                half_width,
                min_separation,
            } => {
                if !(*half_width > 0.0) || *min_separation < 0.0 {
                    return Err(Error::Validation("random initial box needs half_width > 0 and min_separation >= 0".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                random_positions(&mut rng, flow.total(), *half_width, *min_separation)?
            }
            InitialConfig::Certificate { path } => {
                let path = if path.is_relative() { base.join(path) } else { path.clone() };
                let cert = EquilibriumCertificate::from_json(&std::fs::read_to_string(&path)?)?;
                certificate_positions(&cert, flow)?
            }
        };
        let state = flow.configuration(&z, 0.0);
        state.check_distinct()?;
        Ok(state)
    }
}

fn certificate_positions(cert: &EquilibriumCertificate, flow: &FlowSpec) -> Result<Vec<Complex64>> {
    if cert.reduced.is_none() {
        return Err(Error::Validation("certificate has no charge inventory".into()));
    }
    let inv = cert.inventory();
    if let Some(s) = inv.iter().find(|s| s.charge.abs() != 1) {
        return Err(Error::Validation(format!(
            "certificate site with net charge {} cannot seed unit-charge dynamics",
            s.charge
        )));
    }
    let x: Vec<Complex64> = inv.iter().filter(|s| s.charge == 1).map(|s| s.position).collect();
    let y: Vec<Complex64> = inv.iter().filter(|s| s.charge == -1).map(|s| s.position).collect();
    if flow.sizes != [x.len(), y.len()] {
        return Err(Error::Validation(format!(
            "certificate has {} positive and {} negative sites, system sizes are {:?}",
            x.len(),
            y.len(),
            flow.sizes
        )));
    }
    Ok([x, y].concat())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    /// End time; defaults to `periods` base periods (or 1 without a period).
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "default_periods")]
    pub periods: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_samples")]
    pub samples_per_period: usize,
    /// Output samples when the flow has no base period.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_periods() -> f64 {
    2.0
}
fn default_rtol() -> f64 {
    1e-10
}
fn default_atol() -> f64 {
    1e-12
}
fn default_samples() -> usize {
    128
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            t_end: None,
            periods: default_periods(),
            rtol: default_rtol(),
            atol: default_atol(),
            samples_per_period: default_samples(),
            samples: default_samples(),
        }
    }
}

/// 2π/ω for flows with a harmonic term.
pub fn base_period(flow: &FlowSpec) -> Option<f64> {
    (flow.omega() > 0.0).then(|| 2.0 * PI / flow.omega())
}

impl IntegrationConfig {
    pub fn t_end(&self, flow: &FlowSpec) -> f64 {
        self.t_end
            .unwrap_or_else(|| base_period(flow).map_or(1.0, |t| self.periods * t))
    }

    pub fn options(&self, flow: &FlowSpec, t_end: f64) -> Result<IntegrateOptions> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Validation("rtol and atol must be positive".into()));
        }
        let samples = match base_period(flow) {
            Some(t) => ((self.samples_per_period as f64) * t_end / t).ceil().max(1.0) as usize,
            None => self.samples.max(1),
        };
        Ok(IntegrateOptions::with_tolerances(self.rtol, self.atol).with_grid(OutputGrid::Uniform(samples)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub svg: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodConfig {
    #[serde(default = "default_period_tol")]
    pub tol: f64,
    #[serde(default = "default_max_periods")]
    pub max_periods: usize,
    /// Independent random initial conditions (seeds seed, seed+1, …).
    #[serde(default = "default_runs")]
    pub runs: usize,
}

fn default_period_tol() -> f64 {
    1e-5
}
fn default_max_periods() -> usize {
    6
}
fn default_runs() -> usize {
    1
}

impl Default for PeriodConfig {
    fn default() -> Self {
        PeriodConfig {
            tol: default_period_tol(),
            max_periods: default_max_periods(),
            runs: default_runs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "default_phi")]
    pub phi: Phi,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_max_size")]
    pub max_size: usize,
}

fn default_phi() -> Phi {
    Phi::Inverse
}
fn default_trials() -> usize {
    100
}
fn default_max_size() -> usize {
    6
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        IdentitiesConfig {
            phi: default_phi(),
            trials: default_trials(),
            max_size: default_max_size(),
        }
    }
}

/// One experiment. Every block has defaults; unknown keys are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<RunMode>,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub equilibrium: Option<Recipe>,
    #[serde(default)]
    pub period: PeriodConfig,
    #[serde(default)]
    pub identities: IdentitiesConfig,
}

impl RunConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        RunConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks that need no computation: the system builds and explicit
    /// initial positions match its species sizes.
    pub fn validate(&self) -> Result<()> {
        let flow = self.system.flow()?;
        if let InitialConfig::Positions { positions } = &self.initial {
            let sizes: Vec<usize> = positions.iter().map(Vec::len).collect();
            if sizes != flow.sizes {
                return Err(Error::Validation(format!(
                    "initial species sizes {sizes:?} do not match the system sizes {:?}",
                    flow.sizes
                )));
            }
        }
        if let Some(t) = self.integration.t_end {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Validation(format!("t_end must be finite and >= 0, got {t}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_unknown_keys() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg.system, SystemConfig::default());
        assert_eq!(cfg.integration.rtol, 1e-10);
        assert!(matches!(RunConfig::from_json(r#"{"sytem": {}}"#), Err(Error::Validation(_))));
        assert!(matches!(
            RunConfig::from_json(r#"{"integration": {"rtol": 1e-9, "tolerance": 1}}"#),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn species_sizes_must_match() {
        let cfg = RunConfig::from_json(
            r#"{"system": {"kind": "rational_omega", "omega": 1, "capital_lambda": 1, "sizes": [2, 1]},
                "initial": {"kind": "positions", "positions": [[[1, 0], [0, 1]]]}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Validation(_))));
    }

    #[test]
    fn random_positions_respect_separation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = random_positions(&mut rng, 7, 2.0, 0.3).unwrap();
        for i in 0..7 {
            assert!(z[i].re.abs() <= 2.0 && z[i].im.abs() <= 2.0);
            for j in 0..i {
                assert!((z[i] - z[j]).norm() >= 0.3);
            }
        }
    }

    #[test]
    fn grid_follows_samples_per_period() {
        let cfg = IntegrationConfig::default();
        let flow = FlowSpec::rational_omega(1.0, 1.0, 1, 0);
        let t_end = cfg.t_end(&flow);
        assert!((t_end - 4.0 * PI).abs() < 1e-15);
        let opts = cfg.options(&flow, t_end).unwrap();
        assert_eq!(opts.grid, OutputGrid::Uniform(256));
    }
}
