//! Command-line front end: subcommands, config ingestion and artifact output.

mod config;
mod svg;

pub use config::{
    base_period, random_positions, Format, IdentitiesConfig, InitialConfig, IntegrationConfig, OutputConfig,
    PeriodConfig, RunConfig, RunMode, SystemConfig,
};
pub use svg::plot_svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conserved::{conserved_report, detect_period, hamiltonians, ConservedReport, PeriodReport};
use crate::dynamics::{identity_sweep, integrate, FlowKind, FlowSpec, Phi, Trajectory};
use crate::equilibria::{
    adler_moser, cylinder_pair, hermite_pair, laguerre_pair, monomial_pair, EquilibriumCertificate, Recipe, Residual,
};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Output directory override when neither `--out` nor the config sets one.
pub const OUT_DIR_ENV: &str = "CHARGEFLOW_OUT";
const DEFAULT_OUT_DIR: &str = "chargeflow-out";

#[derive(Parser, Debug)]
#[command(name = "chargeflow", version, about = "Root dynamics of point charges, equilibrium certificates and conserved quantities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration (one file = one experiment).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Trajectory format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also write an SVG plot of the trajectory.
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for independent runs.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrate the root dynamics and write the trajectory.
    Simulate,
    /// Build and certify an equilibrium polynomial pair.
    Equilibrium(EquilibriumArgs),
    /// Lax integrals, split Hamiltonians and period detection (Λ = 1).
    Conserved,
    /// Multiset-return period detection over seeded random initial data.
    Period {
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_periods: Option<usize>,
    },
    /// Random sweep of the cubic Φ-identities.
    VerifyIdentities {
        #[arg(long, value_parser = parse_phi)]
        phi: Option<Phi>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_size: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RecipeKind {
    Hermite,
    Laguerre,
    Monomial,
    AdlerMoser,
    Cylinder,
}

#[derive(Args, Debug)]
pub struct EquilibriumArgs {
    #[arg(long, value_enum)]
    pub recipe: Option<RecipeKind>,
    /// Comma-separated strictly increasing indices.
    #[arg(long, value_delimiter = ',')]
    pub indices: Vec<usize>,
    /// Rational b, e.g. -2 or 3/4.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Adler–Moser order: the pair is (θ_{k+1}, θ_k).
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated parameters: rationals for adler-moser, angles for
    /// cylinder (numbers or multiples of pi such as pi/6, -2pi/3).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ts: Vec<String>,
}

fn parse_phi(s: &str) -> std::result::Result<Phi, String> {
    match s {
        "inverse" => Ok(Phi::Inverse),
        "coth" => Ok(Phi::Coth),
        _ => Err(format!("unknown phi {s:?} (expected inverse or coth)")),
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse()
        .map_err(|_| Error::Validation(format!("not a rational number: {s:?}")))
}

/// A number, or a rational multiple of pi written like `pi`, `-pi/6`, `2pi/3`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let bad = || Error::Validation(format!("not an angle: {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let coef = num.trim().strip_suffix("pi").ok_or_else(bad)?.trim();
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    Ok(c * std::f64::consts::PI / den)
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut log = stdout.lock();
    match run(&cli, &mut log) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Context {
    cfg: RunConfig,
    out: PathBuf,
    base: PathBuf,
    format: Format,
    svg: bool,
    jobs: usize,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let (cfg, base) = match &cli.config {
            Some(path) => (
                RunConfig::load(path)?,
                path.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (RunConfig::default(), PathBuf::new()),
        };
        let mut cfg = cfg;
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        let mode = cli.command.mode();
        if let Some(m) = cfg.mode {
            if m != mode {
                return Err(Error::Validation(format!(
                    "config is for mode {m:?}, but the {mode:?} subcommand was given"
                )));
            }
        }
        let out = cli
            .out
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        let format = cli.format.or(cfg.output.format).unwrap_or_default();
        let svg = cli.svg || cfg.output.svg;
        let jobs = cli.jobs.unwrap_or(1).max(1);
        Ok(Context {
            cfg,
            out,
            base,
            format,
            svg,
            jobs,
        })
    }

    fn write(&self, name: &str, contents: &[u8], written: &mut Vec<PathBuf>) -> Result<()> {
        let path = write_atomic(&self.out, name, contents)?;
        written.push(path);
        Ok(())
    }
}

impl Command {
    pub fn mode(&self) -> RunMode {
        match self {
            Command::Simulate => RunMode::Simulate,
            Command::Equilibrium(_) => RunMode::Equilibrium,
            Command::Conserved => RunMode::Conserved,
            Command::Period { .. } => RunMode::Period,
            Command::VerifyIdentities { .. } => RunMode::VerifyIdentities,
        }
    }
}

/// Write `dir/name` through a temporary file in the same directory and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(path)
}

/// Execute a parsed command line, printing one summary line per monitor to
/// `log`. Returns the artifacts written.
pub fn run(cli: &Cli, log: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let ctx = Context::new(cli)?;
    let mut written = Vec::new();
    let result = match &cli.command {
        Command::Simulate => simulate(&ctx, log, &mut written),
        Command::Equilibrium(args) => equilibrium(&ctx, args, log, &mut written),
        Command::Conserved => conserved(&ctx, log, &mut written),
        Command::Period {
            runs,
            tol,
            max_periods,
        } => {
            let mut pc = ctx.cfg.period.clone();
            pc.runs = runs.unwrap_or(pc.runs);
            pc.tol = tol.unwrap_or(pc.tol);
            pc.max_periods = max_periods.unwrap_or(pc.max_periods);
            period(&ctx, &pc, log, &mut written)
        }
        Command::VerifyIdentities { phi, trials, max_size } => {
            let mut ic = ctx.cfg.identities.clone();
            ic.phi = phi.unwrap_or(ic.phi);
            ic.trials = trials.unwrap_or(ic.trials);
            ic.max_size = max_size.unwrap_or(ic.max_size);
            verify_identities(&ctx, &ic, log, &mut written)
        }
    };
    for path in &written {
        writeln!(log, "wrote {}", path.display())?;
    }
    result.map(|_| written)
}

fn prepare(ctx: &Context) -> Result<(FlowSpec, crate::operators::ChargeConfiguration)> {
    let flow = ctx.cfg.system.flow()?;
    let init = ctx.cfg.initial.configuration(&flow, ctx.cfg.seed, &ctx.base)?;
    Ok((flow, init))
}

fn integrate_configured(ctx: &Context, flow: &FlowSpec, init: &crate::operators::ChargeConfiguration) -> Result<Trajectory> {
    let t_end = ctx.cfg.integration.t_end(flow);
    let opts = ctx.cfg.integration.options(flow, t_end)?;
    integrate(flow, init, t_end, &opts)
}

fn has_lax(flow: &FlowSpec) -> bool {
    flow.kind == FlowKind::RationalOmega && flow.species_charges() == [1.0, -1.0]
}

/// H(t) samples for flows with a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Rows [t, Re H, Im H].
    pub energy: Vec<[f64; 3]>,
    /// max |H(t) − H(0)| / |H(0)|
    pub drift: f64,
}

pub fn energy_report(flow: &FlowSpec, traj: &Trajectory) -> Result<EnergyReport> {
    let mut rows = Vec::with_capacity(traj.len());
    let mut h0: Option<Complex64> = None;
    let mut worst: f64 = 0.0;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let h = hamiltonians(flow, state)?.total;
        let base = *h0.get_or_insert(h);
        worst = worst.max((h - base).norm() / base.norm().max(1e-300));
        rows.push([*t, h.re, h.im]);
    }
    Ok(EnergyReport {
        energy: rows,
        drift: worst,
    })
}

fn write_trajectory(ctx: &Context, traj: &Trajectory, written: &mut Vec<PathBuf>) -> Result<()> {
    match ctx.format {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            ctx.write("trajectory.csv", &buf, written)?;
        }
        Format::Json => ctx.write("trajectory.json", serde_json::to_string_pretty(traj)?.as_bytes(), written)?,
    }
    if ctx.svg {
        ctx.write("trajectory.svg", plot_svg(traj)?.as_bytes(), written)?;
    }
    Ok(())
}

fn monitor_lines(traj: &Trajectory, log: &mut dyn Write) -> Result<()> {
    let residual = traj.monitors.iter().filter_map(|m| m.residual).fold(None, |acc: Option<f64>, r| {
        Some(acc.map_or(r, |a| a.max(r)))
    });
    if let Some(r) = residual {
        writeln!(log, "monitor residual: max {r:.3e}")?;
    }
    let sep = traj.monitors.iter().map(|m| m.min_separation).fold(f64::INFINITY, f64::min);
    writeln!(log, "monitor min_sep: min {sep:.3e}")?;
    Ok(())
}

fn simulate(ctx: &Context, log: &mut dyn Write, written: &mut Vec<PathBuf>) -> Result<()> {
    let (flow, init) = prepare(ctx)?;
    let mut traj = integrate_configured(ctx, &flow, &init)?;
    writeln!(
        log,
        "simulate: {:?} sizes {:?}, t_end {:.6}, {} samples, {} steps ({} rejected)",
        flow.kind,
        flow.sizes,
        traj.times.last().copied().unwrap_or(0.0),
        traj.len(),
        traj.stats.accepted,
        traj.stats.rejected
    )?;
    monitor_lines(&traj, log)?;
    if has_lax(&flow) {
        let report = conserved_report(&flow, &mut traj, None)?;
        let worst = report.drift.iter().copied().fold(0.0, f64::max);
        writeln!(log, "monitor I1..I{}: max relative drift {worst:.3e}", report.drift.len())?;
        write_trajectory(ctx, &traj, written)?;
        ctx.write("conserved.json", serde_json::to_string_pretty(&report)?.as_bytes(), written)?;
    } else if flow.kind != FlowKind::Angular && flow.kind != FlowKind::Linear {
        let report = energy_report(&flow, &traj)?;
        writeln!(log, "monitor energy: relative drift {:.3e}", report.drift)?;
        write_trajectory(ctx, &traj, written)?;
        ctx.write("conserved.json", serde_json::to_string_pretty(&report)?.as_bytes(), written)?;
    } else {
        write_trajectory(ctx, &traj, written)?;
    }
    Ok(())
}

fn conserved(ctx: &Context, log: &mut dyn Write, written: &mut Vec<PathBuf>) -> Result<()> {
    let (flow, init) = prepare(ctx)?;
    if !has_lax(&flow) {
        return Err(Error::Validation(
            "conserved needs a rational_omega system with capital_lambda = 1".into(),
        ));
    }
    let mut traj = integrate_configured(ctx, &flow, &init)?;
    let mut report: ConservedReport = conserved_report(&flow, &mut traj, None)?;
    let worst = report.drift.iter().copied().fold(0.0, f64::max);
    writeln!(
        log,
        "conserved: {} integrals over {} samples, max relative drift {worst:.3e}",
        report.drift.len(),
        traj.len()
    )?;
    let h0 = hamiltonians(&flow, &traj.states[0])?;
    let (mut dp, mut dm) = (0.0f64, 0.0f64);
    for s in &traj.states {
        let h = hamiltonians(&flow, s)?;
        if let (Some(a), Some(b), Some(a0), Some(b0)) = (h.plus, h.minus, h0.plus, h0.minus) {
            dp = dp.max((a - a0).norm() / a0.norm().max(1.0));
            dm = dm.max((b - b0).norm() / b0.norm().max(1.0));
        }
    }
    writeln!(log, "monitor H+: drift {dp:.3e}")?;
    writeln!(log, "monitor H-: drift {dm:.3e}")?;
    if let Some(t) = base_period(&flow) {
        match detect_period(&traj, t, ctx.cfg.period.tol) {
            Ok(p) => {
                writeln!(log, "monitor period: k = {}, mismatch {:.3e}", p.k, p.mismatch)?;
                report.period = Some(p);
            }
            Err(Error::NoReturnFound { span, best }) => {
                writeln!(log, "monitor period: no return within {span:.6} (best {best:.3e})")?;
            }
            Err(e) => return Err(e),
        }
    }
    write_trajectory(ctx, &traj, written)?;
    ctx.write("conserved.json", serde_json::to_string_pretty(&report)?.as_bytes(), written)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodRun {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PeriodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Integrate `max_periods` base periods from the configured initial data with
/// the given seed and look for a multiset return.
pub fn period_run(cfg: &RunConfig, pc: &PeriodConfig, seed: u64, base: &Path) -> Result<PeriodReport> {
    let flow = cfg.system.flow()?;
    let t = base_period(&flow).ok_or_else(|| Error::Validation("period detection needs omega > 0".into()))?;
    let init = cfg.initial.configuration(&flow, seed, base)?;
    let t_end = pc.max_periods as f64 * t;
    let opts = cfg.integration.options(&flow, t_end)?;
    let traj = integrate(&flow, &init, t_end, &opts)?;
    detect_period(&traj, t, pc.tol)
}

fn period(ctx: &Context, pc: &PeriodConfig, log: &mut dyn Write, written: &mut Vec<PathBuf>) -> Result<()> {
    let seeds: Vec<u64> = (0..pc.runs.max(1) as u64).map(|i| ctx.cfg.seed + i).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.jobs)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    let results: Vec<(u64, Result<PeriodReport>)> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| (s, period_run(&ctx.cfg, pc, s, &ctx.base)))
            .collect()
    });
    let mut runs = Vec::with_capacity(results.len());
    let mut first_err = None;
    for (seed, r) in results {
        match r {
            Ok(report) => {
                writeln!(log, "period seed {seed}: k = {}, mismatch {:.3e}", report.k, report.mismatch)?;
                runs.push(PeriodRun {
                    seed,
                    report: Some(report),
                    error: None,
                });
            }
            Err(e) => {
                writeln!(log, "period seed {seed}: {e}")?;
                runs.push(PeriodRun {
                    seed,
                    report: None,
                    error: Some(e.to_string()),
                });
                first_err.get_or_insert(e);
            }
        }
    }
    ctx.write("period.json", serde_json::to_string_pretty(&runs)?.as_bytes(), written)?;
    first_err.map_or(Ok(()), Err)
}

fn verify_identities(ctx: &Context, ic: &IdentitiesConfig, log: &mut dyn Write, written: &mut Vec<PathBuf>) -> Result<()> {
    if ic.max_size == 0 {
        return Err(Error::Validation("max_size must be at least 1".into()));
    }
    let sweep = identity_sweep(ic.phi, ic.trials, ic.max_size, ctx.cfg.seed);
    writeln!(
        log,
        "verify-identities {:?}: {} trials, max |I1 - 2 sum phi^2| = {:.3e}, max |I2| = {:.3e}",
        ic.phi, sweep.trials, sweep.max_i1_deviation, sweep.max_i2
    )?;
    writeln!(
        log,
        "closed forms: max |I1 deviation - offset| = {:.3e}, max |I2 - value| = {:.3e}",
        sweep.max_i1_corrected, sweep.max_i2_corrected
    )?;
    ctx.write("identities.json", serde_json::to_string_pretty(&sweep)?.as_bytes(), written)
}

fn recipe_from_args(args: &EquilibriumArgs) -> Result<Option<Recipe>> {
    let Some(kind) = args.recipe else {
        return Ok(None);
    };
    let b = || -> Result<Rational> {
        parse_rational(args.b.as_deref().ok_or_else(|| Error::Validation("--b is required for this recipe".into()))?)
    };
    let indices = args.indices.clone();
    Ok(Some(match kind {
        RecipeKind::Hermite => Recipe::HermiteWronskian { indices, b: b()? },
        RecipeKind::Laguerre => Recipe::LaguerreWronskian { indices, b: b()? },
        RecipeKind::Monomial => Recipe::Monomial { indices, b: b()? },
        RecipeKind::AdlerMoser => Recipe::AdlerMoser {
            k: args.k.ok_or_else(|| Error::Validation("--k is required for adler-moser".into()))?,
            ts: args.ts.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
        },
        RecipeKind::Cylinder => Recipe::Cylinder {
            ts: if args.ts.is_empty() {
                vec![0.0; indices.len()]
            } else {
                args.ts.iter().map(|s| parse_angle(s)).collect::<Result<_>>()?
            },
            indices,
        },
    }))
}

/// Build and certify the pair a recipe describes.
pub fn build(recipe: &Recipe) -> Result<EquilibriumCertificate> {
    match recipe {
        Recipe::HermiteWronskian { indices, b } => hermite_pair(indices, b),
        Recipe::LaguerreWronskian { indices, b } => laguerre_pair(indices, b),
        Recipe::Monomial { indices, b } => monomial_pair(indices, b),
        Recipe::AdlerMoser { k, ts } => adler_moser(*k, ts),
        Recipe::Cylinder { indices, ts } => cylinder_pair(indices, ts),
    }
}

fn equilibrium(ctx: &Context, args: &EquilibriumArgs, log: &mut dyn Write, written: &mut Vec<PathBuf>) -> Result<()> {
    let recipe = match recipe_from_args(args)? {
        Some(r) => r,
        None => ctx
            .cfg
            .equilibrium
            .clone()
            .ok_or_else(|| Error::Validation("no recipe: pass --recipe or an equilibrium block in the config".into()))?,
    };
    let cert = build(&recipe)?;
    let residual = match cert.residual {
        Residual::ExactZero => "exact zero".to_string(),
        Residual::Float { norm } => format!("{norm:.3e}"),
        Residual::Unchecked => "unchecked".to_string(),
    };
    writeln!(
        log,
        "equilibrium: degrees {:?}, residual {residual}, {} charge sites",
        cert.degrees,
        cert.inventory().len()
    )?;
    if let Some(g) = cert.max_gradient {
        writeln!(log, "monitor gradient: max relative {g:.3e}")?;
    }
    ctx.write("certificate.json", cert.to_json()?.as_bytes(), written)
}
