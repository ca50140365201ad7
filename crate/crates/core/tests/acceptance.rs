//! Acceptance criteria 1-12. Each criterion prints one PASS/FAIL line; this
//! target runs without the test harness so the lines always show.
//!
//! Criteria listed in `DOCUMENTED_FAILURES` are computed and printed exactly
//! like the others, but do not abort the run; every other criterion must pass.

use std::f64::consts::PI;
use std::time::Instant;

use chargeflow::cli::{self, base_period, period_run, random_positions, Cli, InitialConfig, PeriodConfig, RunConfig};
use chargeflow::conserved::{conserved_report, hamiltonians};
use chargeflow::dynamics::{
    check_reduced_flow, identity_sweep, integrate, newton_mismatch, FlowSpec, IntegrateOptions, OutputGrid, Phi,
};
use chargeflow::equilibria::{
    adler_moser, adler_moser_theta, cylinder_pair, laguerre_pair, net_charge, proportionality, EquilibriumCertificate,
    Residual,
};
use chargeflow::operators::{linear_eigenvalue, linear_l, ChargeConfiguration, OperatorClass, SystemCoefficients};
use chargeflow::polynomials::{ExactPoly, Poly};
use chargeflow::scalar::{rat, rat_int};
use chargeflow::Error;
use clap::Parser;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DOCUMENTED_FAILURES: [usize; 4] = [1, 6, 10, 11];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ep(cs: &[i64]) -> ExactPoly {
    Poly::from_i64s(cs)
}

fn seeded_positions(seed: u64, total: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_positions(&mut rng, total, 2.0, 0.3).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["chargeflow", "equilibrium", "--recipe", "hermite", "--indices", "2,4,6", "--b", "-2", "--out", out];
    let cli = Cli::try_parse_from(args).unwrap();
    let mut log = Vec::new();
    cli::run(&cli, &mut log).unwrap();
    let cert =
        EquilibriumCertificate::from_json(&std::fs::read_to_string(dir.path().join("certificate.json")).unwrap())
            .unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let p_ref = ep(&[0, 0, 0, -15, 0, 18, 0, -12, 0, 8]).scale(&rat_int(8192));
    let q_ref = ep(&[0, 3, 0, -4, 0, 4]).scale(&rat_int(32));
    let p_ok = proportionality(cert.p.as_line().unwrap().as_exact().unwrap(), &p_ref).is_some();
    let q_ok = proportionality(cert.q.as_line().unwrap().as_exact().unwrap(), &q_ref).is_some();
    let exact = matches!(cert.residual, Residual::ExactZero);

    let inv = cert.inventory();
    let origin: i64 = inv.iter().filter(|s| s.position.norm() < 1e-9).map(|s| s.charge).sum();
    let real_plus = inv
        .iter()
        .filter(|s| s.charge == 1 && s.position.norm() >= 1e-9 && s.position.im.abs() < 1e-9)
        .count();
    let all_plus = inv.iter().filter(|s| s.charge == 1).count();
    let off_minus = inv.iter().filter(|s| s.charge == -1 && s.position.im.abs() >= 1e-9).count();
    let pass = p_ok && q_ok && exact && origin == 2 && real_plus == 6 && off_minus == 4 && elapsed < 1.0;
    outcome(
        pass,
        format!(
            "p proportional {p_ok}, q proportional {q_ok}, exact residual {exact}; charge {origin} at 0, \
             {real_plus} of {all_plus} +1 charges real (need 6), {off_minus} -1 off-axis, net {}; {elapsed:.2}s",
            net_charge(inv)
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let params = [(rat(1, 3), rat(-2, 1)), (rat(-7, 5), rat(3, 8))];
    let mut checked = 0;
    let mut failed = Vec::new();
    for class in OperatorClass::ALL {
        for (a, b) in &params {
            for n in 0..=15 {
                let sys = class.system(a, b, n).unwrap();
                let q = class.eigenpolynomial(a, b, n);
                let ok = match linear_eigenvalue(&sys, n, &q) {
                    Ok(Some(lambda)) => (&linear_l(&sys, n, &q).unwrap() + &q.scale(&lambda)).is_zero(),
                    _ => false,
                };
                checked += 1;
                if !ok || q.degree() != Some(n) {
                    failed.push(format!("{class:?} n={n}"));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        failed.is_empty() && elapsed < 5.0,
        format!("{checked} eigenrelations exact, failures {failed:?}; {elapsed:.2}s"),
    )
}

fn criterion_3() -> Outcome {
    let degrees_ok = (0..=6).all(|k| adler_moser_theta(k, &[]).degree() == Some(k * (k + 1) / 2));
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut pairs = 0;
    let mut bad = Vec::new();
    for k in 1..=5 {
        for _ in 0..3 {
            let ts: Vec<_> = (0..=k).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))).collect();
            let theta_ok = (0..=6).all(|j| adler_moser_theta(j, &ts).degree() == Some(j * (j + 1) / 2));
            match adler_moser(k, &ts) {
                Ok(cert) if cert.is_exact_zero() && theta_ok => pairs += 1,
                other => bad.push(format!("k={k}: {:?}", other.err())),
            }
        }
    }
    outcome(
        degrees_ok && bad.is_empty(),
        format!("deg theta_k = k(k+1)/2 for k <= 6: {degrees_ok}; {pairs}/15 consecutive pairs exact {bad:?}"),
    )
}

fn criterion_4() -> Outcome {
    let cert = laguerre_pair(&[0, 1, 2, 3, 4], &rat_int(1));
    let exact = cert.as_ref().map(|c| c.is_exact_zero()).unwrap_or(false);
    let rejected = matches!(laguerre_pair(&[1, 2], &rat_int(1)), Err(Error::BadK(1)));
    outcome(
        exact && rejected,
        format!("k=4 I={{0..4}} b=1 exact: {exact}; k=1 rejected with BadK: {rejected}"),
    )
}

fn criterion_5() -> Outcome {
    let phases = [0.0, PI / 6.0];
    let mut exact = 0;
    for &a in &phases {
        for &b in &phases {
            if cylinder_pair(&[1, 2], &[a, b]).map(|c| c.is_exact_zero()).unwrap_or(false) {
                exact += 1;
            }
        }
    }
    let mut worst = 0.0f64;
    let mut float_ok = true;
    for ts in [[0.37, 1.91], [-2.2, 0.05], [1.0, 2.0]] {
        match cylinder_pair(&[1, 2], &ts).map(|c| c.residual) {
            Ok(Residual::Float { norm }) => worst = worst.max(norm),
            _ => float_ok = false,
        }
    }
    outcome(
        exact == 4 && float_ok && worst < 1e-10,
        format!("{exact}/4 phase choices exact; generic float residual max {worst:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let inv = identity_sweep(Phi::Inverse, 100, 6, 6);
    let coth = identity_sweep(Phi::Coth, 100, 6, 6);
    let ok = |s: &chargeflow::dynamics::IdentitySweep| s.max_i1_deviation < 1e-10 && s.max_i2 < 1e-10;
    outcome(
        ok(&inv) && ok(&coth),
        format!(
            "1/x: |I1 - 2 sum phi^2| {:.2e}, |I2| {:.2e}; coth: |I1 - 2 sum phi^2| {:.2e}, |I2| {:.2e}",
            inv.max_i1_deviation, inv.max_i2, coth.max_i1_deviation, coth.max_i2
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    let mut all = true;
    for (lam, seed) in [(1.0, 71), (1.213579, 72)] {
        let flow = FlowSpec::rational_omega(1.0, lam, 6, 1);
        let init = flow.configuration(&seeded_positions(seed, 7), 0.0);
        let opts = IntegrateOptions::default().with_grid(OutputGrid::Uniform(256));
        let traj = integrate(&flow, &init, 4.0 * PI, &opts).unwrap();
        for m in &traj.monitors {
            match m.residual {
                Some(r) => worst = worst.max(r),
                None => all = false,
            }
        }
    }
    outcome(
        all && worst < 1e-8,
        format!("max normalized residual {worst:.2e} over 2 base periods, Lambda = 1 and 1.213579"),
    )
}

fn criterion_8() -> Outcome {
    let mut worst_i = 0.0f64;
    let mut worst_h = 0.0f64;
    for (seed, (n, m)) in [(1, 1), (2, 1), (3, 1), (2, 2), (4, 1), (3, 2)].into_iter().enumerate() {
        let flow = FlowSpec::rational_omega(1.0, 1.0, n, m);
        let init = flow.configuration(&seeded_positions(80 + seed as u64, n + m), 0.0);
        let opts = IntegrateOptions::default().with_grid(OutputGrid::Uniform(384));
        let mut traj = integrate(&flow, &init, 6.0 * PI, &opts).unwrap();
        let report = conserved_report(&flow, &mut traj, None).unwrap();
        worst_i = report.drift.iter().copied().fold(worst_i, f64::max);
        let h0 = hamiltonians(&flow, &traj.states[0]).unwrap();
        for s in &traj.states {
            let h = hamiltonians(&flow, s).unwrap();
            for (a, b) in [(h.plus, h0.plus), (h.minus, h0.minus)] {
                let (a, b) = (a.unwrap(), b.unwrap());
                worst_h = worst_h.max((a - b).norm() / b.norm().max(1e-300));
            }
        }
    }
    outcome(
        worst_i < 1e-6 && worst_h < 1e-7,
        format!("n+m <= 5, 3 periods: max I_k drift {worst_i:.2e}, max H+/H- drift {worst_h:.2e}"),
    )
}

fn newton_max(flow: &FlowSpec, init: &ChargeConfiguration, h: f64, samples: usize) -> f64 {
    // The second difference divides integration error by h², so integrate tightly.
    let opts = IntegrateOptions::with_tolerances(1e-13, 1e-15).with_grid(OutputGrid::Uniform(samples));
    let traj = integrate(flow, init, samples as f64 * h, &opts).unwrap();
    (1..samples).map(|k| newton_mismatch(flow, &traj, k).unwrap()).fold(0.0, f64::max)
}

/// Mismatch at h = 1e-3 over `samples` steps, and the ratio of the h = 2e-3 and
/// h = 1e-3 mismatches (4 for a second-difference error).
fn newton_check(flow: &FlowSpec, z0: &[Complex64], samples: usize) -> (f64, f64) {
    let init = flow.configuration(z0, 0.0);
    let fine = newton_max(flow, &init, 1e-3, samples);
    let coarse = newton_max(flow, &init, 2e-3, samples / 2);
    (fine, coarse / fine)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let flow = FlowSpec::rational_omega(1.0, 1.0, 4, 2);
    let z = random_positions(&mut rng, 6, 3.0, 1.0).unwrap();
    let (rational, r_ratio) = newton_check(&flow, &z, 500);

    let sys = SystemCoefficients::linear(
        &[c(1.0, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(-0.02, 0.0), c(0.01, 0.0)],
        &[c(0.1, 0.0), c(-0.5, 0.0), c(0.1, 0.0)],
        4,
    )
    .unwrap();
    let lin = FlowSpec::linear(sys).unwrap();
    let z0 = [c(-2.1, 0.2), c(-0.6, -0.3), c(0.7, 0.1), c(2.0, -0.2)];
    let (linear, l_ratio) = newton_check(&lin, &z0, 200);
    let second_order = |r: f64| (3.0..5.0).contains(&r);
    outcome(
        rational < 1e-4 && linear < 1e-4 && second_order(r_ratio) && second_order(l_ratio),
        format!(
            "FD step 1e-3: Lambda = 1 Newton mismatch {rational:.2e} (h-halving ratio {r_ratio:.2}), \
             quartic-P linear run {linear:.2e} (ratio {l_ratio:.2})"
        ),
    )
}

fn criterion_10() -> Outcome {
    let cfg = RunConfig::default();
    let flow = cfg.system.flow().unwrap();
    let pc = PeriodConfig {
        max_periods: 4,
        ..PeriodConfig::default()
    };
    let mut lines = Vec::new();
    let mut pass = true;
    let mut slowest = 0.0f64;
    for seed in 0..5 {
        let start = Instant::now();
        let r = period_run(&cfg, &pc, seed, std::path::Path::new(""));
        slowest = slowest.max(start.elapsed().as_secs_f64());
        match r {
            Ok(p) => lines.push(format!("seed {seed}: k={} mismatch {:.1e}", p.k, p.mismatch)),
            Err(Error::NoReturnFound { best, .. }) => {
                pass = false;
                lines.push(format!("seed {seed}: no return within 4T (best {best:.1e})"));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("seed {seed}: {e}"));
            }
        }
    }
    // Information only: the same seeds drawn from a wider box.
    let wide = RunConfig {
        initial: InitialConfig::Random {
            half_width: 4.0,
            min_separation: 0.3,
        },
        ..RunConfig::default()
    };
    let wide_k: Vec<String> = (0..5)
        .map(|seed| match period_run(&wide, &pc, seed, std::path::Path::new("")) {
            Ok(p) => p.k.to_string(),
            Err(_) => "none".into(),
        })
        .collect();
    lines.push(format!("half-width 4 box (info): k = [{}]", wide_k.join(", ")));
    outcome(
        pass && slowest < 60.0,
        format!(
            "sizes {:?}, Lambda 1.213579, T = {:.4}: {}; slowest run {slowest:.1}s",
            flow.sizes,
            base_period(&flow).unwrap(),
            lines.join("; ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let flow = FlowSpec::rational_omega(1.0, 1.0, 4, 1);
    let (a, b) = (c(0.9, 0.4), c(-0.3, 1.1));
    let init = flow.configuration(&[a, b, -a, -b, c(0.0, 0.0)], 0.0);
    let opts = IntegrateOptions::default().with_grid(OutputGrid::Uniform(256));
    let traj = integrate(&flow, &init, 4.0 * PI, &opts).unwrap();
    let check = check_reduced_flow(&flow, &traj, 1e-7).unwrap();
    outcome(
        check.symmetry_drift < 1e-7 && check.printed_mismatch < 1e-8,
        format!(
            "symmetry drift {:.2e}; reduced velocities vs stated equation {:.2e} (vs reduction of the flow {:.2e})",
            check.symmetry_drift, check.printed_mismatch, check.derived_mismatch
        ),
    )
}

fn single_particle(rtol: f64, atol: f64) -> (f64, f64) {
    let omega = 1.0;
    let flow = FlowSpec::rational_omega(omega, 1.0, 1, 0);
    let x0 = c(1.0, 0.5);
    let t = 2.0 * PI / omega;
    let opts = IntegrateOptions::with_tolerances(rtol, atol).with_grid(OutputGrid::Uniform(1));
    let traj = integrate(&flow, &flow.configuration(&[x0], 0.0), t, &opts).unwrap();
    let exact = x0 * Complex64::new(0.0, -omega * t).exp();
    let err = (traj.last().positions()[0] - exact).norm();
    (err, t / traj.stats.accepted as f64)
}

fn criterion_12() -> Outcome {
    let d = IntegrateOptions::default();
    let (err, _) = single_particle(d.rtol, d.atol);
    // Each halving of the tolerance shrinks the mean step by 2^(1/5); the
    // observed order is log(error ratio) / log(step ratio).
    let runs: Vec<(f64, f64)> = (0..6)
        .map(|j| {
            let s = 0.5f64.powi(j);
            single_particle(1e-7 * s, 1e-9 * s)
        })
        .collect();
    let orders: Vec<f64> = runs
        .windows(2)
        .map(|w| (w[0].0 / w[1].0).ln() / (w[0].1 / w[1].1).ln())
        .collect();
    let decreasing = runs.windows(2).all(|w| w[1].0 < w[0].0);
    let span = (runs[0].0 / runs[5].0).ln() / (runs[0].1 / runs[5].1).ln();
    outcome(
        err < 1e-8 && decreasing && (4.0..=6.5).contains(&span),
        format!(
            "endpoint error {err:.2e} at default tolerances; errors {:?}; observed order {span:.2} (pairwise {:?})",
            runs.iter().map(|r| format!("{:.1e}", r.0)).collect::<Vec<_>>(),
            orders.iter().map(|o| format!("{o:.1}")).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in criteria {
        let o = run();
        println!("criterion {id:>2}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && !DOCUMENTED_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("criteria failed: {unexpected:?}");
        std::process::exit(1);
    }
}
