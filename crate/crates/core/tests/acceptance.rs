//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed; a failing criterion is reported, never
//! loosened.

use std::f64::consts::PI;
use std::fs;
use std::time::Instant;

use levy_exit::cli::{self, Cli, Command};
use levy_exit::engine::{gamma_default, simulate_ensemble, ExitRecord, PathParams, Scheme};
use levy_exit::lab::{
    deviation_grid, fit_sandwich_constant, run_experiment, stable_exit_law, sweep, ExperimentConfig,
    PotentialConfig, SANDWICH_MIN_SURVIVAL,
};
use levy_exit::noise::{stable_scale_constant, RngStream, StableNoiseSpec};
use levy_exit::potential::{ExitDomain, PotentialSpec};
use levy_exit::split::{rho_gamma_feasible, sample_large_jump, split_characteristic_check, SplitSpec};
use levy_exit::stats::{ks_exponential, ks_one_sample, ks_two_sample, ols};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Cauchy, ContinuousCDF, Pareto};
use statrs::function::gamma::gamma;

const SEED: u64 = 20_240_501;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn closed_form_scale(alpha: f64) -> f64 {
    PI / (gamma(1.0 + alpha) * (PI * alpha / 2.0).sin())
}

fn unit() -> ExitDomain {
    ExitDomain::bounded(1.0, 1.0).unwrap()
}

/// Stable-mode config with `U = x²/2` on `[-1, 1]` and 3000 paths.
fn stable_cfg(alpha: f64, eps: Vec<f64>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(alpha, eps);
    cfg.n_paths = 3000;
    cfg.seed = SEED;
    cfg
}

fn c1_scale_constant() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 1.5, 1.75] {
        let c = stable_scale_constant(alpha).unwrap();
        worst = worst.max((c / closed_form_scale(alpha) - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(worst < 1e-6 && secs < 1.0, format!("max rel err {worst:.2e} (< 1e-6), {secs:.3} s (< 1 s)"))
}

fn c2_split_identity() -> Verdict {
    let lambdas = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
    let mut worst = 0.0f64;
    let mut oracle = 0.0f64;
    let mut ok = true;
    for alpha in [1.0, 1.5] {
        for eps in [0.1, 0.01] {
            let spec = SplitSpec::with_default_rho(alpha, eps).unwrap();
            let noise = StableNoiseSpec::new(alpha, 1.0, true).unwrap();
            let report = split_characteristic_check(&spec, &noise, &lambdas).unwrap();
            ok &= report.passed;
            for r in &report.rows {
                worst = worst.max(r.abs_error);
                let exact = -0.5 * r.lambda * r.lambda - closed_form_scale(alpha) * r.lambda.powf(alpha);
                oracle = oracle.max((r.psi_small + r.psi_large - exact).abs());
            }
        }
    }
    let pass = ok && worst <= 1e-8 && oracle <= 1e-8;
    verdict(pass, format!("max |psi_xi+psi_eta-psi_L| {worst:.2e}, vs closed form {oracle:.2e} (<= 1e-8)"))
}

fn c3_sampler_law() -> Verdict {
    let n = 100_000;
    let mut rng = RngStream::new(SEED, 3).rng();
    let noise = StableNoiseSpec::stable(1.0).unwrap();
    let xs: Vec<f64> = (0..n).map(|_| noise.sample_stable_increment(1.0, &mut rng).unwrap()).collect();
    let cauchy = Cauchy::new(0.0, PI).unwrap();
    let ks_cauchy = ks_one_sample(&xs, |x| cauchy.cdf(x));

    let spec = SplitSpec::with_default_rho(1.0, 0.05).unwrap();
    let mut rng = RngStream::new(SEED, 4).rng();
    let ws: Vec<f64> = (0..n).map(|_| sample_large_jump(&spec, &mut rng).w.abs()).collect();
    let pareto = Pareto::new(spec.threshold, 1.0).unwrap();
    let ks_pareto = ks_one_sample(&ws, |x| pareto.cdf(x));
    verdict(
        ks_cauchy < 0.02 && ks_pareto < 0.01,
        format!("KS Cauchy(pi) {ks_cauchy:.4} (< 0.02), KS Pareto {ks_pareto:.4} (< 0.01)"),
    )
}

struct MeanRun {
    eps: f64,
    ratio: f64,
    ratio_se: f64,
    mean: f64,
    records: Vec<ExitRecord>,
}

fn mean_runs(cfg: &ExperimentConfig) -> Vec<MeanRun> {
    (0..cfg.eps.len())
        .map(|j| {
            let run = run_experiment(cfg, j).unwrap();
            MeanRun {
                eps: run.eps,
                ratio: run.summary.mean / run.theory_mean,
                ratio_se: run.summary.std_error / run.theory_mean,
                mean: run.summary.mean,
                records: run.records,
            }
        })
        .collect()
}

fn c4_mean_exit(runs: &[MeanRun]) -> Verdict {
    let in_band = runs.iter().all(|r| (0.7..=1.3).contains(&r.ratio));
    let (coarse, fine) = (&runs[0], &runs[2]);
    let trend = (fine.ratio - 1.0).abs() <= (coarse.ratio - 1.0).abs() + 2.0 * fine.ratio_se;
    let ratios: Vec<String> = runs.iter().map(|r| format!("{}: {:.3}", r.eps, r.ratio)).collect();
    verdict(
        in_band && trend,
        format!("ratios [{}] in [0.7,1.3]; |r(0.02)-1| <= |r(0.1)-1| + 2SE: {trend}", ratios.join(", ")),
    )
}

fn c5_exponential_law(run: &MeanRun) -> Verdict {
    let ks = ks_exponential(&run.records).unwrap_or(f64::INFINITY);
    let times: Vec<f64> = run.records.iter().map(|r| r.exit_time).collect();
    let pred = stable_exit_law(1.0, run.eps, &unit(), gamma_default(1.0)).unwrap();
    let c = fit_sandwich_constant(&times, &pred, SANDWICH_MIN_SURVIVAL);
    verdict(ks < 0.05 && c <= 10.0, format!("eps {}: KS {ks:.4} (< 0.05), fitted C {c:.3} (<= 10)", run.eps))
}

fn c6_half_line() -> Verdict {
    let mut cfg = stable_cfg(1.0, vec![0.05]);
    cfg.potential = PotentialConfig::HarmonicQuartic { m: 1.0, kappa: 1.0 };
    cfg.domain = ExitDomain::half_line(1.0).unwrap();
    let run = run_experiment(&cfg, 0).unwrap();
    let ratio = run.summary.mean / run.theory_mean;
    verdict(
        (0.7..=1.3).contains(&ratio),
        format!("mean {:.3} vs {:.3}, ratio {ratio:.3} in [0.7,1.3]", run.summary.mean, run.theory_mean),
    )
}

fn c7_mechanism() -> Verdict {
    let mut cfg = stable_cfg(1.0, vec![0.02]);
    cfg.scheme = Scheme::JumpAdapted;
    let run = run_experiment(&cfg, 0).unwrap();
    let frac = run.summary.big_jump_exit_fraction;
    let near = run.summary.near_origin_fraction.unwrap_or(0.0);
    verdict(
        frac >= 0.9 && near >= 0.8,
        format!("big-jump exit fraction {frac:.3} (>= 0.9), near origin {near:.3} (>= 0.8)"),
    )
}

fn c8_scaling(alpha1: &[MeanRun]) -> Verdict {
    let x: Vec<f64> = alpha1.iter().map(|r| r.eps.ln()).collect();
    let y: Vec<f64> = alpha1.iter().map(|r| r.mean.ln()).collect();
    let slope1 = ols(&x, &y).unwrap().0;
    let slope15 = sweep(&stable_cfg(1.5, vec![0.1, 0.05, 0.02])).unwrap().loglog_slope.unwrap();

    let mut g = ExperimentConfig::new(1.0, vec![0.7, 0.55, 0.45]);
    g.stable = false;
    g.d = 1.0;
    g.n_paths = 2000;
    g.seed = SEED;
    let kramers = sweep(&g).unwrap().kramers_slope.unwrap();
    g.eps = vec![0.5];
    let at_half = run_experiment(&g, 0).unwrap().summary.mean;
    let kramers_half = 48.4;
    let factor = at_half / kramers_half;

    let pass = (slope1 + 1.0).abs() <= 0.15
        && (slope15 + 1.5).abs() <= 0.15
        && (kramers - 1.0).abs() <= 0.1
        && (0.5..=2.0).contains(&factor);
    verdict(
        pass,
        format!(
            "slope a=1 {slope1:.3} (-1 +- 0.15), a=1.5 {slope15:.3} (-1.5 +- 0.15), \
             Brownian ln-mean slope {kramers:.3} (1 +- 0.1), mean(0.5) {at_half:.2} vs 48.4 (x/ 2)"
        ),
    )
}

fn c9_scheme_equivalence() -> Verdict {
    let p = PotentialSpec::quadratic(1.0).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for (alpha, eps) in [(1.0, 0.05), (1.5, 0.1)] {
        let noise = StableNoiseSpec::stable(alpha).unwrap();
        let split = SplitSpec::with_default_rho(alpha, eps).unwrap();
        let mean = stable_exit_law(alpha, eps, &unit(), gamma_default(alpha)).unwrap().mean;
        let times = |scheme, base| {
            let pp = PathParams::new(eps, 0.01, 20.0 * mean, scheme, split).unwrap();
            simulate_ensemble(&p, &unit(), &noise, &pp, SEED, base, 2000, None)
                .unwrap()
                .iter()
                .map(|r| r.exit_time)
                .collect::<Vec<_>>()
        };
        let ks = ks_two_sample(&times(Scheme::Euler, 0), &times(Scheme::JumpAdapted, 1 << 40));
        pass &= ks < 0.06;
        parts.push(format!("({alpha},{eps}) KS {ks:.4}"));
    }
    verdict(pass, format!("{} (< 0.06)", parts.join(", ")))
}

fn c10_tube_deviation() -> Verdict {
    let mut cfg = ExperimentConfig::new(1.0, vec![0.1, 0.05, 0.02]);
    cfg.seed = SEED;
    cfg.tube_c = 1.0;
    cfg.tube_paths = 5000;
    let table = deviation_grid(&cfg).unwrap();
    let est: Vec<f64> = table.rows.iter().map(|r| r.estimate).collect();
    let decreasing = est.windows(2).all(|w| w[1] < w[0]);
    let need = (cfg.alpha + table.gamma) / 4.0;
    let exponent = table.exponent;
    let pass = decreasing && exponent.is_some_and(|e| e >= need);
    let hits: Vec<String> = table.rows.iter().map(|r| format!("{}/{}", r.hits, r.n_paths)).collect();
    verdict(
        pass,
        format!(
            "hits [{}], strictly decreasing: {decreasing}, exponent {} (>= {need:.3})",
            hits.join(", "),
            exponent.map_or("undefined".into(), |e| format!("{e:.3}"))
        ),
    )
}

fn c11_feasibility() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let default_ok = (0..100).all(|_| {
        let alpha = rng.random_range(0.05..1.95);
        rho_gamma_feasible(alpha, 0.5, (2.0 - alpha) / 5.0).feasible
    });
    // membership by the rearranged inequalities, on a grid in (ρ, γ)
    let mut mismatches = 0;
    let mut cells = 0;
    for _ in 0..100 {
        let alpha: f64 = rng.random_range(0.05..1.95);
        for i in 0..=60 {
            for k in 0..=60 {
                let rho = -0.1 + 1.2 * i as f64 / 60.0;
                let gamma = -0.2 + 1.4 * k as f64 / 60.0;
                let brute = rho > 0.0
                    && rho < 1.0
                    && gamma > 0.0
                    && rho + 2.0 * gamma / (2.0 - alpha) < 1.0
                    && 2.0 * rho > 1.0 - gamma / alpha;
                cells += 1;
                if brute != rho_gamma_feasible(alpha, rho, gamma).feasible {
                    mismatches += 1;
                }
            }
        }
    }
    verdict(
        default_ok && mismatches == 0,
        format!("default (1/2, (2-a)/5) feasible for 100 alphas: {default_ok}; grid mismatches {mismatches}/{cells}"),
    )
}

fn c12_reproducibility() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(
        &config,
        "potential = \"quadratic\"\na = 1\nb = 1\nalpha = 1.5\neps = [0.1]\nn_paths = 1000\nseed = 11\n",
    )
    .unwrap();
    let run = |workers: u64, out: &str| {
        let cli = Cli {
            command: Command::Simulate,
            config: Some(config.clone()),
            manifest: None,
            seed: None,
            out: dir.path().join(out),
            workers: Some(workers),
        };
        cli::run(&cli).unwrap();
        fs::read(dir.path().join(out).join("records.csv")).unwrap()
    };
    let one = run(1, "w1");
    let four = run(4, "w4");
    verdict(one == four && !one.is_empty(), format!("records.csv identical for workers 1 and 4 ({} bytes)", one.len()))
}

fn main() {
    let start = Instant::now();
    let mut rows: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut record = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let secs = t.elapsed().as_secs_f64();
        println!("criterion {n:>2} [{}] {name}: {} ({secs:.1} s)", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        rows.push((n, name, v, secs));
    };

    record(1, "scale constant", &mut c1_scale_constant);
    record(2, "split identity", &mut c2_split_identity);
    record(3, "sampler law", &mut c3_sampler_law);
    let alpha1 = mean_runs(&stable_cfg(1.0, vec![0.1, 0.05, 0.02]));
    record(4, "mean exit", &mut || c4_mean_exit(&alpha1));
    record(5, "exponential law", &mut || c5_exponential_law(&alpha1[1]));
    record(6, "half-line", &mut c6_half_line);
    record(7, "mechanism", &mut c7_mechanism);
    record(8, "scaling exponents", &mut || c8_scaling(&alpha1));
    record(9, "scheme equivalence", &mut c9_scheme_equivalence);
    record(10, "tube deviation", &mut c10_tube_deviation);
    record(11, "feasibility region", &mut c11_feasibility);
    record(12, "reproducibility", &mut c12_reproducibility);

    let failed: Vec<usize> = rows.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1} s",
        rows.len() - failed.len(),
        rows.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
