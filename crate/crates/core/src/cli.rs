//! Configuration-driven experiment runner behind the `levy-exit` binary.
//!
//! A config is a flat TOML file of typed keys:
//!
//! ```toml
//! potential = "quadratic"        # or "harmonic_quartic" (needs kappa)
//! m = 1.0
//! domain = "bounded"             # or "half_line" (no b)
//! a = 1.0
//! b = 1.0
//! alpha = 1.0
//! eps = [0.05]
//! n_paths = 100
//! seed = 7
//! ```
//!
//! Optional keys: `kappa`, `d`, `stable`, `rho`, `scheme`, `t_max_multiplier`,
//! `h`, `x0`, `workers`, `tube_c`, `tube_paths`. Unknown keys are rejected
//! and every violation is reported in one error.
//!
//! Each subcommand writes its outputs plus a `manifest.json` whose embedded
//! config re-runs the command bit-identically via `--manifest`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::{ExitRecord, Scheme};
use crate::error::{Error, Result};
use crate::lab::{
    deviation_grid, kramers_log_mean_exit_domain, kramers_mean_exit_domain, run_experiment,
    stable_exit_law, sweep, ExperimentConfig, PotentialConfig,
};
use crate::noise::stable_scale_constant;
use crate::potential::{validate_potential, ExitDomain};
use crate::split::{rho_gamma_feasible, split_characteristic_check};

/// Keys accepted in a config file.
pub const CONFIG_KEYS: &[&str] = &[
    "potential",
    "m",
    "kappa",
    "domain",
    "a",
    "b",
    "alpha",
    "d",
    "stable",
    "eps",
    "rho",
    "n_paths",
    "seed",
    "scheme",
    "t_max_multiplier",
    "h",
    "x0",
    "workers",
    "tube_c",
    "tube_paths",
];

/// Frequencies at which `validate` checks the split identity.
pub const SPLIT_CHECK_LAMBDAS: &[f64] = &[0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];

/// Column order of `records.csv`.
pub const RECORDS_HEADER: &str = "path_id,stream_id,exit_time,exit_position,pre_jump_position,\
n_large_jumps,exited_at_large_jump,censored";

pub const SWEEP_HEADER: &str = "eps,n_paths,n_uncensored,censored,mean,ci_low,ci_high,ks,\
big_jump_fraction,theory_mean,theory_log_mean,ratio";

pub const DEVIATION_HEADER: &str = "eps,radius,hits,n_paths,estimate,ci_low,ci_high";

#[derive(Debug, Parser)]
#[command(name = "levy-exit", version, about = "First-exit experiments for SDEs with stable Lévy noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment config (flat TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Re-run from the config embedded in a previous manifest.json.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "config")]
    pub manifest: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Closed-form exit laws for every eps.
    Theory,
    /// Monte Carlo exits: records.csv and summary.json per eps.
    Simulate,
    /// Mean exit time across eps with the fitted scaling slope.
    Sweep,
    /// Tube-deviation probabilities across eps.
    Deviation,
    /// Potential, noise and split checks; nonzero status on any failure.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theory => "theory",
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
            Self::Deviation => "deviation",
            Self::Validate => "validate",
        }
    }
}

/// Run metadata written next to every run's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub workers: usize,
    /// The effective config (overrides applied) in config-file syntax.
    pub config: String,
    pub config_echo: Value,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// What a finished command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub manifest: RunManifest,
    /// Names of failed checks (`validate` only).
    pub failed_checks: Vec<String>,
}

struct Reader<'a> {
    table: &'a toml::Table,
    errs: Vec<String>,
    failed: BTreeSet<&'static str>,
}

impl Reader<'_> {
    fn fail(&mut self, key: &'static str, msg: String) {
        self.errs.push(format!("{key}: {msg}"));
        self.failed.insert(key);
    }

    fn float(&mut self, key: &'static str) -> Option<f64> {
        match self.table.get(key)? {
            toml::Value::Float(v) => Some(*v),
            toml::Value::Integer(v) => Some(*v as f64),
            other => {
                self.fail(key, format!("expected a number, got {}", other.type_str()));
                None
            }
        }
    }

    fn uint(&mut self, key: &'static str) -> Option<u64> {
        match self.table.get(key)? {
            toml::Value::Integer(v) if *v >= 0 => Some(*v as u64),
            other => {
                self.fail(key, format!("expected a non-negative integer, got {other}"));
                None
            }
        }
    }

    fn boolean(&mut self, key: &'static str) -> Option<bool> {
        match self.table.get(key)? {
            toml::Value::Boolean(v) => Some(*v),
            other => {
                self.fail(key, format!("expected true or false, got {other}"));
                None
            }
        }
    }

    fn string(&mut self, key: &'static str) -> Option<String> {
        match self.table.get(key)? {
            toml::Value::String(v) => Some(v.clone()),
            other => {
                self.fail(key, format!("expected a string, got {other}"));
                None
            }
        }
    }

    fn float_list(&mut self, key: &'static str) -> Option<Vec<f64>> {
        let num = |v: &toml::Value| match v {
            toml::Value::Float(x) => Some(*x),
            toml::Value::Integer(x) => Some(*x as f64),
            _ => None,
        };
        match self.table.get(key)? {
            toml::Value::Array(items) => {
                let vals: Option<Vec<f64>> = items.iter().map(num).collect();
                if vals.is_none() {
                    self.fail(key, "every entry must be a number".into());
                }
                vals
            }
            v => num(v).map(|x| vec![x]).or_else(|| {
                self.fail(key, format!("expected a number or list of numbers, got {}", v.type_str()));
                None
            }),
        }
    }

    fn required<T>(&mut self, key: &'static str, v: Option<T>) -> Option<T> {
        if v.is_none() && !self.table.contains_key(key) {
            self.fail(key, "missing required key".into());
        }
        v
    }
}

/// Field group a key's errors are reported under by [`ExperimentConfig::validate`].
fn group(key: &str) -> &str {
    match key {
        "m" | "kappa" => "potential",
        "a" | "b" => "domain",
        other => other,
    }
}

/// Parses and validates a config, reporting every violation at once.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(vec![format!("syntax: {}", e.message().trim())]))?;
    let mut r = Reader { table: &table, errs: Vec::new(), failed: BTreeSet::new() };
    let unknown: Vec<String> = table.keys().filter(|k| !CONFIG_KEYS.contains(&k.as_str())).cloned().collect();
    for k in unknown {
        r.errs.push(format!("{k}: unknown key"));
    }

    let mut cfg = ExperimentConfig::new(f64::NAN, Vec::new());

    let potential = r.string("potential");
    let potential = r.required("potential", potential);
    let m = r.float("m").unwrap_or(1.0);
    let kappa = r.float("kappa");
    match potential.as_deref() {
        Some("quadratic") => {
            if kappa.is_some() {
                r.fail("kappa", "only used with potential = \"harmonic_quartic\"".into());
            }
            cfg.potential = PotentialConfig::Quadratic { m };
        }
        Some("harmonic_quartic") => match kappa {
            Some(kappa) => cfg.potential = PotentialConfig::HarmonicQuartic { m, kappa },
            None if !r.failed.contains("kappa") => {
                r.fail("kappa", "required for potential = \"harmonic_quartic\"".into())
            }
            None => {}
        },
        Some(other) => r.fail("potential", format!("unknown potential {other:?}; expected quadratic or harmonic_quartic")),
        None => {}
    }

    let domain = r.string("domain").unwrap_or_else(|| "bounded".into());
    let a = r.float("a");
    let a = r.required("a", a);
    let b = r.float("b");
    match domain.as_str() {
        "bounded" => {
            let b = r.required("b", b);
            if let (Some(a), Some(b)) = (a, b) {
                cfg.domain = ExitDomain::Bounded { a, b };
            }
        }
        "half_line" => {
            if b.is_some() {
                r.fail("b", "a half-line domain has no left boundary".into());
            }
            if let Some(a) = a {
                cfg.domain = ExitDomain::HalfLine { a };
            }
        }
        other => r.fail("domain", format!("unknown domain {other:?}; expected bounded or half_line")),
    }

    let alpha = r.float("alpha");
    if let Some(alpha) = r.required("alpha", alpha) {
        cfg.alpha = alpha;
    }
    let eps = r.float_list("eps");
    if let Some(eps) = r.required("eps", eps) {
        cfg.eps = eps;
    }
    let n_paths = r.uint("n_paths");
    if let Some(n) = r.required("n_paths", n_paths) {
        cfg.n_paths = n;
    }
    let seed = r.uint("seed");
    if let Some(s) = r.required("seed", seed) {
        cfg.seed = s;
    }
    if let Some(v) = r.float("d") {
        cfg.d = v;
    }
    if let Some(v) = r.boolean("stable") {
        cfg.stable = v;
    }
    if let Some(v) = r.float("rho") {
        cfg.rho = v;
    }
    if let Some(s) = r.string("scheme") {
        match s.parse::<Scheme>() {
            Ok(s) => cfg.scheme = s,
            Err(e) => r.fail("scheme", e.to_string()),
        }
    }
    if let Some(v) = r.float("t_max_multiplier") {
        cfg.t_max_multiplier = v;
    }
    cfg.h = r.float("h");
    if let Some(v) = r.float("x0") {
        cfg.x0 = v;
    }
    cfg.workers = r.uint("workers").map(|w| w as usize);
    if let Some(v) = r.float("tube_c") {
        cfg.tube_c = v;
    }
    if let Some(v) = r.uint("tube_paths") {
        cfg.tube_paths = v;
    }

    let Reader { mut errs, failed, .. } = r;
    let blocked: BTreeSet<&str> = failed.iter().map(|k| group(k)).collect();
    if let Err(Error::Config(more)) = cfg.validate() {
        for msg in more {
            let key = msg.split(':').next().unwrap_or_default();
            if !blocked.contains(key) {
                errs.push(msg);
            }
        }
    }
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errs))
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config_str(&text)
}

/// The config in file syntax; [`parse_config_str`] maps it back exactly.
pub fn config_to_toml(cfg: &ExperimentConfig) -> String {
    let mut t = toml::Table::new();
    let mut put = |k: &str, v: toml::Value| {
        t.insert(k.into(), v);
    };
    match cfg.potential {
        PotentialConfig::Quadratic { m } => {
            put("potential", "quadratic".into());
            put("m", m.into());
        }
        PotentialConfig::HarmonicQuartic { m, kappa } => {
            put("potential", "harmonic_quartic".into());
            put("m", m.into());
            put("kappa", kappa.into());
        }
    }
    match cfg.domain {
        ExitDomain::Bounded { a, b } => {
            put("domain", "bounded".into());
            put("a", a.into());
            put("b", b.into());
        }
        ExitDomain::HalfLine { a } => {
            put("domain", "half_line".into());
            put("a", a.into());
        }
    }
    put("alpha", cfg.alpha.into());
    put("d", cfg.d.into());
    put("stable", cfg.stable.into());
    put("eps", toml::Value::Array(cfg.eps.iter().map(|&e| e.into()).collect()));
    put("rho", cfg.rho.into());
    put("n_paths", (cfg.n_paths as i64).into());
    put("seed", (cfg.seed as i64).into());
    put(
        "scheme",
        match cfg.scheme {
            Scheme::Euler => "euler",
            Scheme::JumpAdapted => "jump_adapted",
        }
        .into(),
    );
    put("t_max_multiplier", cfg.t_max_multiplier.into());
    if let Some(h) = cfg.h {
        put("h", h.into());
    }
    put("x0", cfg.x0.into());
    if let Some(w) = cfg.workers {
        put("workers", (w as i64).into());
    }
    put("tube_c", cfg.tube_c.into());
    put("tube_paths", (cfg.tube_paths as i64).into());
    toml::to_string(&t).expect("flat table of scalars serializes")
}

/// 17 significant digits, enough to round-trip any `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// `records.csv` contents, header included.
pub fn records_csv(records: &[ExitRecord]) -> String {
    let mut s = String::with_capacity(128 * (records.len() + 1));
    s.push_str(RECORDS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.path_id,
            r.stream_id,
            fmt_f64(r.exit_time),
            fmt_f64(r.exit_position),
            fmt_opt(r.pre_jump_position),
            r.n_large_jumps,
            r.exited_at_large_jump,
            r.censored
        );
    }
    s
}

struct Writer {
    out: PathBuf,
    written: Vec<String>,
}

impl Writer {
    fn write(&mut self, rel: &str, contents: &str) -> Result<()> {
        let path = self.out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, contents)?;
        self.written.push(rel.to_string());
        Ok(())
    }

    fn json(&mut self, rel: &str, v: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(v)?;
        text.push('\n');
        self.write(rel, &text)
    }
}

fn theory_block(cfg: &ExperimentConfig, eps: f64) -> Result<Value> {
    let p = cfg.potential_spec()?;
    let prediction =
        if cfg.stable { Some(stable_exit_law(cfg.alpha, eps, &cfg.domain, cfg.gamma())?) } else { None };
    Ok(json!({
        "eps": eps,
        "stable": cfg.stable,
        "prediction": prediction,
        "theory_mean": cfg.theory_mean(eps)?,
        "theory_log_mean": cfg.theory_log_mean(eps)?,
        "kramers_mean": kramers_mean_exit_domain(eps, &p, &cfg.domain),
        "kramers_log_mean": kramers_log_mean_exit_domain(eps, &p, &cfg.domain),
    }))
}

fn cmd_theory(cfg: &ExperimentConfig, w: &mut Writer, echo: &Value) -> Result<()> {
    let blocks = cfg.eps.iter().map(|&e| theory_block(cfg, e)).collect::<Result<Vec<_>>>()?;
    w.json("theory.json", &json!({ "theory": blocks, "config": echo }))
}

fn cmd_simulate(cfg: &ExperimentConfig, w: &mut Writer, echo: &Value) -> Result<()> {
    for j in 0..cfg.eps.len() {
        let run = run_experiment(cfg, j)?;
        let dir = if cfg.eps.len() == 1 { String::new() } else { format!("eps_{j}/") };
        w.write(&format!("{dir}records.csv"), &records_csv(&run.records))?;
        let mut theory = theory_block(cfg, run.eps)?;
        theory["mean_ratio"] = json!(run.summary.mean / run.theory_mean);
        let mut empirical = serde_json::to_value(run.summary)?;
        empirical["clamped_count"] = json!(run.records.iter().filter(|r| r.clamped).count());
        let summary = json!({
            "eps": run.eps,
            "eps_index": j,
            "stream_base": run.stream_base,
            "t_max": run.t_max,
            "empirical": empirical,
            "theory": theory,
            "warnings": run.warnings,
            "config": echo,
        });
        w.json(&format!("{dir}summary.json"), &summary)?;
    }
    Ok(())
}

fn cmd_sweep(cfg: &ExperimentConfig, w: &mut Writer, echo: &Value) -> Result<()> {
    let table = sweep(cfg)?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.eps),
            r.n_paths,
            r.n_uncensored,
            r.censored,
            fmt_opt(r.mean),
            fmt_opt(r.ci_low),
            fmt_opt(r.ci_high),
            fmt_opt(r.ks),
            fmt_opt(r.big_jump_fraction),
            fmt_f64(r.theory_mean),
            fmt_f64(r.theory_log_mean),
            fmt_opt(r.ratio)
        );
    }
    w.write("sweep.csv", &csv)?;
    let p = cfg.potential_spec()?;
    let summary = json!({
        "empirical": {
            "loglog_slope": table.loglog_slope,
            "kramers_slope": table.kramers_slope,
        },
        "theory": {
            "loglog_slope": table.theory_loglog_slope,
            "kramers_slope": table.theory_kramers_slope,
            "expected_loglog_slope": cfg.stable.then_some(-cfg.alpha),
            "expected_kramers_slope": (!cfg.stable).then(|| 2.0 * p.u(cfg.domain.a()).min(cfg.domain.b().map_or(f64::INFINITY, |b| p.u(-b)))),
        },
        "rows": table.rows,
        "config": echo,
    });
    w.json("summary.json", &summary)
}

fn cmd_deviation(cfg: &ExperimentConfig, w: &mut Writer, echo: &Value) -> Result<()> {
    let table = deviation_grid(cfg)?;
    let mut csv = String::from(DEVIATION_HEADER);
    csv.push('\n');
    for r in &table.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.eps),
            fmt_f64(r.radius),
            r.hits,
            r.n_paths,
            fmt_f64(r.estimate),
            fmt_f64(r.ci_low),
            fmt_f64(r.ci_high)
        );
    }
    w.write("deviation.csv", &csv)?;
    let summary = json!({
        "empirical": { "exponent": table.exponent, "rows": table.rows },
        "theory": { "gamma": table.gamma, "c": table.c, "bound_exponent": table.bound_exponent },
        "config": echo,
    });
    w.json("summary.json", &summary)
}

fn cmd_validate(cfg: &ExperimentConfig, w: &mut Writer, echo: &Value) -> Result<Vec<String>> {
    let mut checks: Vec<(String, bool, String)> = Vec::new();
    let p = cfg.potential_spec()?;
    for c in validate_potential(&p, &cfg.domain).checks {
        checks.push((format!("potential.{}", c.name), c.passed, c.detail));
    }
    match stable_scale_constant(cfg.alpha) {
        Ok(c) => checks.push(("noise.scale_constant".into(), c.is_finite() && c > 0.0, format!("C = {c}"))),
        Err(e) => checks.push(("noise.scale_constant".into(), false, e.to_string())),
    }
    let noise = cfg.noise()?;
    for (j, &eps) in cfg.eps.iter().enumerate() {
        let split = cfg.split(eps)?;
        let report = split_characteristic_check(&split, &noise, SPLIT_CHECK_LAMBDAS)?;
        let worst = report.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
        checks.push((
            format!("split.identity[{j}]"),
            report.passed,
            format!("eps = {eps}: max |psi_xi + psi_eta - psi_L| = {worst:e} (tol {:e})", report.tolerance),
        ));
    }
    let f = rho_gamma_feasible(cfg.alpha, cfg.rho, cfg.gamma());
    let detail = if f.feasible {
        format!("rho = {}, gamma = {}", cfg.rho, cfg.gamma())
    } else {
        f.violations.join("; ")
    };
    checks.push(("split.rho_gamma_feasible".into(), f.feasible, detail));

    let failed: Vec<String> = checks.iter().filter(|c| !c.1).map(|c| c.0.clone()).collect();
    let list: Vec<Value> =
        checks.iter().map(|(n, ok, d)| json!({ "name": n, "passed": ok, "detail": d })).collect();
    w.json("validate.json", &json!({ "passed": failed.is_empty(), "checks": list, "config": echo }))?;
    Ok(failed)
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match (&cli.config, &cli.manifest) {
        (Some(path), _) => parse_config(path)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
            let m: RunManifest = serde_json::from_str(&text)?;
            parse_config_str(&m.config)?
        }
        (None, None) => return Err(Error::Config(vec!["one of --config or --manifest is required".into()])),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.workers {
        cfg.workers = Some(n as usize);
    }
    Ok(cfg)
}

/// Runs one subcommand, writing its outputs and `manifest.json` under `cli.out`.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let started = Instant::now();
    let cfg = load_config(cli)?;
    let mut echo = serde_json::to_value(&cfg)?;
    // results do not depend on the pool size, so data files leave it out
    if let Some(obj) = echo.as_object_mut() {
        obj.remove("workers");
    }
    let mut w = Writer { out: cli.out.clone(), written: Vec::new() };
    fs::create_dir_all(&cli.out)?;
    let failed_checks = match cli.command {
        Command::Theory => cmd_theory(&cfg, &mut w, &echo).map(|_| Vec::new()),
        Command::Simulate => cmd_simulate(&cfg, &mut w, &echo).map(|_| Vec::new()),
        Command::Sweep => cmd_sweep(&cfg, &mut w, &echo).map(|_| Vec::new()),
        Command::Deviation => cmd_deviation(&cfg, &mut w, &echo).map(|_| Vec::new()),
        Command::Validate => cmd_validate(&cfg, &mut w, &echo),
    }?;
    let workers = cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let manifest = RunManifest {
        command: cli.command.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        workers,
        config: config_to_toml(&cfg),
        config_echo: serde_json::to_value(&cfg)?,
        outputs: w.written.clone(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    w.json("manifest.json", &serde_json::to_value(&manifest)?)?;
    Ok(Outcome { manifest, failed_checks })
}

/// Machine-readable error report for stderr.
pub fn error_json(err: &Error) -> Value {
    let (kind, details) = match err {
        Error::Domain(_) => ("domain", Vec::new()),
        Error::Precondition(_) => ("precondition", Vec::new()),
        Error::Integration(_) => ("integration", Vec::new()),
        Error::Censored(_) => ("censored", Vec::new()),
        Error::InsufficientData { .. } => ("insufficient_data", Vec::new()),
        Error::Config(msgs) => ("config", msgs.clone()),
        Error::Io(_) => ("io", Vec::new()),
        Error::Json(_) => ("json", Vec::new()),
    };
    json!({ "error": { "kind": kind, "message": err.to_string(), "details": details } })
}

/// Parses `args`, runs the command and returns the process exit status:
/// 0 on success, 1 on a failed run or failed checks, 2 on bad usage or config.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let report = json!({ "error": { "kind": "usage", "message": e.to_string().trim(), "details": [] } });
            eprintln!("{report}");
            return 2;
        }
    };
    match run(&cli) {
        Ok(outcome) if outcome.failed_checks.is_empty() => 0,
        Ok(outcome) => {
            let report = json!({ "error": {
                "kind": "validation",
                "message": format!("{} check(s) failed", outcome.failed_checks.len()),
                "details": outcome.failed_checks,
            }});
            eprintln!("{report}");
            1
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            if matches!(e, Error::Config(_)) {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "potential = \"quadratic\"\na = 1\nb = 1\nalpha = 1\neps = [0.05]\nn_paths = 100\nseed = 7\n";

    fn config_errors(text: &str) -> Vec<String> {
        match parse_config_str(text) {
            Err(Error::Config(v)) => v,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_parses() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.alpha, 1.0);
        assert_eq!(cfg.eps, vec![0.05]);
        assert_eq!(cfg.n_paths, 100);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.domain, ExitDomain::Bounded { a: 1.0, b: 1.0 });
    }

    #[test]
    fn alpha_out_of_range_names_the_constraint() {
        let errs = config_errors(&MINIMAL.replace("alpha = 1", "alpha = 2.5"));
        assert_eq!(errs.len(), 1, "{errs:?}");
        assert!(errs[0].starts_with("alpha:") && errs[0].contains("(0,2)"), "{errs:?}");
    }

    #[test]
    fn half_line_quadratic_cites_growth() {
        let errs = config_errors(&MINIMAL.replace("b = 1\n", "domain = \"half_line\"\n"));
        assert!(errs.iter().any(|e| e.contains("growth")), "{errs:?}");
    }

    #[test]
    fn every_violation_reported_at_once() {
        let text = "potential = \"cubic\"\na = \"one\"\nalpha = 3\nn_paths = -1\nfoo = 1\nbar = 2\n";
        let errs = config_errors(text);
        for key in ["foo:", "bar:", "potential:", "a:", "alpha:", "eps:", "n_paths:", "seed:"] {
            assert!(errs.iter().any(|e| e.starts_with(key)), "{key} missing in {errs:?}");
        }
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let mut cfg = parse_config_str(MINIMAL).unwrap();
        cfg.eps = vec![0.1, 1.0 / 3.0, 0.02];
        cfg.h = Some(1e-3 / 7.0);
        cfg.workers = Some(3);
        cfg.scheme = Scheme::JumpAdapted;
        let back = parse_config_str(&config_to_toml(&cfg)).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn csv_floats_round_trip() {
        let r = ExitRecord {
            path_id: 3,
            stream_id: 9,
            exit_time: 0.1 + 0.2,
            exit_position: -1.0 / 3.0,
            pre_jump_position: None,
            n_large_jumps: 2,
            exited_at_large_jump: false,
            censored: true,
            clamped: false,
        };
        let csv = records_csv(&[r]);
        let line = csv.lines().nth(1).unwrap();
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 8);
        assert_eq!(cols[2].parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(cols[3].parse::<f64>().unwrap(), -1.0 / 3.0);
        assert_eq!(cols[4], "");
        assert_eq!(&cols[5..], ["2", "false", "true"]);
    }
}
