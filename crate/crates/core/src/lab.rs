//! Closed-form exit laws, the Monte Carlo experiment harness and sweeps.
//!
//! In the small-noise limit the first exit time from `[-b, a]` is
//! exponential with rate `ε^α θ/α`, `θ = a^{-α} + b^{-α}` (only `a^{-α}` on
//! the half-line `(-∞, a]`). The Brownian comparison is Kramers' mean
//! `ε√π / (U'(a)√U''(0)) · e^{2U(a)/ε²}`, exponential in `ε^{-2}` instead
//! of polynomial in `ε^{-1}`.

use serde::Serialize;

use crate::engine::{
    default_step, gamma_default, simulate_ensemble, tube_deviation_prob, DeviationEstimate,
    ExitRecord, PathParams, Scheme, TubeParams,
};
use crate::error::{Error, Result};
use crate::noise::StableNoiseSpec;
use crate::potential::{validate_potential, ExitDomain, PotentialSpec};
use crate::split::SplitSpec;
use crate::stats::{ks_exponential_times, mean_sd, ols, KS_MIN_SAMPLES};

/// `θ = 1/a^α + 1/b^α`, or `1/a^α` on a half-line.
pub fn theta(dom: &ExitDomain, alpha: f64) -> f64 {
    match *dom {
        ExitDomain::Bounded { a, b } => a.powf(-alpha) + b.powf(-alpha),
        ExitDomain::HalfLine { a } => a.powf(-alpha),
    }
}

/// Limiting exponential exit law for one `(α, ε, domain)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryPrediction {
    pub alpha: f64,
    pub eps: f64,
    pub theta: f64,
    /// `ε^α θ / α`
    pub rate: f64,
    /// `1 / rate`
    pub mean: f64,
    /// Correction exponent `min{α/2, γ/2}`.
    pub delta: f64,
    pub gamma: f64,
}

impl TheoryPrediction {
    /// `P(σ > u) = e^{-u·rate}`.
    pub fn survival(&self, u: f64) -> f64 {
        (-u * self.rate).exp()
    }
}

pub fn stable_exit_law(alpha: f64, eps: f64, dom: &ExitDomain, gamma: f64) -> Result<TheoryPrediction> {
    crate::noise::check_alpha(alpha)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be > 0, got {eps}")));
    }
    let th = theta(dom, alpha);
    let rate = eps.powf(alpha) * th / alpha;
    Ok(TheoryPrediction {
        alpha,
        eps,
        theta: th,
        rate,
        mean: 1.0 / rate,
        delta: (alpha / 2.0).min(gamma / 2.0),
        gamma,
    })
}

/// Lower and upper bounding survival curves
/// `exp{-u·rate(1 ± Cε^δ)}(1 ∓ Cε^δ)` at time `u`.
pub fn exit_law_sandwich(u: f64, eps: f64, pred: &TheoryPrediction, c: f64) -> (f64, f64) {
    let k = c * eps.powf(pred.delta);
    let lower = (-u * pred.rate * (1.0 + k)).exp() * (1.0 - k);
    let upper = (-u * pred.rate * (1.0 - k)).exp() * (1.0 + k);
    (lower, upper)
}

/// Empirical survival below this level is too coarse to test against the
/// sandwich (after the largest sample it is exactly 0).
pub const SANDWICH_MIN_SURVIVAL: f64 = 0.01;

/// Smallest `C` for which the empirical survival function of `times` lies
/// inside [`exit_law_sandwich`] at every sample point (both one-sided
/// limits) where the empirical survival is still at least `min_survival`.
pub fn fit_sandwich_constant(times: &[f64], pred: &TheoryPrediction, min_survival: f64) -> f64 {
    let mut xs = times.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let inside = |c: f64| {
        xs.iter().enumerate().take_while(|(i, _)| (n - (*i + 1) as f64) / n >= min_survival).all(|(i, &t)| {
            let (lo, hi) = exit_law_sandwich(t, pred.eps, pred, c);
            let before = (n - i as f64) / n;
            let after = (n - (i + 1) as f64) / n;
            let tol = 1e-12;
            before <= hi + tol && before >= lo - tol && after <= hi + tol && after >= lo - tol
        })
    };
    if xs.is_empty() || inside(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while !inside(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Kramers' mean exit time over the barrier at `a`:
/// `ε√π / (U'(a)√U''(0)) · e^{2U(a)/ε²}`.
pub fn kramers_mean_exit(eps: f64, p: &PotentialSpec, a: f64) -> f64 {
    eps * std::f64::consts::PI.sqrt() / (p.du(a).abs() * p.curvature().sqrt())
        * (2.0 * p.u(a) / (eps * eps)).exp()
}

/// Natural log of [`kramers_mean_exit`]; finite where the mean overflows.
pub fn kramers_log_mean_exit(eps: f64, p: &PotentialSpec, a: f64) -> f64 {
    (eps * std::f64::consts::PI.sqrt() / (p.du(a).abs() * p.curvature().sqrt())).ln()
        + 2.0 * p.u(a) / (eps * eps)
}

/// Kramers' mean over the lower of the two barriers of the domain.
pub fn kramers_mean_exit_domain(eps: f64, p: &PotentialSpec, dom: &ExitDomain) -> f64 {
    match *dom {
        ExitDomain::Bounded { a, b } if p.u(-b) < p.u(a) => kramers_mean_exit(eps, p, -b),
        _ => kramers_mean_exit(eps, p, dom.a()),
    }
}

/// [`kramers_log_mean_exit`] over the lower of the two barriers.
pub fn kramers_log_mean_exit_domain(eps: f64, p: &PotentialSpec, dom: &ExitDomain) -> f64 {
    match *dom {
        ExitDomain::Bounded { a, b } if p.u(-b) < p.u(a) => kramers_log_mean_exit(eps, p, -b),
        _ => kramers_log_mean_exit(eps, p, dom.a()),
    }
}

/// Empirical summary of an exit-time ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatsSummary {
    pub n: usize,
    pub n_uncensored: usize,
    pub censored_count: usize,
    /// Mean of the uncensored exit times.
    pub mean: f64,
    pub std_error: f64,
    /// 95% interval, normal on the log scale: `mean · exp(±1.96·se/mean)`.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Fitted-rate KS distance on the uncensored exits (needs 30+).
    pub ks_statistic: Option<f64>,
    /// Fraction of uncensored exits caused by a large jump.
    pub big_jump_exit_fraction: f64,
    /// Fraction of large-jump exits with `|pre_jump_position| <= 2ε^γ`.
    pub near_origin_fraction: Option<f64>,
    pub insufficient_data: bool,
}

pub fn summarize(records: &[ExitRecord], near_origin_radius: f64) -> StatsSummary {
    let times: Vec<f64> = records.iter().filter(|r| !r.censored).map(|r| r.exit_time).collect();
    let n_unc = times.len();
    let (mean, sd) = mean_sd(&times);
    let se = sd / (n_unc as f64).sqrt();
    let z = 1.959_963_984_540_054;
    let (ci_low, ci_high) = if n_unc >= 2 && mean > 0.0 {
        let spread = (z * se / mean).exp();
        (mean / spread, mean * spread)
    } else {
        (f64::NAN, f64::NAN)
    };
    let big: Vec<&ExitRecord> =
        records.iter().filter(|r| !r.censored && r.exited_at_large_jump).collect();
    let near_origin_fraction = (!big.is_empty()).then(|| {
        big.iter()
            .filter(|r| r.pre_jump_position.is_some_and(|x| x.abs() <= near_origin_radius))
            .count() as f64
            / big.len() as f64
    });
    StatsSummary {
        n: records.len(),
        n_uncensored: n_unc,
        censored_count: records.len() - n_unc,
        mean,
        std_error: se,
        ci_low,
        ci_high,
        ks_statistic: ks_exponential_times(&times).ok(),
        big_jump_exit_fraction: if n_unc == 0 { f64::NAN } else { big.len() as f64 / n_unc as f64 },
        near_origin_fraction,
        insufficient_data: n_unc < KS_MIN_SAMPLES,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PotentialConfig {
    Quadratic { m: f64 },
    HarmonicQuartic { m: f64, kappa: f64 },
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec> {
        match *self {
            Self::Quadratic { m } => PotentialSpec::quadratic(m),
            Self::HarmonicQuartic { m, kappa } => PotentialSpec::harmonic_quartic(m, kappa),
        }
    }
}

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub potential: PotentialConfig,
    pub domain: ExitDomain,
    pub alpha: f64,
    pub d: f64,
    /// `false` switches to the Brownian-only comparison.
    pub stable: bool,
    pub eps: Vec<f64>,
    pub rho: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub scheme: Scheme,
    /// Censoring horizon as a multiple of the predicted mean exit time.
    pub t_max_multiplier: f64,
    pub h: Option<f64>,
    pub x0: f64,
    pub workers: Option<usize>,
    /// Tube radius multiplier for deviation runs.
    pub tube_c: f64,
    pub tube_paths: u64,
}

impl ExperimentConfig {
    /// Defaults for a stable run on `[-1, 1]` with `U = x²/2`.
    pub fn new(alpha: f64, eps: Vec<f64>) -> Self {
        Self {
            potential: PotentialConfig::Quadratic { m: 1.0 },
            domain: ExitDomain::Bounded { a: 1.0, b: 1.0 },
            alpha,
            d: 0.0,
            stable: true,
            eps,
            rho: crate::split::DEFAULT_RHO,
            n_paths: 1000,
            seed: 0,
            scheme: Scheme::Euler,
            t_max_multiplier: 20.0,
            h: None,
            x0: 0.0,
            workers: None,
            tube_c: 1.0,
            tube_paths: 5000,
        }
    }

    /// Every violated constraint, collected before any simulation runs.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let potential = match self.potential.build() {
            Ok(p) => Some(p),
            Err(e) => {
                errs.push(format!("potential: {e}"));
                None
            }
        };
        match self.domain {
            ExitDomain::Bounded { a, b } => {
                if let Err(e) = ExitDomain::bounded(a, b) {
                    errs.push(format!("domain: {e}"));
                }
            }
            ExitDomain::HalfLine { a } => {
                if let Err(e) = ExitDomain::half_line(a) {
                    errs.push(format!("domain: {e}"));
                }
            }
        }
        if let Err(e) = crate::noise::check_alpha(self.alpha) {
            errs.push(format!("alpha: {e}"));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            errs.push(format!("d: Brownian weight must be >= 0, got {}", self.d));
        } else if self.d == 0.0 && !self.stable {
            errs.push("d: Brownian-only mode (stable = false) needs d > 0".into());
        }
        if self.eps.is_empty() {
            errs.push("eps: at least one noise intensity is required".into());
        }
        for &e in &self.eps {
            if !(e > 0.0 && e.is_finite()) {
                errs.push(format!("eps: every value must be > 0, got {e}"));
            }
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            errs.push(format!("rho: must lie in (0,1), got {}", self.rho));
        }
        if !(self.t_max_multiplier > 0.0 && self.t_max_multiplier.is_finite()) {
            errs.push(format!("t_max_multiplier: must be > 0, got {}", self.t_max_multiplier));
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                errs.push(format!("h: step must be > 0, got {h}"));
            }
        }
        if !self.x0.is_finite() || !self.domain.contains(self.x0) {
            errs.push(format!("x0: initial point {} must lie inside the domain", self.x0));
        }
        if self.workers == Some(0) {
            errs.push("workers: must be >= 1".into());
        }
        if !(self.tube_c > 0.0) {
            errs.push(format!("tube_c: must be > 0, got {}", self.tube_c));
        }
        if let Some(p) = &potential {
            if errs.iter().all(|e| !e.starts_with("domain")) {
                let report = validate_potential(p, &self.domain);
                for c in report.failures() {
                    let what = if c.name == "growth" {
                        "half-line domain violates the regularity (growth) condition"
                    } else {
                        "potential check failed"
                    };
                    errs.push(format!("potential: {what}: {} ({})", c.name, c.detail));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        self.potential.build()
    }

    pub fn noise(&self) -> Result<StableNoiseSpec> {
        StableNoiseSpec::new(self.alpha, self.d, self.stable)
    }

    pub fn split(&self, eps: f64) -> Result<SplitSpec> {
        SplitSpec::new(self.alpha, eps, self.rho)
    }

    pub fn gamma(&self) -> f64 {
        gamma_default(self.alpha)
    }

    pub fn step(&self) -> Result<f64> {
        Ok(self.h.unwrap_or(default_step(self.potential_spec()?.curvature())))
    }

    /// Predicted mean exit time: the stable law, or Kramers in Brownian mode.
    pub fn theory_mean(&self, eps: f64) -> Result<f64> {
        if self.stable {
            Ok(stable_exit_law(self.alpha, eps, &self.domain, self.gamma())?.mean)
        } else {
            Ok(kramers_mean_exit_domain(eps, &self.potential_spec()?, &self.domain))
        }
    }

    /// `ln` of [`Self::theory_mean`], finite where the Kramers mean overflows.
    pub fn theory_log_mean(&self, eps: f64) -> Result<f64> {
        if self.stable {
            Ok(self.theory_mean(eps)?.ln())
        } else {
            Ok(kramers_log_mean_exit_domain(eps, &self.potential_spec()?, &self.domain))
        }
    }

    pub fn path_params(&self, eps: f64) -> Result<PathParams> {
        let t_max = self.t_max_multiplier * self.theory_mean(eps)?;
        Ok(PathParams::new(eps, self.step()?, t_max, self.scheme, self.split(eps)?)?.with_x0(self.x0))
    }
}

/// Records, summary and theory for one noise intensity.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRun {
    pub eps: f64,
    pub eps_index: usize,
    pub stream_base: u64,
    pub t_max: f64,
    #[serde(skip)]
    pub records: Vec<ExitRecord>,
    pub summary: StatsSummary,
    /// Stable-mode prediction (absent in Brownian mode).
    pub prediction: Option<TheoryPrediction>,
    /// Kramers' mean over the lower barrier.
    pub kramers_mean: f64,
    pub theory_mean: f64,
    pub warnings: Vec<String>,
}

/// Streams of `eps[j]` start at `j << 40`.
pub fn stream_base(eps_index: usize) -> u64 {
    (eps_index as u64) << 40
}

/// Simulates `cfg.n_paths` exits at `cfg.eps[eps_index]`.
pub fn run_experiment(cfg: &ExperimentConfig, eps_index: usize) -> Result<ExperimentRun> {
    cfg.validate()?;
    let eps = *cfg.eps.get(eps_index).ok_or_else(|| {
        Error::Config(vec![format!("eps index {eps_index} out of range ({} values)", cfg.eps.len())])
    })?;
    let p = cfg.potential_spec()?;
    let noise = cfg.noise()?;
    let pp = cfg.path_params(eps)?;
    let theory_mean = cfg.theory_mean(eps)?;
    let prediction =
        if cfg.stable { Some(stable_exit_law(cfg.alpha, eps, &cfg.domain, cfg.gamma())?) } else { None };
    let base = stream_base(eps_index);
    let records =
        simulate_ensemble(&p, &cfg.domain, &noise, &pp, cfg.seed, base, cfg.n_paths, cfg.workers)?;
    let summary = summarize(&records, 2.0 * eps.powf(cfg.gamma()));
    Ok(ExperimentRun {
        eps,
        eps_index,
        stream_base: base,
        t_max: pp.t_max,
        records,
        summary,
        prediction,
        kramers_mean: kramers_mean_exit_domain(eps, &p, &cfg.domain),
        theory_mean,
        warnings: pp.warnings(Some(theory_mean)),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub n_paths: u64,
    pub n_uncensored: usize,
    pub censored: usize,
    pub mean: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub ks: Option<f64>,
    pub big_jump_fraction: Option<f64>,
    pub theory_mean: f64,
    pub theory_log_mean: f64,
    /// Empirical over theoretical mean.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub stable: bool,
    pub rows: Vec<SweepRow>,
    /// Slope of `ln(mean)` against `ln ε` (stable mode; expected `-α`).
    pub loglog_slope: Option<f64>,
    /// Slope of `ln(mean)` against `ε^{-2}` (Brownian mode; expected `2U(a)`).
    pub kramers_slope: Option<f64>,
    /// The same slopes computed from the theory column.
    pub theory_loglog_slope: Option<f64>,
    pub theory_kramers_slope: Option<f64>,
}

/// Runs every `eps` of the config and fits the scaling slopes.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    cfg.validate()?;
    if cfg.eps.len() < 2 {
        return Err(Error::Config(vec!["eps: a sweep needs at least two values".into()]));
    }
    let mut rows = Vec::with_capacity(cfg.eps.len());
    for (j, &eps) in cfg.eps.iter().enumerate() {
        let theory_mean = cfg.theory_mean(eps)?;
        let theory_log_mean = cfg.theory_log_mean(eps)?;
        let row = if cfg.n_paths == 0 {
            SweepRow {
                eps,
                n_paths: 0,
                n_uncensored: 0,
                censored: 0,
                mean: None,
                ci_low: None,
                ci_high: None,
                ks: None,
                big_jump_fraction: None,
                theory_mean,
                theory_log_mean,
                ratio: None,
            }
        } else {
            let run = run_experiment(cfg, j)?;
            let s = run.summary;
            let finite = |v: f64| v.is_finite().then_some(v);
            SweepRow {
                eps,
                n_paths: cfg.n_paths,
                n_uncensored: s.n_uncensored,
                censored: s.censored_count,
                mean: finite(s.mean),
                ci_low: finite(s.ci_low),
                ci_high: finite(s.ci_high),
                ks: s.ks_statistic,
                big_jump_fraction: finite(s.big_jump_exit_fraction),
                theory_mean,
                theory_log_mean,
                ratio: finite(s.mean / theory_mean),
            }
        };
        rows.push(row);
    }

    let (emp_x, emp_y): (Vec<f64>, Vec<f64>) =
        rows.iter().filter_map(|r| r.mean.filter(|m| *m > 0.0).map(|m| (r.eps, m.ln()))).unzip();
    let th_x: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let th_y: Vec<f64> = rows.iter().map(|r| r.theory_log_mean).collect();
    let log = |v: &[f64]| v.iter().map(|e| e.ln()).collect::<Vec<_>>();
    let inv_sq = |v: &[f64]| v.iter().map(|e| e.powi(-2)).collect::<Vec<_>>();
    let (loglog_slope, kramers_slope, theory_loglog_slope, theory_kramers_slope) = if cfg.stable {
        (
            ols(&log(&emp_x), &emp_y).map(|f| f.0),
            None,
            ols(&log(&th_x), &th_y).map(|f| f.0),
            None,
        )
    } else {
        (
            None,
            ols(&inv_sq(&emp_x), &emp_y).map(|f| f.0),
            None,
            ols(&inv_sq(&th_x), &th_y).map(|f| f.0),
        )
    };
    Ok(SweepTable {
        stable: cfg.stable,
        rows,
        loglog_slope,
        kramers_slope,
        theory_loglog_slope,
        theory_kramers_slope,
    })
}

/// Tube-deviation estimates over the config's `eps` list.
#[derive(Debug, Clone, Serialize)]
pub struct DeviationTable {
    pub gamma: f64,
    pub c: f64,
    pub rows: Vec<DeviationEstimate>,
    /// Slope of `ln((hits + ½)/(n + 1))` against `ln ε`. The Anscombe
    /// correction keeps the log finite when a run sees no hits; it raises
    /// small counts the most, so the fitted exponent errs low.
    pub exponent: Option<f64>,
    /// `(α+γ)/2`, the exponent of the bound `Cε^{(α+γ)/2}`.
    pub bound_exponent: f64,
}

/// Runs [`tube_deviation_prob`] at every `eps` of the config with
/// `cfg.tube_paths` paths, radius `cfg.tube_c · ε^γ` and the default `γ`.
/// Entry `j` uses streams from [`stream_base`]`(j)`.
pub fn deviation_grid(cfg: &ExperimentConfig) -> Result<DeviationTable> {
    cfg.validate()?;
    let p = cfg.potential_spec()?;
    let noise = cfg.noise()?;
    let gamma = cfg.gamma();
    let tube = TubeParams { c: cfg.tube_c, gamma, h: cfg.step()?, x0: cfg.x0 };
    let mut rows = Vec::with_capacity(cfg.eps.len());
    for (j, &eps) in cfg.eps.iter().enumerate() {
        let split = cfg.split(eps)?;
        rows.push(tube_deviation_prob(
            &p,
            &split,
            &noise,
            &tube,
            cfg.tube_paths,
            cfg.seed,
            stream_base(j),
            cfg.workers,
        )?);
    }
    let exponent = if rows.len() >= 2 && cfg.tube_paths > 0 {
        let x: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
        let y: Vec<f64> =
            rows.iter().map(|r| ((r.hits as f64 + 0.5) / (r.n_paths as f64 + 1.0)).ln()).collect();
        ols(&x, &y).map(|f| f.0)
    } else {
        None
    };
    Ok(DeviationTable { gamma, c: cfg.tube_c, rows, exponent, bound_exponent: (cfg.alpha + gamma) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_examples() {
        let unit = ExitDomain::bounded(1.0, 1.0).unwrap();
        for alpha in [0.3, 1.0, 1.8] {
            assert_eq!(theta(&unit, alpha), 2.0);
        }
        assert_eq!(theta(&ExitDomain::half_line(2.0).unwrap(), 1.0), 0.5);
        let wide = ExitDomain::bounded(2.0, 1e12).unwrap();
        assert!((theta(&wide, 1.0) - 0.5).abs() < 1e-11);
    }

    #[test]
    fn stable_law_examples() {
        let unit = ExitDomain::bounded(1.0, 1.0).unwrap();
        let p = stable_exit_law(1.0, 0.1, &unit, 0.2).unwrap();
        assert!((p.mean - 5.0).abs() < 1e-12);
        assert!((p.mean * p.rate - 1.0).abs() < 1e-15);
        assert!((p.survival(p.mean) - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(p.survival(0.0), 1.0);
        assert!((p.delta - 0.1).abs() < 1e-15);
        let half = stable_exit_law(1.0, 0.1, &ExitDomain::half_line(2.0).unwrap(), 0.2).unwrap();
        assert!((half.mean - 20.0).abs() < 1e-12);
    }

    #[test]
    fn mean_monotone_in_eps_and_theta() {
        let mut prev = f64::INFINITY;
        let unit = ExitDomain::bounded(1.0, 1.0).unwrap();
        for k in 1..50 {
            let eps = k as f64 * 0.01;
            let m = stable_exit_law(1.3, eps, &unit, 0.14).unwrap().mean;
            assert!(m < prev);
            prev = m;
        }
        let mut prev = f64::INFINITY;
        for k in 1..20 {
            let b = 2.0 - 0.09 * k as f64;
            let dom = ExitDomain::bounded(1.0, b).unwrap();
            let m = stable_exit_law(1.3, 0.05, &dom, 0.14).unwrap().mean;
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn sandwich_examples() {
        let unit = ExitDomain::bounded(1.0, 1.0).unwrap();
        let p = stable_exit_law(1.0, 0.05, &unit, 0.2).unwrap();
        let (lo, hi) = exit_law_sandwich(3.7, 0.05, &p, 0.0);
        assert_eq!(lo, p.survival(3.7));
        assert_eq!(hi, p.survival(3.7));
        let k = 0.5 * 0.05f64.powf(p.delta);
        let (lo, hi) = exit_law_sandwich(0.0, 0.05, &p, 0.5);
        assert!((lo - (1.0 - k)).abs() < 1e-15 && (hi - (1.0 + k)).abs() < 1e-15);
        for u in [0.0, 1.0, 10.0, 100.0] {
            let (lo, hi) = exit_law_sandwich(u, 0.05, &p, 0.3);
            assert!(lo <= hi);
        }
    }

    #[test]
    fn sandwich_fit_is_tight() {
        let unit = ExitDomain::bounded(1.0, 1.0).unwrap();
        let p = stable_exit_law(1.0, 0.05, &unit, 0.2).unwrap();
        // exact exponential quantiles: fitted C small but positive
        let n = 500;
        let times: Vec<f64> =
            (0..n).map(|i| -p.mean * (1.0 - (i as f64 + 0.5) / n as f64).ln()).collect();
        let c = fit_sandwich_constant(&times, &p, SANDWICH_MIN_SURVIVAL);
        // ECDF steps of 1/n = 0.002 against survival down to 1%
        assert!(c > 0.0 && c < 0.05, "{c}");
        let (lo, hi) = exit_law_sandwich(times[10], 0.05, &p, c);
        assert!(lo <= 1.0 - 10.0 / n as f64 + 1e-12 && hi >= 1.0 - 11.0 / n as f64 - 1e-12);
        // without the cut the empty tail forces the lower curve to zero
        let all = fit_sandwich_constant(&times, &p, 0.0);
        assert!((all * 0.05f64.powf(p.delta) - 1.0).abs() < 1e-3, "{all}");
    }

    #[test]
    fn kramers_examples() {
        let p = PotentialSpec::quadratic(1.0).unwrap();
        let k = kramers_mean_exit(0.5, &p, 1.0);
        assert!((k - 0.5 * std::f64::consts::PI.sqrt() * 4f64.exp()).abs() < 1e-9);
        assert!((k - 48.386).abs() < 1e-3);
        for eps in [0.1, 0.05, 0.02, 0.005] {
            let log_mean = kramers_log_mean_exit(eps, &p, 1.0);
            if eps >= 0.05 {
                assert!((log_mean - kramers_mean_exit(eps, &p, 1.0).ln()).abs() < 1e-9);
            }
            let lhs = eps * eps * log_mean;
            assert!((lhs - 1.0).abs() < 0.1 * eps.sqrt() + 1e-3);
        }
        // doubling U(a) squares the exponential factor
        let p2 = PotentialSpec::quadratic(2.0).unwrap();
        let eps: f64 = 0.6;
        let f1 = (2.0 * p.u(1.0) / (eps * eps)).exp();
        let ratio = kramers_mean_exit(eps, &p2, 1.0) / kramers_mean_exit(eps, &p, 1.0);
        let pref = p.du(1.0) * p.curvature().sqrt() / (p2.du(1.0) * p2.curvature().sqrt());
        assert!((ratio / pref - f1).abs() < 1e-9 * f1);
    }

    #[test]
    fn half_line_quadratic_config_rejected() {
        let mut cfg = ExperimentConfig::new(1.0, vec![0.05]);
        cfg.domain = ExitDomain::HalfLine { a: 1.0 };
        let Err(Error::Config(errs)) = cfg.validate() else { panic!("accepted") };
        assert!(errs.iter().any(|e| e.contains("growth")), "{errs:?}");
    }

    #[test]
    fn every_violation_reported() {
        let mut cfg = ExperimentConfig::new(2.5, vec![-0.1]);
        cfg.rho = 1.5;
        cfg.workers = Some(0);
        let Err(Error::Config(errs)) = cfg.validate() else { panic!("accepted") };
        assert!(errs.len() >= 4, "{errs:?}");
        assert!(errs.iter().any(|e| e.contains("(0,2)")));
    }

    #[test]
    fn empty_run_flags_insufficient_data() {
        let mut cfg = ExperimentConfig::new(1.0, vec![0.05]);
        cfg.n_paths = 0;
        let run = run_experiment(&cfg, 0).unwrap();
        assert!(run.records.is_empty());
        assert!(run.summary.insufficient_data);
        assert_eq!(run.summary.n, 0);
    }

    #[test]
    fn theory_only_sweep_matches_closed_form() {
        let mut cfg = ExperimentConfig::new(1.0, vec![0.1, 0.05, 0.02]);
        cfg.n_paths = 0;
        let t = sweep(&cfg).unwrap();
        for r in &t.rows {
            assert_eq!(r.theory_mean, 1.0 / (2.0 * r.eps));
            assert!(r.mean.is_none());
        }
        assert!((t.theory_loglog_slope.unwrap() + 1.0).abs() < 1e-12);
        assert!(t.loglog_slope.is_none());
    }
}
