//! Path simulation of `dX = -U'(X) dt + ε dL` up to the first exit.
//!
//! Two independent schemes are provided. [`Scheme::Euler`] adds exact-in-law
//! Gaussian and stable increments on a uniform grid. [`Scheme::JumpAdapted`]
//! splits the noise at `ε^{-ρ}`, places the large jumps at their exact
//! Poisson arrival instants and integrates only the small-jump part on the
//! grid. Mechanism statistics (which jump caused the exit, from where) are
//! exact under the jump-adapted scheme and heuristic under Euler.

use rand::RngCore;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::noise::{check_alpha, RngStream, StableIncrement, StableNoiseSpec};
use crate::potential::{flow_with_tol, rk4_step, ExitDomain, PotentialSpec};
use crate::split::{sample_large_jump, SmallJumpSampler, SplitSpec};

/// Positions are clamped to `±DEFAULT_CLAMP` when a jump throws the path
/// beyond it.
pub const DEFAULT_CLAMP: f64 = 1e6;

/// `γ = (2-α)/5`, the tube exponent paired with `ρ = 1/2`.
pub fn gamma_default(alpha: f64) -> f64 {
    (2.0 - alpha) / 5.0
}

/// Default grid step `min(0.01, 0.01/M)`.
pub fn default_step(curvature: f64) -> f64 {
    0.01f64.min(0.01 / curvature)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Euler,
    JumpAdapted,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Self::Euler),
            "jump_adapted" => Ok(Self::JumpAdapted),
            other => Err(domain(format!("unknown scheme {other:?}; expected euler or jump_adapted"))),
        }
    }
}

/// Discretization and censoring parameters for one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathParams {
    pub eps: f64,
    pub h: f64,
    pub t_max: f64,
    pub x0: f64,
    pub scheme: Scheme,
    /// Large/small split. Drives the jump-adapted scheme; under Euler only
    /// its threshold is used, to label large stable increments.
    pub split: SplitSpec,
    pub clamp: f64,
}

impl PathParams {
    pub fn new(eps: f64, h: f64, t_max: f64, scheme: Scheme, split: SplitSpec) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(domain(format!("eps must be > 0, got {eps}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(domain(format!("step h must be > 0, got {h}")));
        }
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(domain(format!("t_max must be > 0, got {t_max}")));
        }
        if (split.eps - eps).abs() > 1e-15 * eps {
            return Err(domain(format!("split eps {} differs from path eps {eps}", split.eps)));
        }
        Ok(Self { eps, h, t_max, x0: 0.0, scheme, split, clamp: DEFAULT_CLAMP })
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_clamp(mut self, clamp: f64) -> Self {
        self.clamp = clamp;
        self
    }

    /// Soft problems with the parameters: step too coarse for the large-jump
    /// rate, or a horizon short enough to bias the mean through censoring.
    pub fn warnings(&self, predicted_mean: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        if self.scheme == Scheme::JumpAdapted && self.h * self.split.beta > 0.01 {
            out.push(format!(
                "step h = {} is not small against the mean large-jump gap 1/beta = {}",
                self.h,
                self.split.mean_gap()
            ));
        }
        if let Some(mean) = predicted_mean {
            if self.t_max < 10.0 * mean {
                out.push(format!(
                    "t_max = {} is below 10x the predicted mean exit time {mean}; expect censoring bias",
                    self.t_max
                ));
            }
        }
        out
    }
}

/// One simulated first exit (or its censoring).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitRecord {
    pub path_id: u64,
    pub stream_id: u64,
    pub exit_time: f64,
    pub exit_position: f64,
    /// Position just before the exiting large jump.
    pub pre_jump_position: Option<f64>,
    pub n_large_jumps: u32,
    pub exited_at_large_jump: bool,
    pub censored: bool,
    /// A position on this path was clamped to `±clamp`.
    pub clamped: bool,
}

/// A discretized trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl PathSample {
    fn with_capacity(n: usize) -> Self {
        Self { times: Vec::with_capacity(n), values: Vec::with_capacity(n) }
    }

    fn push(&mut self, t: f64, v: f64) {
        self.times.push(t);
        self.values.push(v);
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Deterministic drift over `dt`: one RK4 step of the flow where
/// `dt·|U''|` is small, otherwise the adaptive flow (a path thrown far into
/// a steep tail). Noise is added on top, so with zero noise both schemes
/// reproduce the flow to `O(dt⁴)`.
#[inline]
fn drift_step(p: &PotentialSpec, x: f64, dt: f64) -> f64 {
    if dt * p.d2u(x).abs() <= 0.5 {
        rk4_step(p, x, dt)
    } else {
        flow_with_tol(p, x, dt, 1e-9, 1e-9).unwrap_or(f64::NAN)
    }
}

struct PathState {
    record: ExitRecord,
}

impl PathState {
    fn new(stream: &RngStream) -> Self {
        Self {
            record: ExitRecord {
                path_id: stream.stream_id,
                stream_id: stream.stream_id,
                exit_time: 0.0,
                exit_position: f64::NAN,
                pre_jump_position: None,
                n_large_jumps: 0,
                exited_at_large_jump: false,
                censored: false,
                clamped: false,
            },
        }
    }

    /// Returns `Some(record)` if `x` lies outside the domain at time `t`.
    fn check_exit(&mut self, dom: &ExitDomain, clamp: f64, t: f64, x: f64) -> Option<ExitRecord> {
        if x.is_finite() && dom.contains(x) {
            return None;
        }
        let mut r = self.record;
        r.exit_time = t;
        r.exit_position = if x.is_nan() {
            r.clamped = true;
            clamp
        } else if x.abs() > clamp {
            r.clamped = true;
            clamp.copysign(x)
        } else {
            x
        };
        Some(r)
    }

    fn censor(mut self, t_max: f64, x: f64) -> ExitRecord {
        self.record.exit_time = t_max;
        self.record.exit_position = x;
        self.record.censored = true;
        self.record
    }

    /// Pulls far-left excursions (half-line) back to the clamp radius.
    #[inline]
    fn clamp_inside(&mut self, x: f64, clamp: f64) -> f64 {
        if x < -clamp {
            self.record.clamped = true;
            -clamp
        } else {
            x
        }
    }
}

fn check_inputs(noise: &StableNoiseSpec, pp: &PathParams) -> Result<()> {
    check_alpha(noise.alpha())?;
    if noise.stable_enabled() && pp.split.alpha != noise.alpha() {
        return Err(domain("split alpha differs from noise alpha"));
    }
    Ok(())
}

/// Uniform-grid scheme with exact-in-law Gaussian and stable increments
/// added to the drift step.
///
/// A step whose stable increment exceeds the split threshold in magnitude
/// counts as a large jump.
pub fn simulate_exit_euler(
    p: &PotentialSpec,
    dom: &ExitDomain,
    noise: &StableNoiseSpec,
    pp: &PathParams,
    stream: RngStream,
) -> Result<ExitRecord> {
    check_inputs(noise, pp)?;
    let mut state = PathState::new(&stream);
    let mut x = pp.x0;
    if let Some(r) = state.check_exit(dom, pp.clamp, 0.0, x) {
        return Ok(r);
    }
    let mut rng = stream.rng();
    let n_full = (pp.t_max / pp.h).floor() as u64;
    let tail = pp.t_max - n_full as f64 * pp.h;
    let n_steps = if tail > 1e-12 * pp.h { n_full + 1 } else { n_full };
    let full = StepNoise::new(noise, pp.h);
    let last = StepNoise::new(noise, if tail > 1e-12 * pp.h { tail } else { pp.h });
    let threshold = pp.split.threshold;

    for k in 0..n_steps {
        let (dt, sampler, t) = if k + 1 == n_steps && tail > 1e-12 * pp.h {
            (tail, &last, pp.t_max)
        } else {
            (pp.h, &full, (k + 1) as f64 * pp.h)
        };
        let (gauss, stable) = sampler.sample(&mut rng);
        let large = stable.abs() > threshold;
        if large {
            state.record.n_large_jumps += 1;
        }
        let drifted = drift_step(p, x, dt);
        let x_new = drifted + pp.eps * (gauss + stable);
        if let Some(mut r) = state.check_exit(dom, pp.clamp, t, x_new) {
            if large {
                r.exited_at_large_jump = true;
                r.pre_jump_position = Some(x);
            }
            return Ok(r);
        }
        x = state.clamp_inside(x_new, pp.clamp);
    }
    Ok(state.censor(pp.t_max, x))
}

struct StepNoise {
    gauss_sd: f64,
    stable: Option<StableIncrement>,
}

impl StepNoise {
    fn new(noise: &StableNoiseSpec, dt: f64) -> Self {
        Self {
            gauss_sd: (noise.d() * dt).sqrt(),
            stable: noise
                .stable_enabled()
                .then(|| StableIncrement::new(noise.alpha(), noise.scale_constant(), dt)),
        }
    }

    /// Unscaled (Brownian, stable) increments of `L` over the step.
    #[inline]
    fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let g = if self.gauss_sd > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            self.gauss_sd * z
        } else {
            0.0
        };
        let s = self.stable.as_ref().map_or(0.0, |s| s.sample(rng));
        (g, s)
    }
}

/// Jump-adapted scheme: small-jump noise on the grid, large jumps at their
/// exact arrival times. The exit is checked at every grid point and on both
/// sides of every arrival.
pub fn simulate_exit_jump_adapted(
    p: &PotentialSpec,
    dom: &ExitDomain,
    noise: &StableNoiseSpec,
    pp: &PathParams,
    stream: RngStream,
) -> Result<ExitRecord> {
    check_inputs(noise, pp)?;
    let mut state = PathState::new(&stream);
    let mut x = pp.x0;
    if let Some(r) = state.check_exit(dom, pp.clamp, 0.0, x) {
        return Ok(r);
    }
    let mut rng = stream.rng();
    let sampler = SmallJumpSampler::new(&pp.split, noise, pp.h)?;
    let beta = pp.split.beta;
    let next_gap = |rng: &mut crate::noise::StreamRng| -> f64 {
        if noise.stable_enabled() {
            let e: f64 = Exp1.sample(rng);
            e / beta
        } else {
            f64::INFINITY
        }
    };

    let mut t = 0.0;
    let mut k: u64 = 0;
    let mut next_arrival = next_gap(&mut rng);
    loop {
        let grid_next = ((k + 1) as f64 * pp.h).min(pp.t_max);
        if next_arrival <= grid_next {
            let dt = next_arrival - t;
            if dt > 0.0 {
                x = drift_step(p, x, dt) + sampler.sample(dt, &mut rng);
            }
            t = next_arrival;
            if let Some(r) = state.check_exit(dom, pp.clamp, t, x) {
                return Ok(r);
            }
            x = state.clamp_inside(x, pp.clamp);
            let jump = sample_large_jump(&pp.split, &mut rng);
            state.record.n_large_jumps += 1;
            let before = x;
            x += pp.eps * jump.w;
            if let Some(mut r) = state.check_exit(dom, pp.clamp, t, x) {
                r.exited_at_large_jump = true;
                r.pre_jump_position = Some(before);
                return Ok(r);
            }
            x = state.clamp_inside(x, pp.clamp);
            next_arrival = t + next_gap(&mut rng);
            if t >= grid_next {
                k += 1;
                if t >= pp.t_max {
                    return Ok(state.censor(pp.t_max, x));
                }
            }
        } else {
            let dt = grid_next - t;
            if dt > 0.0 {
                x = drift_step(p, x, dt) + sampler.sample(dt, &mut rng);
            }
            t = grid_next;
            k += 1;
            if let Some(r) = state.check_exit(dom, pp.clamp, t, x) {
                return Ok(r);
            }
            x = state.clamp_inside(x, pp.clamp);
            if t >= pp.t_max {
                return Ok(state.censor(pp.t_max, x));
            }
        }
    }
}

/// Dispatches on `pp.scheme`.
pub fn simulate_exit(
    p: &PotentialSpec,
    dom: &ExitDomain,
    noise: &StableNoiseSpec,
    pp: &PathParams,
    stream: RngStream,
) -> Result<ExitRecord> {
    match pp.scheme {
        Scheme::Euler => simulate_exit_euler(p, dom, noise, pp, stream),
        Scheme::JumpAdapted => simulate_exit_jump_adapted(p, dom, noise, pp, stream),
    }
}

/// Runs `f(i)` for `i in 0..n` on a pool of `workers` threads (all cores
/// when `None`), returning results in index order.
pub fn par_map<T, F>(n: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

/// `n_paths` independent exits; path `i` uses stream `stream_base + i`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_ensemble(
    p: &PotentialSpec,
    dom: &ExitDomain,
    noise: &StableNoiseSpec,
    pp: &PathParams,
    seed: u64,
    stream_base: u64,
    n_paths: u64,
    workers: Option<usize>,
) -> Result<Vec<ExitRecord>> {
    par_map(n_paths, workers, |i| {
        let mut r = simulate_exit(p, dom, noise, pp, RngStream::new(seed, stream_base + i))?;
        r.path_id = i;
        Ok(r)
    })
}

/// Euler path of the first-order process
/// `dZ = -U''(Y_t(x)) Z dt + dξ^ε`, `Z_0 = 0`, next to the driving `ξ^ε`.
///
/// Returns `(Z, ξ)` on the grid `0, h, 2h, …, t_end`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_first_order_z(
    p: &PotentialSpec,
    x: f64,
    split: &SplitSpec,
    noise: &StableNoiseSpec,
    h: f64,
    t_end: f64,
    stream: RngStream,
) -> Result<(PathSample, PathSample)> {
    if !(t_end > 0.0) {
        return Err(domain(format!("t_end must be > 0, got {t_end}")));
    }
    let sampler = SmallJumpSampler::new(split, noise, h)?;
    let mut rng = stream.rng();
    let n = (t_end / h).round().max(1.0) as usize;
    let mut z_path = PathSample::with_capacity(n + 1);
    let mut xi_path = PathSample::with_capacity(n + 1);
    let (mut y, mut z, mut xi) = (x, 0.0, 0.0);
    z_path.push(0.0, z);
    xi_path.push(0.0, xi);
    for k in 0..n {
        let d_xi = sampler.sample_unscaled(h, &mut rng);
        z += -p.d2u(y) * z * h + d_xi;
        xi += d_xi;
        y = rk4_step(p, y, h);
        let t = (k + 1) as f64 * h;
        z_path.push(t, z);
        xi_path.push(t, xi);
    }
    Ok((z_path, xi_path))
}

/// Monte Carlo estimate of a probability with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationEstimate {
    pub eps: f64,
    pub radius: f64,
    pub hits: u64,
    pub n_paths: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub(crate) fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    if hits == 0 {
        let z2 = 1.959_963_984_540_054f64.powi(2);
        return (0.0, z2 / (n as f64 + z2));
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let phat = hits as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let center = (phat + z * z / (2.0 * nf)) / denom;
    let half = z * (phat * (1.0 - phat) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Tube-deviation settings shared by all paths.
#[derive(Debug, Clone, Copy)]
pub struct TubeParams {
    /// Radius multiplier `c` in `c·ε^γ`.
    pub c: f64,
    pub gamma: f64,
    pub h: f64,
    pub x0: f64,
}

/// `P(sup_{t ≤ T_ε} |x^ε_t - Y_t(x)| ≥ c ε^γ)` with `T_ε ~ Exp(β_ε)` drawn
/// per path and `x^ε` driven by `εξ^ε` only.
#[allow(clippy::too_many_arguments)]
pub fn tube_deviation_prob(
    p: &PotentialSpec,
    split: &SplitSpec,
    noise: &StableNoiseSpec,
    tube: &TubeParams,
    n_paths: u64,
    seed: u64,
    stream_base: u64,
    workers: Option<usize>,
) -> Result<DeviationEstimate> {
    if !(tube.c > 0.0) {
        return Err(domain(format!("tube multiplier c must be > 0, got {}", tube.c)));
    }
    let radius = tube.c * split.eps.powf(tube.gamma);
    let sampler = SmallJumpSampler::new(split, noise, tube.h)?;
    let hits: Vec<bool> = par_map(n_paths, workers, |i| {
        let mut rng = RngStream::new(seed, stream_base + i).rng();
        let e: f64 = Exp1.sample(&mut rng);
        let horizon = e / split.beta;
        let (mut x, mut y, mut t) = (tube.x0, tube.x0, 0.0);
        while t < horizon {
            let dt = tube.h.min(horizon - t);
            x = drift_step(p, x, dt) + sampler.sample(dt, &mut rng);
            y = rk4_step(p, y, dt);
            t += dt;
            if !((x - y).abs() < radius) {
                return Ok(true);
            }
        }
        Ok(false)
    })?;
    let hits = hits.into_iter().filter(|&h| h).count() as u64;
    let (ci_low, ci_high) = wilson_interval(hits, n_paths);
    Ok(DeviationEstimate {
        eps: split.eps,
        radius,
        hits,
        n_paths,
        estimate: if n_paths == 0 { f64::NAN } else { hits as f64 / n_paths as f64 },
        ci_low,
        ci_high,
    })
}
