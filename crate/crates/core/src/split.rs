//! Noise-dependent decomposition `L = ξ^ε + η^ε` at the threshold `ε^{-ρ}`.
//!
//! `η^ε` keeps the jumps with `|y| > ε^{-ρ}`: a compound Poisson process of
//! intensity `β_ε = (2/α) ε^{αρ}` with Pareto-tailed heights. `ξ^ε` is the
//! Brownian part plus all smaller jumps. The Lévy measure is symmetric, so
//! neither piece carries a compensating drift.

use rand::RngCore;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::noise::{check_alpha, open01, random_sign, StableNoiseSpec};
use crate::potential::ExitDomain;

/// Threshold exponent used throughout unless configured otherwise.
pub const DEFAULT_RHO: f64 = 0.5;

/// `β_ε = (2/α) ε^{αρ}`, the rate of jumps larger than `ε^{-ρ}`.
pub fn intensity_beta(alpha: f64, eps: f64, rho: f64) -> Result<f64> {
    check_split_params(alpha, eps, rho)?;
    Ok(2.0 / alpha * eps.powf(alpha * rho))
}

fn check_split_params(alpha: f64, eps: f64, rho: f64) -> Result<()> {
    check_alpha(alpha)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain(format!("noise intensity eps must be > 0, got {eps}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(domain(format!("threshold exponent rho must lie in (0,1), got {rho}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitSpec {
    pub alpha: f64,
    pub eps: f64,
    pub rho: f64,
    /// `ε^{-ρ}`
    pub threshold: f64,
    /// `β_ε`
    pub beta: f64,
}

impl SplitSpec {
    pub fn new(alpha: f64, eps: f64, rho: f64) -> Result<Self> {
        let beta = intensity_beta(alpha, eps, rho)?;
        Ok(Self { alpha, eps, rho, threshold: eps.powf(-rho), beta })
    }

    /// Split at `ε^{-1/2}`.
    pub fn with_default_rho(alpha: f64, eps: f64) -> Result<Self> {
        Self::new(alpha, eps, DEFAULT_RHO)
    }

    /// Mean waiting time between large jumps, `1/β_ε`.
    pub fn mean_gap(&self) -> f64 {
        1.0 / self.beta
    }
}

/// Arrival times of the large jumps on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalSchedule {
    pub times: Vec<f64>,
    pub horizon: f64,
}

/// Poisson arrivals with exponential(β_ε) gaps, cut at `horizon`.
pub fn sample_arrival_times<R: RngCore + ?Sized>(
    spec: &SplitSpec,
    horizon: f64,
    rng: &mut R,
) -> Result<ArrivalSchedule> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain(format!("horizon must be positive and finite, got {horizon}")));
    }
    let mut times = Vec::new();
    let mut t = 0.0;
    loop {
        let gap: f64 = Exp1.sample(rng);
        t += gap / spec.beta;
        if t > horizon {
            break;
        }
        times.push(t);
    }
    Ok(ArrivalSchedule { times, horizon })
}

/// Height `W_k` of one large jump, before multiplication by ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeJump {
    pub w: f64,
}

/// Inverse-CDF map for the large-jump law: `|W| = threshold · u^{-1/α}`
/// with `u ∈ (0,1]`.
pub fn large_jump_from_uniform(spec: &SplitSpec, u: f64, positive: bool) -> LargeJump {
    let magnitude = spec.threshold * u.powf(-1.0 / spec.alpha);
    LargeJump { w: if positive { magnitude } else { -magnitude } }
}

pub fn sample_large_jump<R: RngCore + ?Sized>(spec: &SplitSpec, rng: &mut R) -> LargeJump {
    let sign = random_sign(rng);
    let u = open01(rng);
    large_jump_from_uniform(spec, u, sign > 0.0)
}

/// Probability that one large jump, scaled by ε, lands outside the domain
/// when fired from the origin:
/// `(1/(β_ε α)) [(ε/a)^α + (ε/b)^α]`, dropping the `b` term on a half-line.
pub fn big_jump_exit_prob(spec: &SplitSpec, dom: &ExitDomain) -> Result<f64> {
    let reach = spec.eps * spec.threshold;
    if !(reach < dom.min_boundary_distance()) {
        return Err(Error::Precondition(format!(
            "eps * threshold = {reach} must be below the nearest boundary distance {}",
            dom.min_boundary_distance()
        )));
    }
    let side = |dist: f64| (spec.eps / dist).powf(spec.alpha);
    let tails = match *dom {
        ExitDomain::Bounded { a, b } => side(a) + side(b),
        ExitDomain::HalfLine { a } => side(a),
    };
    Ok(tails / (spec.beta * spec.alpha))
}

/// `Var(εξ^ε_1) = ε²d + (2/(2-α)) ε² threshold^{2-α}`.
pub fn small_jump_variance(spec: &SplitSpec, d: f64) -> f64 {
    let a = spec.alpha;
    spec.eps * spec.eps * (d + 2.0 / (2.0 - a) * spec.threshold.powf(2.0 - a))
}

/// Sampler for increments of `εξ^ε` over arbitrary step lengths.
///
/// Jumps below the cutoff `δ_c` are replaced by a Brownian motion with the
/// same variance rate `2δ_c^{2-α}/(2-α)`; jumps with magnitude in
/// `(δ_c, threshold]` are simulated exactly as a compound Poisson process of
/// rate `(2/α)(δ_c^{-α} - threshold^{-α})`.
#[derive(Debug, Clone, Copy)]
pub struct SmallJumpSampler {
    eps: f64,
    alpha: f64,
    threshold: f64,
    cutoff: f64,
    /// variance rate of the Gaussian part of ξ^ε
    gauss_rate: f64,
    mid_rate: f64,
    cutoff_pow: f64,
    threshold_pow: f64,
}

impl SmallJumpSampler {
    /// Default cutoff `min(h^{1/α}, threshold)`, which keeps about `2/α`
    /// mid-range jumps per step.
    pub fn new(spec: &SplitSpec, noise: &StableNoiseSpec, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(domain(format!("step h must be positive, got {h}")));
        }
        let cutoff = h.powf(1.0 / spec.alpha).min(spec.threshold);
        Self::with_cutoff(spec, noise, cutoff)
    }

    pub fn with_cutoff(spec: &SplitSpec, noise: &StableNoiseSpec, cutoff: f64) -> Result<Self> {
        if (spec.alpha - noise.alpha()).abs() > 0.0 && noise.stable_enabled() {
            return Err(domain(format!(
                "split alpha {} does not match noise alpha {}",
                spec.alpha,
                noise.alpha()
            )));
        }
        if !(cutoff > 0.0 && cutoff <= spec.threshold) {
            return Err(domain(format!(
                "cutoff must lie in (0, threshold = {}], got {cutoff}",
                spec.threshold
            )));
        }
        let a = spec.alpha;
        let (ar_var, mid_rate) = if noise.stable_enabled() {
            (
                2.0 * cutoff.powf(2.0 - a) / (2.0 - a),
                (2.0 / a * (cutoff.powf(-a) - spec.threshold.powf(-a))).max(0.0),
            )
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            eps: spec.eps,
            alpha: a,
            threshold: spec.threshold,
            cutoff,
            gauss_rate: noise.d() + ar_var,
            mid_rate,
            cutoff_pow: cutoff.powf(-a),
            threshold_pow: spec.threshold.powf(-a),
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Expected number of mid-range jumps per unit time.
    pub fn mid_rate(&self) -> f64 {
        self.mid_rate
    }

    /// Increment of `ξ^ε` (unscaled) over `dt`.
    #[inline]
    pub fn sample_unscaled<R: RngCore + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        let mut x = 0.0;
        if self.gauss_rate > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            x += (self.gauss_rate * dt).sqrt() * z;
        }
        if self.mid_rate > 0.0 {
            let count = poisson(self.mid_rate * dt, rng);
            for _ in 0..count {
                x += random_sign(rng) * self.mid_jump(open01(rng));
            }
        }
        x
    }

    /// Increment of `εξ^ε` over `dt`.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        self.eps * self.sample_unscaled(dt, rng)
    }

    /// Inverse CDF of the jump law restricted to `(cutoff, threshold]`.
    #[inline]
    fn mid_jump(&self, u: f64) -> f64 {
        let y = (self.cutoff_pow - u * (self.cutoff_pow - self.threshold_pow)).powf(-1.0 / self.alpha);
        y.min(self.threshold)
    }
}

#[inline]
pub(crate) fn poisson<R: RngCore + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < 30.0 {
        // sequential inversion
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        let u = open01(rng);
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p == 0.0 {
                break;
            }
        }
        k
    } else {
        Poisson::new(mean).expect("positive mean").sample(rng) as u64
    }
}

/// One increment of `εξ^ε` over `h` with Brownian weight `d`.
pub fn small_jump_increment<R: RngCore + ?Sized>(
    spec: &SplitSpec,
    d: f64,
    h: f64,
    rng: &mut R,
) -> Result<f64> {
    let noise = StableNoiseSpec::new(spec.alpha, d, true)?;
    Ok(SmallJumpSampler::new(spec, &noise, h)?.sample(h, rng))
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitCheckRow {
    pub lambda: f64,
    pub psi_small: f64,
    pub psi_large: f64,
    pub psi_total: f64,
    pub abs_error: f64,
}

/// Outcome of [`split_characteristic_check`]. A breach is reported, not raised.
#[derive(Debug, Clone, Serialize)]
pub struct SplitCheckReport {
    pub tolerance: f64,
    pub rows: Vec<SplitCheckRow>,
    pub passed: bool,
}

/// Absolute tolerance on `ψ_ξ + ψ_η - ψ_L`.
pub const SPLIT_CHECK_TOL: f64 = 1e-8;

/// Integrates the Lévy-measure displays of `ψ_ξ` and `ψ_η` separately and
/// compares their sum with the full exponent of `L`.
pub fn split_characteristic_check(
    spec: &SplitSpec,
    noise: &StableNoiseSpec,
    lambdas: &[f64],
) -> Result<SplitCheckReport> {
    if noise.stable_enabled() && spec.alpha != noise.alpha() {
        return Err(domain("split and noise disagree on alpha"));
    }
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let gauss = -0.5 * noise.d() * lambda * lambda;
        let (small, large) = if noise.stable_enabled() {
            (
                crate::noise::truncated_stable_exponent(spec.alpha, lambda, 0.0, spec.threshold)?,
                crate::noise::truncated_stable_exponent(spec.alpha, lambda, spec.threshold, f64::INFINITY)?,
            )
        } else {
            (0.0, 0.0)
        };
        let psi_small = gauss - small;
        let psi_large = -large;
        let psi_total = noise.characteristic_exponent(lambda);
        rows.push(SplitCheckRow {
            lambda,
            psi_small,
            psi_large,
            psi_total,
            abs_error: (psi_small + psi_large - psi_total).abs(),
        });
    }
    let passed = rows.iter().all(|r| r.abs_error <= SPLIT_CHECK_TOL);
    Ok(SplitCheckReport { tolerance: SPLIT_CHECK_TOL, rows, passed })
}

/// Membership of `(ρ, γ)` in the admissible region, with the violated
/// inequalities named.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub violations: Vec<String>,
}

/// `0 < ρ < 1`, `γ > 0`, `γ < (2-α)(1-ρ)/2`, `γ > α(1-2ρ)`.
pub fn rho_gamma_feasible(alpha: f64, rho: f64, gamma: f64) -> Feasibility {
    let mut violations = Vec::new();
    if !(rho > 0.0 && rho < 1.0) {
        violations.push(format!("0 < rho < 1 fails (rho = {rho})"));
    }
    if !(gamma > 0.0) {
        violations.push(format!("gamma > 0 fails (gamma = {gamma})"));
    }
    let upper = (2.0 - alpha) * (1.0 - rho) / 2.0;
    if !(gamma < upper) {
        violations.push(format!("gamma < (2-alpha)(1-rho)/2 = {upper} fails (gamma = {gamma})"));
    }
    let lower = alpha * (1.0 - 2.0 * rho);
    if !(gamma > lower) {
        violations.push(format!("gamma > alpha(1-2rho) = {lower} fails (gamma = {gamma})"));
    }
    Feasibility { feasible: violations.is_empty(), violations }
}
