//! The driving Lévy noise: Brownian motion with variance weight `d` plus an
//! independent symmetric α-stable motion whose Lévy measure is `dy/|y|^{1+α}`.
//!
//! With that measure the stable part has characteristic exponent
//! `-C(α)|λ|^α`, `C(α) = ∫ (1 - cos y)|y|^{-1-α} dy`. Samplers rescale a
//! standard Chambers–Mallows–Stuck draw (exponent `-|λ|^α`) by `C(α)^{1/α}`,
//! so a reader expecting unit-scale `S_α(1,0,0)` increments should divide
//! noise intensities by that factor when comparing.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::one_minus_cos_integral;

/// Smallest admissible stability index; `C(α)` blows up at both ends of (0,2).
pub const ALPHA_MIN: f64 = 1e-3;
/// Largest admissible stability index.
pub const ALPHA_MAX: f64 = 2.0 - 1e-3;

/// Generator behind every [`RngStream`].
pub type StreamRng = ChaCha8Rng;

/// Address of an independent random stream: a ChaCha8 key derived from
/// `seed` plus the cipher's 64-bit stream selector.
///
/// Path `i` of an ensemble uses `stream_id = i`, so results never depend on
/// which worker ran which path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Uniform draw on the open interval (0,1).
#[inline]
pub fn open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(ALPHA_MIN..=ALPHA_MAX).contains(&alpha) {
        return Err(domain(format!(
            "alpha must lie in (0,2) (accepted range [{ALPHA_MIN}, {ALPHA_MAX}]), got {alpha}"
        )));
    }
    Ok(())
}

/// `C(α) = ∫_{ℝ∖{0}} (1 - cos y)|y|^{-1-α} dy`, evaluated by quadrature.
///
/// Agrees with `π / (Γ(1+α) sin(πα/2))`.
pub fn stable_scale_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(2.0 * one_minus_cos_integral(alpha, 0.0, f64::INFINITY)?)
}

/// `∫_{|y| ∈ (lo, hi]} (1 - cos λy)|y|^{-1-α} dy`, the stable-part exponent
/// restricted to jumps with magnitude in `(lo, hi]`.
pub fn truncated_stable_exponent(alpha: f64, lambda: f64, lo: f64, hi: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let l = lambda.abs();
    if l == 0.0 {
        return Ok(0.0);
    }
    let g = one_minus_cos_integral(alpha, l * lo, l * hi)?;
    Ok(2.0 * l.powf(alpha) * g)
}

/// Parameters of the driving noise `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableNoiseSpec {
    alpha: f64,
    d: f64,
    stable_enabled: bool,
    #[serde(skip)]
    scale: f64,
}

impl StableNoiseSpec {
    /// Validates the parameters and caches `C(α)`.
    pub fn new(alpha: f64, d: f64, stable_enabled: bool) -> Result<Self> {
        check_alpha(alpha)?;
        if !(d >= 0.0 && d.is_finite()) {
            return Err(domain(format!("Brownian weight d must be >= 0, got {d}")));
        }
        if d == 0.0 && !stable_enabled {
            return Err(domain("noise is identically zero: need d > 0 or the stable part enabled"));
        }
        Ok(Self { alpha, d, stable_enabled, scale: stable_scale_constant(alpha)? })
    }

    /// Pure symmetric α-stable noise (`d = 0`).
    pub fn stable(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0, true)
    }

    /// Zero noise, for checking that simulations reduce to the deterministic
    /// flow. Bypasses the "some noise present" invariant of [`Self::new`].
    pub fn silent(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha, d: 0.0, stable_enabled: false, scale: stable_scale_constant(alpha)? })
    }

    pub fn is_silent(&self) -> bool {
        self.d == 0.0 && !self.stable_enabled
    }

    /// Brownian-only noise; `alpha` is kept for bookkeeping but unused.
    pub fn gaussian(alpha: f64, d: f64) -> Result<Self> {
        Self::new(alpha, d, false)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn stable_enabled(&self) -> bool {
        self.stable_enabled
    }

    /// Cached `C(α)`.
    pub fn scale_constant(&self) -> f64 {
        self.scale
    }

    /// `ψ(λ)` with `E e^{iλL₁} = e^{ψ(λ)}`.
    pub fn characteristic_exponent(&self, lambda: f64) -> f64 {
        let gauss = -0.5 * self.d * lambda * lambda;
        if self.stable_enabled {
            gauss - self.scale * lambda.abs().powf(self.alpha)
        } else {
            gauss
        }
    }

    /// Increment of the stable component over a step of length `h`.
    pub fn sample_stable_increment<R: RngCore + ?Sized>(&self, h: f64, rng: &mut R) -> Result<f64> {
        check_step(h)?;
        Ok(StableIncrement::new(self.alpha, self.scale, h).sample(rng))
    }
}

/// Free-function form of [`StableNoiseSpec::characteristic_exponent`].
pub fn characteristic_exponent(spec: &StableNoiseSpec, lambda: f64) -> f64 {
    spec.characteristic_exponent(lambda)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(domain(format!("step h must be positive, got {h}")));
    }
    Ok(())
}

/// Brownian increment `N(0, d·h)`; exactly zero when `d = 0`.
pub fn sample_gaussian_increment<R: RngCore + ?Sized>(d: f64, h: f64, rng: &mut R) -> Result<f64> {
    check_step(h)?;
    if !(d >= 0.0) {
        return Err(domain(format!("variance weight d must be >= 0, got {d}")));
    }
    let z: f64 = StandardNormal.sample(rng);
    Ok((d * h).sqrt() * z)
}

/// Stable increment over `h` for the given index, computing `C(α)` on the
/// fly. Repeated draws should go through [`StableNoiseSpec`] or
/// [`StableIncrement`], which compute `C(α)` once.
pub fn sample_stable_increment<R: RngCore + ?Sized>(alpha: f64, h: f64, rng: &mut R) -> Result<f64> {
    check_step(h)?;
    let c = stable_scale_constant(alpha)?;
    Ok(StableIncrement::new(alpha, c, h).sample(rng))
}

/// Chambers–Mallows–Stuck map for the symmetric case: `v ∈ (-π/2, π/2)`,
/// `w > 0` exponential. Output has characteristic function `exp(-|λ|^α)`.
///
/// Odd in `v`: flipping the uniform draw flips the sample.
#[inline]
pub fn cms_standard(alpha: f64, v: f64, w: f64) -> f64 {
    if alpha == 1.0 {
        return v.tan();
    }
    let first = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    let second = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
    first * second
}

/// Precomputed sampler for stable increments at a fixed step.
#[derive(Debug, Clone, Copy)]
pub struct StableIncrement {
    alpha: f64,
    factor: f64,
}

impl StableIncrement {
    pub fn new(alpha: f64, scale_constant: f64, h: f64) -> Self {
        Self { alpha, factor: (h * scale_constant).powf(1.0 / alpha) }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = PI * (open01(rng) - 0.5);
        let w: f64 = if self.alpha == 1.0 { 1.0 } else { Exp1.sample(rng) };
        debug_assert!(v.abs() < FRAC_PI_2);
        self.factor * cms_standard(self.alpha, v, w)
    }
}

/// Uniform random sign.
#[inline]
pub(crate) fn random_sign<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}
