//! Goodness-of-fit and regression helpers for exit-time samples.

use crate::engine::ExitRecord;
use crate::error::{Error, Result};

/// Minimum sample size accepted by [`ks_exponential`].
pub const KS_MIN_SAMPLES: usize = 30;

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Kolmogorov–Smirnov distance between the sample and the exponential law
/// whose rate is fitted as `1/mean`.
///
/// The rate is estimated from the same data, so the usual KS critical
/// values are conservative (Lilliefors); compare against simulated nulls.
pub fn ks_exponential_times(samples: &[f64]) -> Result<f64> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::InsufficientData { needed: KS_MIN_SAMPLES, got: samples.len() });
    }
    let xs = sorted(samples);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Ok(1.0);
    }
    let rate = 1.0 / mean;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let cdf = 1.0 - (-rate * x).exp();
        d = d.max((i + 1) as f64 / n - cdf).max(cdf - i as f64 / n);
    }
    Ok(d)
}

/// [`ks_exponential_times`] on exit records; refuses censored entries.
pub fn ks_exponential(records: &[ExitRecord]) -> Result<f64> {
    let censored = records.iter().filter(|r| r.censored).count();
    if censored > 0 {
        return Err(Error::Censored(censored));
    }
    let times: Vec<f64> = records.iter().map(|r| r.exit_time).collect();
    ks_exponential_times(&times)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let xa = sorted(a);
    let xb = sorted(b);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS distance between a sample and an arbitrary continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let xs = sorted(samples);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// `sup_{u ∈ [0, u_max]} |P̂(T > mean·u) - e^{-u}|`, checked at every jump
/// of the empirical survival function and at `u_max`.
pub fn survival_sup_deviation(samples: &[f64], mean: f64, u_max: f64) -> f64 {
    let xs = sorted(samples);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let u = x / mean;
        if u > u_max {
            let tail = (n - i as f64) / n;
            d = d.max((tail - (-u_max).exp()).abs());
            return d;
        }
        let theory = (-u).exp();
        let before = (n - i as f64) / n;
        let after = (n - (i + 1) as f64) / n;
        d = d.max((before - theory).abs()).max((after - theory).abs());
    }
    d.max((-u_max).exp())
}

/// Ordinary least-squares slope and intercept of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Sample mean and unbiased standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
