//! Splitting `L` at the threshold `ε^{-ρ}` into small jumps `ξ^ε` and a
//! compound Poisson part `η^ε`, with the characteristic-exponent check.
//!
//! ```text
//! cargo run --example levy_split
//! ```

use levy_exit::noise::{RngStream, StableNoiseSpec};
use levy_exit::potential::ExitDomain;
use levy_exit::split::{
    big_jump_exit_prob, rho_gamma_feasible, sample_arrival_times, sample_large_jump,
    small_jump_variance, split_characteristic_check, SmallJumpSampler, SplitSpec,
};

fn main() -> levy_exit::Result<()> {
    let (alpha, eps) = (1.0, 0.01);
    let spec = SplitSpec::with_default_rho(alpha, eps)?;
    let noise = StableNoiseSpec::new(alpha, 1.0, true)?;
    println!("threshold {}, beta {}, mean gap {}", spec.threshold, spec.beta, spec.mean_gap());

    let report = split_characteristic_check(&spec, &noise, &[0.5, 1.0, 5.0, 20.0])?;
    for r in &report.rows {
        println!(
            "lambda {:>5}: psi_xi {:>12.6} + psi_eta {:>10.6} = {:>12.6} (error {:.1e})",
            r.lambda, r.psi_small, r.psi_large, r.psi_total, r.abs_error
        );
    }

    let mut rng = RngStream::new(1, 0).rng();
    let arrivals = sample_arrival_times(&spec, 100.0, &mut rng)?;
    println!("{} large jumps on [0, 100]", arrivals.times.len());
    for _ in 0..3 {
        println!("  W = {:+.3}", sample_large_jump(&spec, &mut rng).w);
    }

    let sampler = SmallJumpSampler::new(&spec, &noise, 1.0)?;
    let n = 50_000;
    let var = (0..n).map(|_| sampler.sample(1.0, &mut rng).powi(2)).sum::<f64>() / n as f64;
    println!("Var(eps xi_1): empirical {var:.3e}, formula {:.3e}", small_jump_variance(&spec, 1.0));

    let unit = ExitDomain::bounded(1.0, 1.0)?;
    println!("one large jump exits [-1, 1] with probability {}", big_jump_exit_prob(&spec, &unit)?);
    println!("(rho, gamma) = (0.5, 0.2) feasible: {}", rho_gamma_feasible(alpha, 0.5, 0.2).feasible);
    Ok(())
}
