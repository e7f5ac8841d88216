//! Monte Carlo first exits with both schemes, compared with the exponential law.
//!
//! ```text
//! cargo run --release --example exit_simulation
//! ```

use levy_exit::engine::{gamma_default, simulate_ensemble, PathParams, Scheme};
use levy_exit::lab::{stable_exit_law, summarize};
use levy_exit::noise::StableNoiseSpec;
use levy_exit::potential::{ExitDomain, PotentialSpec};
use levy_exit::split::SplitSpec;
use levy_exit::stats::ks_two_sample;

fn main() -> levy_exit::Result<()> {
    let (alpha, eps) = (1.0, 0.05);
    let p = PotentialSpec::quadratic(1.0)?;
    let dom = ExitDomain::bounded(1.0, 1.0)?;
    let noise = StableNoiseSpec::stable(alpha)?;
    let split = SplitSpec::with_default_rho(alpha, eps)?;
    let pred = stable_exit_law(alpha, eps, &dom, gamma_default(alpha))?;
    println!("predicted mean {}", pred.mean);

    let mut samples = Vec::new();
    for (scheme, base) in [(Scheme::Euler, 0), (Scheme::JumpAdapted, 1 << 40)] {
        let pp = PathParams::new(eps, 0.01, 20.0 * pred.mean, scheme, split)?;
        let records = simulate_ensemble(&p, &dom, &noise, &pp, 42, base, 2000, None)?;
        let s = summarize(&records, 2.0 * eps.powf(gamma_default(alpha)));
        println!(
            "{scheme:?}: mean {:.3} [{:.3}, {:.3}], KS {:.4}, big-jump exits {:.3}",
            s.mean,
            s.ci_low,
            s.ci_high,
            s.ks_statistic.unwrap_or(f64::NAN),
            s.big_jump_exit_fraction
        );
        samples.push(records.iter().map(|r| r.exit_time).collect::<Vec<_>>());
    }
    println!("two-sample KS between schemes {:.4}", ks_two_sample(&samples[0], &samples[1]));
    Ok(())
}
