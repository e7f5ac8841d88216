//! Brownian-only exits against Kramers' law, and the stable law at the same ε.
//!
//! ```text
//! cargo run --release --example kramers_contrast
//! ```

use levy_exit::lab::{kramers_log_mean_exit, stable_exit_law, sweep, ExperimentConfig};
use levy_exit::potential::{ExitDomain, PotentialSpec};

fn main() -> levy_exit::Result<()> {
    let mut cfg = ExperimentConfig::new(1.0, vec![0.7, 0.55, 0.45]);
    cfg.stable = false;
    cfg.d = 1.0;
    cfg.n_paths = 1000;
    cfg.seed = 5;
    let table = sweep(&cfg)?;
    for r in &table.rows {
        println!(
            "eps {:<5} mean {:>8.2}  Kramers {:>8.2}",
            r.eps,
            r.mean.unwrap_or(f64::NAN),
            r.theory_mean
        );
    }
    println!("slope of ln(mean) against eps^-2: {:.3} (limit 2U(a) = 1)", table.kramers_slope.unwrap_or(f64::NAN));

    let p = PotentialSpec::quadratic(1.0)?;
    let unit = ExitDomain::bounded(1.0, 1.0)?;
    for eps in [0.2, 0.1, 0.05] {
        let stable = stable_exit_law(1.0, eps, &unit, 0.2)?.mean;
        println!("eps {eps:<5} ln mean: stable {:>7.3}, Brownian {:>9.3}", stable.ln(), kramers_log_mean_exit(eps, &p, 1.0));
    }
    Ok(())
}
