//! Probability that small-jump paths leave the `cε^γ` tube around the flow
//! before the first large jump.
//!
//! ```text
//! cargo run --release --example tube_deviation
//! ```

use levy_exit::lab::{deviation_grid, ExperimentConfig};

fn main() -> levy_exit::Result<()> {
    let mut cfg = ExperimentConfig::new(1.0, vec![0.2, 0.1, 0.05]);
    cfg.tube_paths = 2000;
    cfg.seed = 3;
    let table = deviation_grid(&cfg)?;
    for r in &table.rows {
        println!(
            "eps {:<5} radius {:.3}: {:>4}/{} = {:.4} [{:.4}, {:.4}]",
            r.eps, r.radius, r.hits, r.n_paths, r.estimate, r.ci_low, r.ci_high
        );
    }
    println!(
        "fitted exponent {:.3}, bound exponent (alpha+gamma)/2 = {:.3}",
        table.exponent.unwrap_or(f64::NAN),
        table.bound_exponent
    );
    Ok(())
}
