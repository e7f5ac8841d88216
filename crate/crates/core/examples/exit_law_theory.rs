//! Closed-form exit laws: mean, rate, survival and the sandwich bounds.
//!
//! ```text
//! cargo run --example exit_law_theory
//! ```

use levy_exit::engine::gamma_default;
use levy_exit::lab::{stable_exit_law, exit_law_sandwich, theta};
use levy_exit::potential::ExitDomain;

fn main() -> levy_exit::Result<()> {
    let unit = ExitDomain::bounded(1.0, 1.0)?;
    let half = ExitDomain::half_line(2.0)?;
    for alpha in [0.5, 1.0, 1.5] {
        println!("alpha {alpha}: theta [-1,1] = {}, theta (-inf,2] = {}", theta(&unit, alpha), theta(&half, alpha));
    }
    for eps in [0.1, 0.05, 0.02, 0.01] {
        let p = stable_exit_law(1.0, eps, &unit, gamma_default(1.0))?;
        let h = stable_exit_law(1.0, eps, &half, gamma_default(1.0))?;
        println!("eps {eps:<5} mean [-1,1] {:>8.2}  mean (-inf,2] {:>8.2}", p.mean, h.mean);
    }

    let p = stable_exit_law(1.0, 0.05, &unit, gamma_default(1.0))?;
    println!("survival and sandwich with C = 0.5 (delta = {}):", p.delta);
    for u in [0.0, 5.0, 10.0, 20.0, 40.0] {
        let (lo, hi) = exit_law_sandwich(u, 0.05, &p, 0.5);
        println!("  u {u:>4}: {lo:.4} <= {:.4} <= {hi:.4}", p.survival(u));
    }
    Ok(())
}
