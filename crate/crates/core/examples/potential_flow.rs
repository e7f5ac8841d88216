//! Potentials, their admissibility checks and the deterministic flow.
//!
//! ```text
//! cargo run --example potential_flow
//! ```

use levy_exit::potential::{flow, relaxation_time, validate_potential, ExitDomain, PotentialSpec};

fn main() -> levy_exit::Result<()> {
    let unit = ExitDomain::bounded(1.0, 1.0)?;
    let quad = PotentialSpec::quadratic(2.0)?;
    println!("quadratic(2) from x=1 after t=1: {:.9} (e^-2 = {:.9})", flow(&quad, 1.0, 1.0)?, (-2f64).exp());
    println!("relaxation into |x| < 0.1: {:.6}", relaxation_time(&quad, &unit, 0.1)?);

    let quartic = PotentialSpec::harmonic_quartic(1.0, 1.0)?;
    for x in [-50.0, -5.0, 0.9] {
        println!("harmonic-quartic from {x:>6} after t=0.5: {:+.6}", flow(&quartic, x, 0.5)?);
    }

    let half = ExitDomain::half_line(1.0)?;
    for (name, p) in [("quadratic", &quad), ("harmonic_quartic", &quartic)] {
        let report = validate_potential(p, &half);
        let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
        println!("{name} on the half-line: passed {} {failed:?}", report.passed());
    }

    let flat = PotentialSpec::custom(
        "x^4/4",
        |x| x.powi(4) / 4.0,
        |x| x.powi(3),
        |x| 3.0 * x * x,
        Some(2.0),
    );
    let report = validate_potential(&flat, &unit);
    println!("x^4/4 curvature check: {:?}", report.check("curvature").map(|c| c.passed));
    Ok(())
}
