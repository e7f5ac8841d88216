//! The stable scale constant `C(α) = ∫(1 - cos y)|y|^{-1-α} dy`, computed by
//! quadrature, and the characteristic exponent it produces.
//!
//! ```text
//! cargo run --example scale_constant
//! ```

use levy_exit::noise::{stable_scale_constant, StableNoiseSpec};

fn main() -> levy_exit::Result<()> {
    println!("{:>6} {:>16} {:>16}", "alpha", "C(alpha)", "psi(2)");
    for alpha in [0.25, 0.5, 1.0, 1.5, 1.75, 1.95] {
        let c = stable_scale_constant(alpha)?;
        let psi = StableNoiseSpec::stable(alpha)?.characteristic_exponent(2.0);
        println!("{alpha:>6} {c:>16.10} {psi:>16.10}");
    }
    println!("C(1) = pi: the Cauchy case");
    Ok(())
}
