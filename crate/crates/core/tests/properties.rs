//! Randomized properties of the closed forms and samplers.

use levy_exit::cli::{config_to_toml, parse_config_str};
use levy_exit::engine::{gamma_default, Scheme};
use levy_exit::lab::{stable_exit_law, ExperimentConfig, PotentialConfig};
use levy_exit::noise::{cms_standard, StableNoiseSpec};
use levy_exit::potential::{flow, ExitDomain, PotentialSpec};
use levy_exit::split::{intensity_beta, large_jump_from_uniform, rho_gamma_feasible, SplitSpec};
use proptest::prelude::*;

/// Region membership by the rearranged inequalities.
fn brute_force_member(alpha: f64, rho: f64, gamma: f64) -> bool {
    rho > 0.0 && rho < 1.0 && gamma > 0.0 && rho + 2.0 * gamma / (2.0 - alpha) < 1.0 && 2.0 * rho > 1.0 - gamma / alpha
}

proptest! {
    #[test]
    fn cms_is_odd_in_the_angle(alpha in 0.05f64..1.95, v in -1.5f64..1.5, w in 0.01f64..10.0) {
        let x = cms_standard(alpha, v, w);
        let y = cms_standard(alpha, -v, w);
        prop_assert!((x + y).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn intensity_times_threshold_power(alpha in 0.05f64..1.95, eps in 1e-4f64..1.0, rho in 0.01f64..0.99) {
        let spec = SplitSpec::new(alpha, eps, rho).unwrap();
        let lhs = spec.beta * spec.threshold.powf(alpha);
        prop_assert!((lhs * alpha / 2.0 - 1.0).abs() < 1e-12);
        prop_assert!((intensity_beta(alpha, eps, rho).unwrap() - spec.beta).abs() <= 1e-15 * spec.beta);
        prop_assert!((spec.mean_gap() * spec.beta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn large_jump_inverse_cdf_is_monotone(alpha in 0.1f64..1.9, u1 in 1e-6f64..1.0, u2 in 1e-6f64..1.0) {
        let spec = SplitSpec::with_default_rho(alpha, 0.05).unwrap();
        let a = large_jump_from_uniform(&spec, u1, true).w;
        let b = large_jump_from_uniform(&spec, u2, false).w;
        prop_assert!(a >= spec.threshold && -b >= spec.threshold);
        if u1 < u2 {
            prop_assert!(a >= -b);
        }
        // Pareto survival at the drawn height recovers u
        prop_assert!(((spec.threshold / a).powf(alpha) - u1).abs() < 1e-9);
    }

    #[test]
    fn feasibility_matches_brute_force(alpha in 0.05f64..1.95, rho in -0.2f64..1.2, gamma in -0.2f64..1.2) {
        let f = rho_gamma_feasible(alpha, rho, gamma);
        prop_assert_eq!(f.feasible, brute_force_member(alpha, rho, gamma));
        prop_assert_eq!(f.feasible, f.violations.is_empty());
    }

    #[test]
    fn default_gamma_is_feasible_at_half(alpha in 0.05f64..1.95) {
        let g = gamma_default(alpha);
        prop_assert!(rho_gamma_feasible(alpha, 0.5, g).feasible);
        prop_assert!(g < (2.0 - alpha) / 4.0);
    }

    #[test]
    fn pure_stable_exponent_is_homogeneous(alpha in 0.1f64..1.9, lambda in 0.01f64..20.0, c in 0.1f64..5.0) {
        let spec = StableNoiseSpec::stable(alpha).unwrap();
        let lhs = spec.characteristic_exponent(c * lambda);
        let rhs = c.powf(alpha) * spec.characteristic_exponent(lambda);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        prop_assert_eq!(spec.characteristic_exponent(-lambda), spec.characteristic_exponent(lambda));
    }

    #[test]
    fn predicted_mean_decreases_in_eps(alpha in 0.1f64..1.9, e1 in 1e-3f64..0.5, e2 in 1e-3f64..0.5) {
        prop_assume!((e1 - e2).abs() > 1e-9);
        let dom = ExitDomain::bounded(1.0, 0.7).unwrap();
        let m1 = stable_exit_law(alpha, e1, &dom, gamma_default(alpha)).unwrap().mean;
        let m2 = stable_exit_law(alpha, e2, &dom, gamma_default(alpha)).unwrap().mean;
        prop_assert_eq!(e1 < e2, m1 > m2);
    }

    #[test]
    fn gradient_flow_contracts(x in -3.0f64..3.0, t in 0.0f64..5.0, kappa in 0.0f64..2.0) {
        let p = PotentialSpec::harmonic_quartic(1.0, kappa).unwrap();
        let y = flow(&p, x, t).unwrap();
        prop_assert!(y.abs() <= x.abs() + 1e-12);
        prop_assert!(y * x >= 0.0);
    }

    #[test]
    fn config_text_round_trips(
        alpha in 0.05f64..1.95,
        eps in prop::collection::vec(1e-3f64..0.5, 1..5),
        n in 0u64..10_000,
        seed in 0u64..(i64::MAX as u64),
        quartic in any::<bool>(),
        jump in any::<bool>(),
    ) {
        let mut cfg = ExperimentConfig::new(alpha, eps);
        cfg.n_paths = n;
        cfg.seed = seed;
        if quartic {
            cfg.potential = PotentialConfig::HarmonicQuartic { m: 1.5, kappa: 0.25 };
            cfg.domain = ExitDomain::half_line(0.8).unwrap();
        }
        if jump {
            cfg.scheme = Scheme::JumpAdapted;
        }
        let back = parse_config_str(&config_to_toml(&cfg)).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
