//! Single-well potentials, exit domains, and the deterministic gradient flow
//! `ẏ = -U'(y)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::integrate;

/// Left hand-off radius for half-line problems: beyond it the superquadratic
/// tail returns the flow to the well in bounded time, and grids stop there.
pub const DEFAULT_HANDOFF_RADIUS: f64 = 10.0;

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A user-supplied potential given as coupled `(U, U', U'')`.
pub struct CustomPotential {
    pub name: String,
    pub u: Box<ScalarFn>,
    pub du: Box<ScalarFn>,
    pub d2u: Box<ScalarFn>,
    /// `c₂` in `U(x) ~ c₁|x|^{2+c₂}` as `x → -∞`, if known.
    pub growth_exponent: Option<f64>,
}

/// The potential `U` together with its first two derivatives.
#[derive(Clone)]
pub enum PotentialSpec {
    /// `U = M x² / 2`.
    Quadratic { m: f64 },
    /// `U = M x² / 2 + κ x⁴ / 4`.
    HarmonicQuartic { m: f64, kappa: f64 },
    Custom(Arc<CustomPotential>),
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Quadratic { m } => write!(f, "Quadratic(M={m})"),
            Self::HarmonicQuartic { m, kappa } => write!(f, "HarmonicQuartic(M={m}, kappa={kappa})"),
            Self::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

impl PotentialSpec {
    pub fn quadratic(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(domain(format!("curvature M must be > 0, got {m}")));
        }
        Ok(Self::Quadratic { m })
    }

    pub fn harmonic_quartic(m: f64, kappa: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(domain(format!("curvature M must be > 0, got {m}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(domain(format!("quartic coefficient kappa must be > 0, got {kappa}")));
        }
        Ok(Self::HarmonicQuartic { m, kappa })
    }

    /// Wraps arbitrary closures. Nothing is checked here; run
    /// [`validate_potential`] before simulating.
    pub fn custom(
        name: impl Into<String>,
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        du: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        growth_exponent: Option<f64>,
    ) -> Self {
        Self::Custom(Arc::new(CustomPotential {
            name: name.into(),
            u: Box::new(u),
            du: Box::new(du),
            d2u: Box::new(d2u),
            growth_exponent,
        }))
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Quadratic { .. } => "quadratic",
            Self::HarmonicQuartic { .. } => "harmonic_quartic",
            Self::Custom(c) => &c.name,
        }
    }

    #[inline]
    pub fn u(&self, x: f64) -> f64 {
        match self {
            Self::Quadratic { m } => 0.5 * m * x * x,
            Self::HarmonicQuartic { m, kappa } => {
                let x2 = x * x;
                0.5 * m * x2 + 0.25 * kappa * x2 * x2
            }
            Self::Custom(c) => (c.u)(x),
        }
    }

    #[inline]
    pub fn du(&self, x: f64) -> f64 {
        match self {
            Self::Quadratic { m } => m * x,
            Self::HarmonicQuartic { m, kappa } => m * x + kappa * x * x * x,
            Self::Custom(c) => (c.du)(x),
        }
    }

    #[inline]
    pub fn d2u(&self, x: f64) -> f64 {
        match self {
            Self::Quadratic { m } => *m,
            Self::HarmonicQuartic { m, kappa } => m + 3.0 * kappa * x * x,
            Self::Custom(c) => (c.d2u)(x),
        }
    }

    /// `M = U''(0)`.
    pub fn curvature(&self) -> f64 {
        self.d2u(0.0)
    }

    pub fn growth_exponent(&self) -> Option<f64> {
        match self {
            Self::Quadratic { .. } => None,
            Self::HarmonicQuartic { .. } => Some(2.0),
            Self::Custom(c) => c.growth_exponent,
        }
    }
}

/// The set the process must stay in: `[-b, a]` or `(-∞, a]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExitDomain {
    Bounded { a: f64, b: f64 },
    HalfLine { a: f64 },
}

impl ExitDomain {
    pub fn bounded(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(domain(format!("interval endpoints need a, b > 0, got a={a}, b={b}")));
        }
        Ok(Self::Bounded { a, b })
    }

    pub fn half_line(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(domain(format!("half-line endpoint needs a > 0, got {a}")));
        }
        Ok(Self::HalfLine { a })
    }

    pub fn a(&self) -> f64 {
        match *self {
            Self::Bounded { a, .. } | Self::HalfLine { a } => a,
        }
    }

    pub fn b(&self) -> Option<f64> {
        match *self {
            Self::Bounded { b, .. } => Some(b),
            Self::HalfLine { .. } => None,
        }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Self::Bounded { a, b } => x >= -b && x <= a,
            Self::HalfLine { a } => x <= a,
        }
    }

    /// Distance from the origin to the nearest boundary.
    pub fn min_boundary_distance(&self) -> f64 {
        match *self {
            Self::Bounded { a, b } => a.min(b),
            Self::HalfLine { a } => a,
        }
    }

    /// Left end of the grid used for checks on this domain.
    fn left_end(&self) -> f64 {
        match *self {
            Self::Bounded { b, .. } => -b,
            Self::HalfLine { a } => -DEFAULT_HANDOFF_RADIUS.max(2.0 * a),
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail record of the geometric conditions on a potential.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(Check { name, passed, detail });
    }
}

const GRID_POINTS: usize = 401;
const FD_STEP: f64 = 1e-4;
const FD_TOL: f64 = 1e-5;

/// Checks the single-well conditions on a grid over the working domain:
/// `U(0) = 0`, `U'(0) = 0`, `U''(0) > 0`, `x·U'(x) > 0` away from the
/// origin, derivative consistency by central differences, and for half-line
/// domains superquadratic growth at `-∞`.
pub fn validate_potential(p: &PotentialSpec, dom: &ExitDomain) -> ValidationReport {
    let mut report = ValidationReport::default();

    let u0 = p.u(0.0);
    report.push("origin_value", u0.abs() <= 1e-12, format!("U(0) = {u0:e}"));
    let du0 = p.du(0.0);
    report.push("origin_stationary", du0.abs() <= 1e-12, format!("U'(0) = {du0:e}"));
    let m = p.d2u(0.0);
    report.push("curvature", m > 1e-12, format!("U''(0) = M = {m:e}"));

    let lo = dom.left_end();
    let hi = dom.a();
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();

    let bad_sign: Vec<f64> =
        grid.iter().copied().filter(|&x| x != 0.0 && !(x * p.du(x) > 0.0)).collect();
    report.push(
        "sign_condition",
        bad_sign.is_empty(),
        if bad_sign.is_empty() {
            format!("x·U'(x) > 0 on {GRID_POINTS} grid points in [{lo}, {hi}]")
        } else {
            format!("x·U'(x) <= 0 at {} point(s), first x = {}", bad_sign.len(), bad_sign[0])
        },
    );

    let mut worst = 0.0f64;
    let mut worst_at = f64::NAN;
    for &x in grid.iter().filter(|x| x.abs() >= 0.05) {
        let fd1 = (p.u(x + FD_STEP) - p.u(x - FD_STEP)) / (2.0 * FD_STEP);
        let fd2 = (p.du(x + FD_STEP) - p.du(x - FD_STEP)) / (2.0 * FD_STEP);
        let e1 = (fd1 - p.du(x)).abs() / p.du(x).abs().max(1e-8);
        let e2 = (fd2 - p.d2u(x)).abs() / p.d2u(x).abs().max(1e-8);
        if e1.max(e2) > worst {
            worst = e1.max(e2);
            worst_at = x;
        }
    }
    report.push(
        "derivative_consistency",
        worst < FD_TOL,
        format!("max relative finite-difference mismatch {worst:e} at x = {worst_at}"),
    );

    if let ExitDomain::HalfLine { .. } = dom {
        let (passed, detail) = growth_check(p);
        report.push("growth", passed, detail);
    }
    report
}

fn growth_check(p: &PotentialSpec) -> (bool, String) {
    let Some(c2) = p.growth_exponent() else {
        return (
            false,
            "half-line domain needs U(x) ~ c1|x|^(2+c2) with c2 > 0 at -inf; potential declares no growth exponent"
                .into(),
        );
    };
    if !(c2 > 0.0) {
        return (false, format!("growth exponent c2 = {c2} must be > 0 (total exponent > 2)"));
    }
    // U(-r)/r² must keep increasing along the left tail
    let radii: Vec<f64> =
        (0..20).map(|k| DEFAULT_HANDOFF_RADIUS * 10f64.powf(k as f64 / 10.0)).collect();
    let ratios: Vec<f64> = radii.iter().map(|&r| p.u(-r) / (r * r)).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    if increasing {
        (true, format!("c2 = {c2}; U(-r)/r^2 increasing on r in [{}, {:.0}]", radii[0], radii[19]))
    } else {
        (false, format!("c2 = {c2} declared but U(-r)/r^2 is not increasing on the left tail"))
    }
}

const FLOW_ABS_TOL: f64 = 1e-10;
const FLOW_REL_TOL: f64 = 1e-10;
const FLOW_MAX_STEPS: usize = 1_000_000;

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth- minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// `Y_t(x)`, the gradient flow `ẏ = -U'(y)` started at `x`, by adaptive
/// Dormand–Prince 5(4) with tolerance 1e-10.
pub fn flow(p: &PotentialSpec, x: f64, t: f64) -> Result<f64> {
    flow_with_tol(p, x, t, FLOW_ABS_TOL, FLOW_REL_TOL)
}

pub fn flow_with_tol(p: &PotentialSpec, x: f64, t: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain(format!("flow time must be >= 0, got {t}")));
    }
    if t == 0.0 || !x.is_finite() {
        return Ok(x);
    }
    let f = |y: f64| -p.du(y);
    let mut y = x;
    let mut elapsed = 0.0;
    let stiffness = p.d2u(x).abs().max(1e-12);
    let mut h = (0.01 / stiffness).min(t);
    let mut k1 = f(y);
    for _ in 0..FLOW_MAX_STEPS {
        if elapsed >= t {
            return Ok(y);
        }
        let last = elapsed + h >= t;
        if last {
            h = t - elapsed;
        }
        let k2 = f(y + h * A21 * k1);
        let k3 = f(y + h * (A31 * k1 + A32 * k2));
        let k4 = f(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(y_new);
        let err = (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        let scale = abs_tol + rel_tol * y.abs().max(y_new.abs());
        let ratio = err / scale;
        if !ratio.is_finite() {
            h *= 0.1;
            if h < 1e-300 {
                break;
            }
            continue;
        }
        if ratio <= 1.0 {
            y = y_new;
            k1 = k7;
            elapsed = if last { t } else { elapsed + h };
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(Error::Integration(format!(
        "flow from x={x} to t={t} did not converge (reached t={elapsed})"
    )))
}

/// One classical RK4 step of the flow; used where a fixed grid is required.
#[inline]
pub fn rk4_step(p: &PotentialSpec, y: f64, h: f64) -> f64 {
    let k1 = -p.du(y);
    let k2 = -p.du(y + 0.5 * h * k1);
    let k3 = -p.du(y + 0.5 * h * k2);
    let k4 = -p.du(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Time for the flow started anywhere in the domain to enter `[-δ, δ]`:
/// `max{∫_{-b}^{-δ} dy/(-U'), ∫_δ^a dy/U'}`. Half-line domains integrate
/// the left piece from the hand-off radius.
pub fn relaxation_time(p: &PotentialSpec, dom: &ExitDomain, delta: f64) -> Result<f64> {
    let left = -dom.left_end();
    let limit = dom.a().min(left);
    if !(delta > 0.0 && delta <= limit) {
        return Err(domain(format!("delta must lie in (0, {limit}], got {delta}")));
    }
    let right = integrate(|y| 1.0 / p.du(y), delta, dom.a(), 1e-13, 1e-11)?.value;
    let left = integrate(|y| -1.0 / p.du(y), -left, -delta, 1e-13, 1e-11)?.value;
    Ok(right.max(left))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_on_unit_interval_passes() {
        let p = PotentialSpec::quadratic(1.0).unwrap();
        let r = validate_potential(&p, &ExitDomain::bounded(1.0, 1.0).unwrap());
        assert!(r.passed(), "{r:?}");
        assert!(r.check("growth").is_none());
    }

    #[test]
    fn pure_quartic_fails_curvature() {
        let p = PotentialSpec::custom("quartic", |x| x.powi(4) / 4.0, |x| x.powi(3), |x| 3.0 * x * x, Some(2.0));
        let r = validate_potential(&p, &ExitDomain::bounded(1.0, 1.0).unwrap());
        assert!(!r.check("curvature").unwrap().passed);
        assert!(r.check("sign_condition").unwrap().passed);
    }

    #[test]
    fn half_line_needs_growth() {
        let dom = ExitDomain::half_line(1.0).unwrap();
        let q = validate_potential(&PotentialSpec::quadratic(1.0).unwrap(), &dom);
        assert!(!q.check("growth").unwrap().passed);
        let hq = validate_potential(&PotentialSpec::harmonic_quartic(1.0, 1.0).unwrap(), &dom);
        assert!(hq.passed(), "{hq:?}");
    }

    #[test]
    fn inconsistent_derivative_is_caught() {
        let p = PotentialSpec::custom("bad", |x| x * x / 2.0, |x| 1.1 * x, |_| 1.0, None);
        let r = validate_potential(&p, &ExitDomain::bounded(1.0, 1.0).unwrap());
        assert!(!r.check("derivative_consistency").unwrap().passed);
    }

    #[test]
    fn wrong_sign_is_caught() {
        // double well: U' changes sign at ±1/√2 inside the domain
        let p = PotentialSpec::custom(
            "double",
            |x| -x * x / 2.0 + x.powi(4),
            |x| -x + 4.0 * x.powi(3),
            |x| -1.0 + 12.0 * x * x,
            None,
        );
        let r = validate_potential(&p, &ExitDomain::bounded(1.0, 1.0).unwrap());
        assert!(!r.check("sign_condition").unwrap().passed);
        assert!(!r.check("curvature").unwrap().passed);
    }

    #[test]
    fn flow_examples() {
        let p = PotentialSpec::quadratic(2.0).unwrap();
        assert_eq!(flow(&p, 0.7, 0.0).unwrap(), 0.7);
        assert_eq!(flow(&p, 0.0, 3.0).unwrap(), 0.0);
        let y = flow(&p, 1.0, 1.0).unwrap();
        assert!((y - (-2.0f64).exp()).abs() < 1e-8, "{y}");
        assert!(flow(&p, 1.0, -1.0).is_err());
    }

    #[test]
    fn quartic_flow_from_far_left_returns() {
        // ẏ = -y - y³ has y(t)² = 1/((1 + 1/y0²) e^{2t} - 1)
        let p = PotentialSpec::harmonic_quartic(1.0, 1.0).unwrap();
        let y0: f64 = -1e4;
        let t: f64 = 0.5;
        let exact = -1.0 / (((1.0 + 1.0 / (y0 * y0)) * (2.0 * t).exp() - 1.0).sqrt());
        let y = flow(&p, y0, t).unwrap();
        assert!((y - exact).abs() < 1e-8, "{y} vs {exact}");
    }

    #[test]
    fn relaxation_time_examples() {
        let dom = ExitDomain::bounded(1.0, 1.0).unwrap();
        let p = PotentialSpec::quadratic(1.0).unwrap();
        let t = relaxation_time(&p, &dom, 0.1).unwrap();
        assert!((t - 10f64.ln()).abs() < 1e-9);
        let p3 = PotentialSpec::quadratic(3.0).unwrap();
        let t3 = relaxation_time(&p3, &dom, 0.1).unwrap();
        assert!((t3 - 10f64.ln() / 3.0).abs() < 1e-9);
        assert_eq!(relaxation_time(&p, &dom, 1.0).unwrap(), 0.0);
        assert!(relaxation_time(&p, &dom, 1.5).is_err());
        assert!(relaxation_time(&p, &dom, 0.0).is_err());
    }

    #[test]
    fn relaxation_bound_is_realized_at_boundary() {
        let dom = ExitDomain::bounded(1.0, 2.0).unwrap();
        let p = PotentialSpec::harmonic_quartic(1.5, 0.5).unwrap();
        let delta = 0.05;
        let t = relaxation_time(&p, &dom, delta).unwrap();
        for x in [1.0, -2.0] {
            let y = flow(&p, x, t).unwrap();
            assert!(y.abs() <= delta * (1.0 + 1e-6), "x={x}: {y}");
        }
    }
}
