//! Double-exponential (tanh-sinh) quadrature for integrands with integrable
//! power-law singularities at known points.
//!
//! The interval is cut at every singular point and each panel is integrated
//! with the tanh-sinh rule. Abscissae near a panel end are formed as
//! `end ± half_width * (1 - |x|)` with `1 - |x|` evaluated directly, so a
//! singular endpoint is approached to within the smallest representable
//! offset but never sampled.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::{Harmonic, Tolerance, WorldLine};

const T_MAX: f64 = 6.1;
const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 3;
const SNAP: f64 = 1e-14;
const TAIL: f64 = 1e-100;

/// An integrand `f` that behaves like `|t - t0|^exponent` near each of its
/// singular points.
pub struct SingularIntegrand<F> {
    evaluator: F,
    singular_points: Vec<f64>,
    exponent: f64,
}

impl<F: Fn(f64) -> f64> SingularIntegrand<F> {
    pub fn new(evaluator: F, mut singular_points: Vec<f64>, exponent: f64) -> Self {
        singular_points.retain(|p| p.is_finite());
        singular_points.sort_by(f64::total_cmp);
        singular_points.dedup();
        Self {
            evaluator,
            singular_points,
            exponent,
        }
    }

    /// An integrand without interior singularities.
    pub fn smooth(evaluator: F) -> Self {
        Self::new(evaluator, Vec::new(), 0.0)
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.evaluator)(t)
    }
}

/// `∫_a^b f` to within `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &SingularIntegrand<F>, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if f.exponent.is_nan() || f.exponent <= -1.0 {
        return Err(Error::NonIntegrableSingularity(f.exponent));
    }
    let tol = tol.validate()?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }

    let mut breaks = vec![a];
    for &p in &f.singular_points {
        let near = |e: f64| (p - e).abs() <= SNAP * e.abs().max(1.0);
        if p > a && p < b && !near(a) && !near(b) {
            breaks.push(p);
        }
    }
    breaks.push(b);

    let panels = (breaks.len() - 1) as f64;
    let panel_tol = Tolerance::new(tol.abs / panels, tol.rel);
    let mut sum = CompensatedSum::default();
    for w in breaks.windows(2) {
        sum.add(tanh_sinh(&f.evaluator, w[0], w[1], panel_tol)?);
    }
    Ok(sum.value())
}

/// Times in `[a, b]` where the harmonic position vanishes,
/// `t_max + (k + 1/2) pi / w`.
pub fn ho_zero_times(wl: &WorldLine, spec: &Harmonic, a: f64, b: f64) -> Result<Vec<f64>> {
    wl.require_moving()?;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidInterval { a, b });
    }
    let omega = spec.omega();
    let zero = |k: f64| wl.t_max + (k + 0.5) * PI / omega;
    let first = ((a - wl.t_max) * omega / PI - 0.5).ceil() - 1.0;
    let last = ((b - wl.t_max) * omega / PI - 0.5).floor() + 1.0;
    let mut k = first;
    let mut out = Vec::new();
    while k <= last {
        let t = zero(k);
        if t >= a && t <= b {
            out.push(t);
        }
        k += 1.0;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// `1 - x` for the abscissa `x = tanh(pi/2 sinh t)`.
    complement: f64,
    weight: f64,
}

/// Nodes with `t > 0` that are new at each refinement level.
fn node_table() -> &'static [Vec<Node>] {
    static TABLE: OnceLock<Vec<Vec<Node>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_LEVEL)
            .map(|level| {
                let h = 0.5f64.powi(level as i32);
                let (start, stride) = if level == 0 { (h, h) } else { (h, 2.0 * h) };
                let mut nodes = Vec::new();
                let mut t = start;
                while t <= T_MAX {
                    let u = FRAC_PI_2 * t.sinh();
                    let cosh_u = u.cosh();
                    let weight = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
                    let complement = 2.0 / (1.0 + (2.0 * u).exp());
                    if complement > 0.0 && weight > 0.0 {
                        nodes.push(Node { complement, weight });
                    }
                    t += stride;
                }
                nodes
            })
            .collect()
    })
}

fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    let half = 0.5 * (b - a);
    // Non-finite values in the far tail (offset below TAIL * half, or an
    // abscissa that rounds onto the endpoint) are dropped; anywhere else
    // they are an error.
    let eval = |t: f64, complement: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else if complement < TAIL || t == a || t == b {
            Ok(0.0)
        } else {
            Err(Error::NonFiniteIntegrand(t))
        }
    };

    let mut total = CompensatedSum::default();
    total.add(FRAC_PI_2 * eval(a + half, 1.0)?);
    let mut previous = f64::NAN;
    let mut error = f64::INFINITY;
    for (level, nodes) in node_table().iter().enumerate() {
        for node in nodes {
            let offset = half * node.complement;
            if offset == 0.0 {
                continue;
            }
            let c = node.complement;
            total.add(node.weight * (eval(a + offset, c)? + eval(b - offset, c)?));
        }
        let h = 0.5f64.powi(level as i32);
        let estimate = half * h * total.value();
        if level >= 1 {
            error = (estimate - previous).abs();
            if level >= MIN_LEVEL && error <= tol.bound(estimate) {
                return Ok(estimate);
            }
        }
        previous = estimate;
    }
    Err(Error::ToleranceNotMet {
        a,
        b,
        estimate: previous,
        error,
    })
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// `∫_0^{pi/2} sin^{-1/2}` from the Beta function, `B(1/4, 1/2) / 2`.
    fn beta_quarter() -> f64 {
        gamma(0.25) * gamma(0.5) / (2.0 * gamma(0.75))
    }

    #[test]
    fn sine_power_against_beta_identity() {
        let f = SingularIntegrand::new(|t: f64| t.sin().powf(-0.5), vec![0.0], -0.5);
        let v = integrate(&f, 0.0, FRAC_PI_2, tol()).unwrap();
        assert!((v - beta_quarter()).abs() < 1e-12, "{v}");
        assert!((v - 2.622058).abs() < 1e-6);
    }

    #[test]
    fn inverse_sqrt() {
        let f = SingularIntegrand::new(|t: f64| t.powf(-0.5), vec![0.0], -0.5);
        assert!((integrate(&f, 0.0, 1.0, tol()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn full_cycle_with_interior_singularities() {
        let f = SingularIntegrand::new(|t: f64| (t.sin() * t.sin()).powf(-0.25), vec![0.0, PI, 2.0 * PI], -0.5);
        let v = integrate(&f, 0.0, 2.0 * PI, tol()).unwrap();
        // sin(PI) is ~1.2e-16, not zero, which limits accuracy near PI.
        assert!((v - 4.0 * beta_quarter()).abs() < 1e-7, "{v}");
        assert!((v - 10.48823).abs() < 1e-5);
    }

    #[test]
    fn hierarchy_exponents() {
        for alpha in [-0.5, -2.0 / 3.0, -0.75, -0.8] {
            let f = SingularIntegrand::new(move |t: f64| t.powf(alpha), vec![0.0], alpha);
            let v = integrate(&f, 0.0, 1.0, tol()).unwrap();
            let exact = 1.0 / (alpha + 1.0);
            assert!((v - exact).abs() <= 1e-10 * exact, "alpha={alpha} v={v}");
        }
    }

    #[test]
    fn polynomials_are_exact() {
        let f = SingularIntegrand::smooth(|t: f64| 3.0 * t * t - 2.0 * t + 1.0);
        let v = integrate(&f, -1.0, 2.0, tol()).unwrap();
        assert!((v - 9.0).abs() < 1e-13);
    }

    #[test]
    fn additivity() {
        let f = SingularIntegrand::new(
            |t: f64| (t - 1.0).abs().powf(-0.5) * t.cos() + (t - 3.0).abs().powf(-0.25),
            vec![1.0, 3.0],
            -0.5,
        );
        let (a, b, c) = (0.0, 1.9, 4.0);
        let whole = integrate(&f, a, c, tol()).unwrap();
        let parts = integrate(&f, a, b, tol()).unwrap() + integrate(&f, b, c, tol()).unwrap();
        assert!((whole - parts).abs() <= 2e-10 * whole.max(1.0), "{whole} {parts}");
    }

    #[test]
    fn tighter_tolerance_does_not_worsen_error() {
        let f = SingularIntegrand::new(|t: f64| t.sin().powf(-0.5), vec![0.0], -0.5);
        let mut last = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
            let v = integrate(&f, 0.0, FRAC_PI_2, Tolerance::uniform(tol)).unwrap();
            let err = (v - beta_quarter()).abs();
            assert!(err <= last.max(1e-14), "tol={tol} err={err} last={last}");
            last = err;
        }
    }

    #[test]
    fn rejects_non_integrable_exponent() {
        let f = SingularIntegrand::new(|t: f64| 1.0 / t, vec![0.0], -1.0);
        assert_eq!(
            integrate(&f, 0.0, 1.0, tol()),
            Err(Error::NonIntegrableSingularity(-1.0))
        );
    }

    #[test]
    fn empty_and_reversed_intervals() {
        let f = SingularIntegrand::smooth(|_| 1.0);
        assert_eq!(integrate(&f, 2.0, 2.0, tol()), Ok(0.0));
        assert!(matches!(
            integrate(&f, 2.0, 1.0, tol()),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn singular_point_near_boundary_is_snapped() {
        let f = SingularIntegrand::new(|t: f64| t.abs().powf(-0.5), vec![1e-16], -0.5);
        let v = integrate(&f, 0.0, 1.0, tol()).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn zero_times() {
        let unit = Harmonic::new(1.0, 1.0).unwrap();
        let wl = WorldLine::new(1.0, 0.0).unwrap();
        let z = ho_zero_times(&wl, &unit, 0.0, 2.0 * PI).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0] - FRAC_PI_2).abs() < 1e-15 && (z[1] - 1.5 * PI).abs() < 1e-15);
        assert!(ho_zero_times(&wl, &unit, 0.0, PI / 4.0).unwrap().is_empty());

        let fast = Harmonic::new(1.0, 4.0).unwrap();
        let z = ho_zero_times(&wl, &fast, 0.0, PI).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0] - PI / 4.0).abs() < 1e-15 && (z[1] - 0.75 * PI).abs() < 1e-15);

        let rest = WorldLine::new(0.0, 0.0).unwrap();
        assert_eq!(ho_zero_times(&rest, &unit, 0.0, 1.0), Err(Error::DegenerateEnergy));
    }
}
