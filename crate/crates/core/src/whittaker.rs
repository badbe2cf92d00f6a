//! Time of flight from the energy relation: solving `E = m v^2 / 2 + V(y)`
//! for the speed and integrating `dy / v(y)` along a monotone leg.
//!
//! This is independent of the linearization map and serves as a second
//! check on its time deformation.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::model::{OscillatorSpec, Tolerance};
use crate::quadrature::{integrate, SingularIntegrand};

/// Sign of the velocity along a leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Forward,
    Backward,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Forward => 1.0,
            Branch::Backward => -1.0,
        }
    }
}

fn require_energy(energy: f64) -> Result<()> {
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(Error::NegativeEnergy(energy));
    }
    if energy == 0.0 {
        return Err(Error::DegenerateEnergy);
    }
    Ok(())
}

/// `a^(2n) - b^(2n) = (a - b) * sum_{j<2n} a^j b^(2n-1-j)`; this is the sum.
fn power_difference_factor(a: f64, b: f64, two_n: u32) -> f64 {
    let mut sum = 0.0;
    let mut aj = 1.0;
    for j in 0..two_n {
        sum += aj * b.powi((two_n - 1 - j) as i32);
        aj *= a;
    }
    sum
}

/// Time from `|y| = y_max - w_hi` to `|y| = y_max - w_lo` on the outward
/// leg, integrated in the distance `w` from the turning point so that
/// `E - V` near the turning point is formed without cancellation.
fn outward_time(spec: &OscillatorSpec, y_max: f64, w_lo: f64, w_hi: f64, tol: Tolerance) -> Result<f64> {
    let two_n = 2 * spec.n();
    let k_over = spec.stiffness() / two_n as f64;
    let two_over_m = 2.0 / spec.mass();
    let f = SingularIntegrand::new(
        move |w: f64| {
            let kinetic = k_over * w * power_difference_factor(y_max, y_max - w, two_n);
            1.0 / (two_over_m * kinetic).sqrt()
        },
        vec![0.0],
        -0.5,
    );
    integrate(&f, w_lo, w_hi, tol)
}

/// Positive time to travel from `y_a` to `y_b` with the velocity sign
/// `branch`, `Δt = ∫ dy / (±sqrt(2/m) sqrt(E - V(y)))`.
///
/// Either endpoint may be a turning point. A leg that runs against its
/// branch would have to bounce off a turning point and is refused.
pub fn whittaker_time(
    spec: &OscillatorSpec,
    energy: f64,
    y_a: f64,
    y_b: f64,
    branch: Branch,
    tol: Tolerance,
) -> Result<f64> {
    require_energy(energy)?;
    let y_max = spec.amplitude(energy);
    let clamp = |y: f64| {
        if !y.is_finite() || y.abs() > y_max * (1.0 + 1e-12) {
            Err(Error::EnergeticallyForbidden(y))
        } else {
            Ok(y.clamp(-y_max, y_max))
        }
    };
    let (ya, yb) = (clamp(y_a)?, clamp(y_b)?);
    if ya == yb {
        return Ok(0.0);
    }
    if (yb - ya).signum() != branch.sign() {
        return Err(Error::TurningPointInterior { from: y_a, to: y_b });
    }
    let (lo, hi) = (ya.min(yb), ya.max(yb));
    if lo >= 0.0 {
        outward_time(spec, y_max, y_max - hi, y_max - lo, tol)
    } else if hi <= 0.0 {
        outward_time(spec, y_max, y_max + lo, y_max + hi, tol)
    } else {
        Ok(outward_time(spec, y_max, y_max - hi, y_max, tol)? + outward_time(spec, y_max, y_max + lo, y_max, tol)?)
    }
}

/// Time of flight in the angle `θ` defined by
/// `sin θ = sqrt(k / 2nE) sgn(y) |y|^n`, with `cos θ` carrying the sign of
/// the velocity. Then `E - V = E cos^2 θ` and
/// `dt = y_max / (n sqrt(2E/m)) |sin θ|^(-(n-1)/n) dθ`;
/// for the quartic, `sqrt(m) (4E/k)^(1/4) / (2 sqrt(2E)) (sin^2 θ)^(-1/4) dθ`.
///
/// `θ` increases monotonically with time around the whole cycle, so any
/// `θ_a <= θ_b` is accepted; `θ_a > θ_b` gives the negated value.
pub fn whittaker_time_theta(
    spec: &OscillatorSpec,
    energy: f64,
    theta_a: f64,
    theta_b: f64,
    tol: Tolerance,
) -> Result<f64> {
    require_energy(energy)?;
    if !(theta_a.is_finite() && theta_b.is_finite()) {
        return Err(Error::InvalidInterval { a: theta_a, b: theta_b });
    }
    if theta_a == theta_b {
        return Ok(0.0);
    }
    let n = spec.n() as f64;
    let p = (n - 1.0) / n;
    let prefactor = spec.amplitude(energy) / (n * (2.0 * energy / spec.mass()).sqrt());
    let f = SingularIntegrand::new(move |t: f64| t.sin().abs().powf(-p), vec![0.0], -p);
    let from_zero = |r: f64| -> Result<f64> { Ok(integrate(&f, 0.0, r.abs(), tol)?.copysign(r)) };
    let half = 2.0 * from_zero(FRAC_PI_2)?;
    // θ = j pi + r with |r| <= pi/2; each half turn contributes `half`.
    let split = |theta: f64| {
        let j = (theta / PI).round();
        (j, theta - j * PI)
    };
    let ((ja, ra), (jb, rb)) = (split(theta_a), split(theta_b));
    let integral = half * (jb - ja) + (from_zero(rb)? - from_zero(ra)?);
    Ok(prefactor * integral)
}

/// Position on the forward branch corresponding to angle `θ ∈ [-pi/2, pi/2]`.
pub fn position_of_theta(spec: &OscillatorSpec, energy: f64, theta: f64) -> f64 {
    let n = spec.n() as f64;
    let s = theta.sin();
    if s == 0.0 {
        return 0.0;
    }
    let scale = 2.0 * n * energy / spec.stiffness();
    (s.abs() * scale.sqrt()).powf(1.0 / n).copysign(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Harmonic, PowerLaw};
    use std::f64::consts::SQRT_2;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn quartic() -> OscillatorSpec {
        PowerLaw::quartic(1.0, 1.0).unwrap().into()
    }

    const QUARTER: f64 = 1.311_028_777_146_059_9;

    #[test]
    fn quarter_periods() {
        let q = whittaker_time(&quartic(), 1.0, 0.0, SQRT_2, Branch::Forward, tol()).unwrap();
        assert!((q - QUARTER).abs() < 1e-12, "{q}");
        assert!((q - 1.31103).abs() < 1e-5);
        let h: OscillatorSpec = Harmonic::new(1.0, 1.0).unwrap().into();
        let q = whittaker_time(&h, 1.0, 0.0, SQRT_2, Branch::Forward, tol()).unwrap();
        assert!((q - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(
            whittaker_time(&quartic(), 1.0, 0.3, 0.3, Branch::Backward, tol()),
            Ok(0.0)
        );
    }

    #[test]
    fn leg_errors() {
        assert_eq!(
            whittaker_time(&quartic(), 1.0, 0.0, 2.0, Branch::Forward, tol()),
            Err(Error::EnergeticallyForbidden(2.0))
        );
        assert!(matches!(
            whittaker_time(&quartic(), 1.0, 1.0, 0.5, Branch::Forward, tol()),
            Err(Error::TurningPointInterior { .. })
        ));
        assert_eq!(
            whittaker_time(&quartic(), 0.0, 0.0, 0.0, Branch::Forward, tol()),
            Err(Error::DegenerateEnergy)
        );
    }

    #[test]
    fn additivity_and_reversal() {
        let s = quartic();
        let f = |a: f64, b: f64, br| whittaker_time(&s, 1.0, a, b, br, tol()).unwrap();
        let whole = f(-1.2, 1.3, Branch::Forward);
        let parts = f(-1.2, 0.4, Branch::Forward) + f(0.4, 1.3, Branch::Forward);
        assert!((whole - parts).abs() < 1e-12);
        assert_eq!(f(-1.2, 1.3, Branch::Forward), f(1.3, -1.2, Branch::Backward));
    }

    #[test]
    fn theta_quarter_matches_position_form() {
        let q = whittaker_time_theta(&quartic(), 1.0, 0.0, FRAC_PI_2, tol()).unwrap();
        assert!((q - QUARTER).abs() < 1e-12, "{q}");
        assert_eq!(whittaker_time_theta(&quartic(), 1.0, 0.7, 0.7, tol()), Ok(0.0));
        let full = whittaker_time_theta(&quartic(), 1.0, 0.0, 2.0 * PI, tol()).unwrap();
        assert!((full - 4.0 * QUARTER).abs() < 1e-11);
    }

    #[test]
    fn theta_and_position_forms_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for n in 2..=5 {
            let spec: OscillatorSpec = PowerLaw::new(1.3, n, 0.9).unwrap().into();
            for _ in 0..20 {
                let e = rng.gen_range(0.1..5.0);
                let mut a: f64 = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
                let mut b: f64 = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                let by_theta = whittaker_time_theta(&spec, e, a, b, tol()).unwrap();
                let ya = position_of_theta(&spec, e, a);
                let yb = position_of_theta(&spec, e, b);
                let by_y = whittaker_time(&spec, e, ya, yb, Branch::Forward, tol()).unwrap();
                assert!(
                    (by_theta - by_y).abs() <= 1e-8 * by_y.max(1e-3),
                    "n={n} {by_theta} {by_y}"
                );
            }
        }
    }

    #[test]
    fn printed_prefactor_does_not_reproduce_quarter_period() {
        // dθ / (2 sqrt(2mE) (sin^2 θ)^(1/2)) is not integrable at θ = 0, so
        // compare on a leg that stays clear of it.
        let (a, b) = (0.3, 1.2);
        let ours = whittaker_time_theta(&quartic(), 1.0, a, b, tol()).unwrap();
        let f = SingularIntegrand::smooth(|t: f64| 1.0 / (2.0 * 2f64.sqrt() * t.sin()));
        let printed = integrate(&f, a, b, tol()).unwrap();
        let by_y = whittaker_time(
            &quartic(),
            1.0,
            position_of_theta(&quartic(), 1.0, a),
            position_of_theta(&quartic(), 1.0, b),
            Branch::Forward,
            tol(),
        )
        .unwrap();
        assert!((ours - by_y).abs() < 1e-10);
        assert!((printed - by_y).abs() > 1e-2);
    }
}
