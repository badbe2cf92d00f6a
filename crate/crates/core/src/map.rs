//! Energy-preserving linearization maps from a harmonic oscillator onto a
//! second harmonic oscillator or onto a member of the even-power hierarchy.
//!
//! Space is deformed algebraically so that potential energies match with
//! the sign of the coordinate preserved; time is deformed so that the
//! velocities (hence momenta, the masses being equal) match. The target
//! time is the integral of the rate `dt/dt_hat` along the harmonic world
//! line, which diverges like `|x|^(-(n-1)/n)` at every zero of `x`.
//!
//! A harmonic target is handled as the `n = 1` member, which reduces the
//! general formulas to the algebraic harmonic-to-harmonic rescaling.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{KinState, MapPair, Tolerance, WorldLine};
use crate::quadrature::{integrate, SingularIntegrand};

/// `x~ = sqrt(k2 / k2~) x`.
pub fn space_map_h2h(k2: f64, k2_tilde: f64, x: f64) -> f64 {
    (k2 / k2_tilde).sqrt() * x
}

/// `t~ - t~_max = sqrt(k2 / k2~) (t_hat - t_hat_max)`.
pub fn time_map_h2h(k2: f64, k2_tilde: f64, dt_hat: f64) -> f64 {
    (k2 / k2_tilde).sqrt() * dt_hat
}

/// `y = (n k2 / k)^(1/2n) sgn(x) |x|^(1/n)`.
pub fn space_map_forward(pair: &MapPair, x: f64) -> f64 {
    let n = pair.n() as f64;
    let coef = (n * pair.source.k2 / pair.target.stiffness()).powf(0.5 / n);
    signed_pow(x, 1.0 / n) * coef
}

/// `x = (k / n k2)^(1/2) sgn(y) |y|^n`.
pub fn space_map_inverse(pair: &MapPair, y: f64) -> f64 {
    let n = pair.n();
    let coef = (pair.target.stiffness() / (n as f64 * pair.source.k2)).sqrt();
    coef * y.signum() * y.abs().powi(n as i32)
}

/// `dt/dt_hat = n^(-(2n-1)/2n) (k2/k)^(1/2n) |x|^(-(n-1)/n)`, the derivative
/// of [`space_map_forward`].
pub fn time_rate_forward(pair: &MapPair, x: f64) -> Result<f64> {
    if x == 0.0 && pair.n() > 1 {
        return Err(Error::SingularAtZero);
    }
    Ok(RateForward::new(pair).at(x))
}

/// `dt_hat/dt = sqrt(n) (k/k2)^(1/2) |y|^(n-1)`, the ratio of the target
/// force to the harmonic force at matched coordinates.
pub fn time_rate_inverse(pair: &MapPair, y: f64) -> f64 {
    let n = pair.n();
    (n as f64).sqrt() * (pair.target.stiffness() / pair.source.k2).sqrt() * y.abs().powi(n as i32 - 1)
}

fn signed_pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(p)
    }
}

/// `dt/dt_hat` with its constant factored out.
#[derive(Debug, Clone, Copy)]
struct RateForward {
    coef: f64,
    exponent: f64,
}

impl RateForward {
    fn new(pair: &MapPair) -> Self {
        let n = pair.n() as f64;
        let coef = n.powf(-(2.0 * n - 1.0) / (2.0 * n)) * (pair.source.k2 / pair.target.stiffness()).powf(0.5 / n);
        Self {
            coef,
            exponent: -(n - 1.0) / n,
        }
    }

    fn at(&self, x: f64) -> f64 {
        self.coef * x.abs().powf(self.exponent)
    }
}

/// A pairing of one harmonic time with one target time, fixing the
/// integration constant of the time deformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeAnchor {
    pub t_hat_ref: f64,
    pub t_ref: f64,
}

impl TimeAnchor {
    pub fn new(t_hat_ref: f64, t_ref: f64) -> Self {
        Self { t_hat_ref, t_ref }
    }
}

/// Position on a harmonic world line measured from its zeros:
/// `w (t_hat - t_max) = pi/2 + half_cycle * pi + offset`, `|offset| <= pi/2`.
///
/// Near a zero of `x` the offset keeps full relative precision, which an
/// absolute time cannot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub half_cycle: f64,
    pub offset: f64,
}

impl Phase {
    fn parity(&self) -> f64 {
        if self.half_cycle.rem_euclid(2.0) == 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Time deformation prepared for one map pair and one world line.
#[derive(Debug, Clone)]
pub struct Deformation {
    pair: MapPair,
    world_line: WorldLine,
    amplitude: f64,
    omega: f64,
    rate: RateForward,
    /// Target time elapsed between a zero of `x` and the next turning point.
    quarter: f64,
    tol: Tolerance,
}

impl Deformation {
    pub fn new(pair: &MapPair, wl: &WorldLine, tol: Tolerance) -> Result<Self> {
        wl.require_moving()?;
        let tol = tol.validate()?;
        let mut d = Self {
            pair: *pair,
            world_line: *wl,
            amplitude: pair.source.amplitude(wl.energy),
            omega: pair.source.omega(),
            rate: RateForward::new(pair),
            quarter: 0.0,
            tol,
        };
        d.quarter = d.offset_integral(FRAC_PI_2)?;
        Ok(d)
    }

    pub fn pair(&self) -> &MapPair {
        &self.pair
    }

    pub fn world_line(&self) -> &WorldLine {
        &self.world_line
    }

    /// Target period: one full harmonic cycle mapped through the deformation.
    pub fn period(&self) -> f64 {
        4.0 * self.quarter
    }

    pub fn phase(&self, t_hat: f64) -> Phase {
        let u = self.omega * (t_hat - self.world_line.t_max) - FRAC_PI_2;
        let half_cycle = (u / PI).round();
        Phase {
            half_cycle,
            offset: u - half_cycle * PI,
        }
    }

    pub fn time_of(&self, phase: Phase) -> f64 {
        self.world_line.t_max + (FRAC_PI_2 + phase.half_cycle * PI + phase.offset) / self.omega
    }

    /// Harmonic position and velocity at `phase`.
    pub fn harmonic_state(&self, phase: Phase) -> (f64, f64) {
        let s = phase.parity();
        let x = -s * self.amplitude * phase.offset.sin();
        let v = -s * self.amplitude * self.omega * phase.offset.cos();
        (x, v)
    }

    /// Signed target time from the zero of `x` at the start of the half
    /// cycle to `offset` within it.
    fn offset_integral(&self, offset: f64) -> Result<f64> {
        let (amplitude, omega, rate) = (self.amplitude, self.omega, self.rate);
        let integrand = SingularIntegrand::new(
            move |s: f64| rate.at(amplitude * s.sin()) / omega,
            vec![0.0],
            rate.exponent,
        );
        let value = integrate(&integrand, 0.0, offset.abs(), self.tol)?;
        Ok(value.copysign(offset))
    }

    /// Monotone target-time coordinate of a phase.
    fn cumulative(&self, phase: Phase) -> Result<f64> {
        Ok(2.0 * self.quarter * phase.half_cycle + self.offset_integral(phase.offset)?)
    }

    /// `t_b - t_a`; negative when `t_hat_b < t_hat_a`.
    pub fn delta(&self, t_hat_a: f64, t_hat_b: f64) -> Result<f64> {
        if t_hat_a == t_hat_b {
            return Ok(0.0);
        }
        let (pa, pb) = (self.phase(t_hat_a), self.phase(t_hat_b));
        let whole = 2.0 * self.quarter * (pb.half_cycle - pa.half_cycle);
        Ok(whole + (self.offset_integral(pb.offset)? - self.offset_integral(pa.offset)?))
    }

    /// The phase reached after target time `dt` has elapsed since `from`.
    ///
    /// Half cycles are counted exactly; within the final half cycle the
    /// offset is found by bisection on the monotone partial integral.
    pub fn invert(&self, from: Phase, dt: f64) -> Result<Phase> {
        if !dt.is_finite() {
            return Err(Error::RootBracketFailure(dt));
        }
        let half = 2.0 * self.quarter;
        let goal = self.cumulative(from)? + dt;
        let half_cycle = (goal / half).round();
        let residual = goal - half_cycle * half;
        let target = residual.abs().min(self.quarter);
        if residual.abs() > self.quarter * (1.0 + 1e-9) {
            return Err(Error::RootBracketFailure(dt));
        }

        let (mut lo, mut hi) = (0.0, FRAC_PI_2);
        for _ in 0..1100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-12 * hi {
                break;
            }
            if self.offset_integral(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Phase {
            half_cycle,
            offset: (0.5 * (lo + hi)).copysign(residual),
        })
    }

    /// Target time at `phase` minus the monotone coordinate of `phase`,
    /// for the clock fixed by `anchor`.
    pub fn clock_offset(&self, anchor: &TimeAnchor) -> Result<f64> {
        Ok(anchor.t_ref - self.cumulative(self.phase(anchor.t_hat_ref))?)
    }

    /// Target state at `phase` on the clock given by [`Self::clock_offset`].
    pub fn target_state_on(&self, phase: Phase, clock_offset: f64) -> Result<KinState> {
        let (x, v) = self.harmonic_state(phase);
        let t = clock_offset + self.cumulative(phase)?;
        Ok(KinState::new(t, space_map_forward(&self.pair, x), v))
    }

    /// Target state at `phase` with the anchor's clock.
    pub fn target_state(&self, phase: Phase, anchor: &TimeAnchor) -> Result<KinState> {
        if self.phase(anchor.t_hat_ref) == phase {
            let (x, v) = self.harmonic_state(phase);
            return Ok(KinState::new(anchor.t_ref, space_map_forward(&self.pair, x), v));
        }
        self.target_state_on(phase, self.clock_offset(anchor)?)
    }
}

/// `t_b - t_a = ∫ dt/dt_hat (x(t_hat)) dt_hat` over `[t_hat_a, t_hat_b]`.
pub fn time_deform(pair: &MapPair, wl: &WorldLine, t_hat_a: f64, t_hat_b: f64, tol: Tolerance) -> Result<f64> {
    Deformation::new(pair, wl, tol)?.delta(t_hat_a, t_hat_b)
}

/// Target state paired with the harmonic state at `t_hat`.
pub fn map_state(pair: &MapPair, wl: &WorldLine, t_hat: f64, anchor: &TimeAnchor, tol: Tolerance) -> Result<KinState> {
    let d = Deformation::new(pair, wl, tol)?;
    d.target_state(d.phase(t_hat), anchor)
}

/// `∫_0^{pi/2} sin(θ)^(-p) dθ` for `0 <= p < 1`.
pub fn sine_power_integral(p: f64, tol: Tolerance) -> Result<f64> {
    let f = SingularIntegrand::new(move |t: f64| t.sin().powf(-p), vec![0.0], -p);
    integrate(&f, 0.0, FRAC_PI_2, tol)
}

/// The period-ratio constant `pi^-1 ∫_0^{pi/2} sin(θ)^(-1/2) dθ` of the
/// quartic oscillator.
pub fn period_ratio_constant(tol: Tolerance) -> Result<f64> {
    Ok(sine_power_integral(0.5, tol)? / PI)
}

/// Period of the target oscillator at energy `energy`.
///
/// Substituting `θ = w t_hat` into one harmonic cycle of the deformation and
/// folding by symmetry gives
/// `4 c A^(-(n-1)/n) / w · ∫_0^{pi/2} sin(θ)^(-(n-1)/n) dθ`,
/// with `c` the rate coefficient and `A` the harmonic amplitude. For the
/// quartic this is `tau_ho (k2^2 / k4 E)^(1/4) · period_ratio_constant`.
pub fn target_period(pair: &MapPair, energy: f64, tol: Tolerance) -> Result<f64> {
    WorldLine::new(energy, 0.0)?.require_moving()?;
    let rate = RateForward::new(pair);
    let amplitude = pair.source.amplitude(energy);
    let omega = pair.source.omega();
    let integral = sine_power_integral(-rate.exponent, tol)?;
    Ok(4.0 * rate.coef * amplitude.powf(rate.exponent) / omega * integral)
}
