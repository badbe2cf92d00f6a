//! Brute-force reference: fixed-step classical Runge-Kutta integration of
//! `m y'' = F(y)` and event-based period measurement.
//!
//! Nothing here touches the map or the quadrature code, so it can be used to
//! check both.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::OscillatorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step: f64,
    pub method: Method,
    pub max_steps: u64,
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        Self {
            step,
            method: Method::Rk4,
            max_steps: 100_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::BadStep(self.step));
        }
        if self.max_steps == 0 {
            return Err(Error::StepCountExceeded { needed: 1, limit: 0 });
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::rk4(1e-4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub t: f64,
    pub y: f64,
    pub v: f64,
}

/// One classical RK4 step of size `h`.
pub fn rk4_step(spec: &OscillatorSpec, y: f64, v: f64, h: f64) -> (f64, f64) {
    let inv_m = 1.0 / spec.mass();
    let acc = |y: f64| spec.force(y) * inv_m;
    let (k1y, k1v) = (v, acc(y));
    let (k2y, k2v) = (v + 0.5 * h * k1v, acc(y + 0.5 * h * k1y));
    let (k3y, k3v) = (v + 0.5 * h * k2v, acc(y + 0.5 * h * k2y));
    let (k4y, k4v) = (v + h * k3v, acc(y + h * k3y));
    (
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

fn step_count(t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<u64> {
    cfg.validate()?;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::InvalidInterval { a: t0, b: t1 });
    }
    let needed = ((t1 - t0) / cfg.step).ceil();
    if needed > cfg.max_steps as f64 {
        return Err(Error::StepCountExceeded {
            needed: needed.min(u64::MAX as f64) as u64,
            limit: cfg.max_steps,
        });
    }
    Ok(needed as u64)
}

/// Trajectory on `[t0, t1]` with uniform steps no longer than `cfg.step`,
/// landing exactly on `t1`.
pub fn integrate_newton(
    spec: &OscillatorSpec,
    y0: f64,
    v0: f64,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<OracleRow>> {
    let steps = step_count(t0, t1, cfg)?;
    let mut rows = Vec::with_capacity(steps as usize + 1);
    rows.push(OracleRow { t: t0, y: y0, v: v0 });
    if steps == 0 {
        return Ok(rows);
    }
    let h = (t1 - t0) / steps as f64;
    let (mut y, mut v) = (y0, v0);
    for i in 1..=steps {
        (y, v) = rk4_step(spec, y, v, h);
        let t = if i == steps { t1 } else { t0 + h * i as f64 };
        rows.push(OracleRow { t, y, v });
    }
    Ok(rows)
}

/// Final state of [`integrate_newton`] without storing the path.
pub fn propagate(
    spec: &OscillatorSpec,
    y0: f64,
    v0: f64,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    let steps = step_count(t0, t1, cfg)?;
    let (mut y, mut v) = (y0, v0);
    if steps > 0 {
        let h = (t1 - t0) / steps as f64;
        for _ in 0..steps {
            (y, v) = rk4_step(spec, y, v, h);
        }
    }
    Ok((y, v))
}

/// Illinois false position on `s ∈ [0, h]` for a sign change of `g`.
fn refine(g: impl Fn(f64) -> f64, h: f64, g0: f64, gh: f64) -> f64 {
    let (mut a, mut b, mut fa, mut fb) = (0.0, h, g0, gh);
    let mut side = 0;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = g(c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Which turning point a period measurement starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurningPoint {
    Positive,
    Negative,
}

/// Period at energy `energy`: two consecutive sign changes of the velocity
/// bound a half period.
pub fn measure_period(spec: &OscillatorSpec, energy: f64, cfg: &IntegratorConfig) -> Result<f64> {
    measure_period_from(spec, energy, TurningPoint::Positive, cfg)
}

pub fn measure_period_from(
    spec: &OscillatorSpec,
    energy: f64,
    start: TurningPoint,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(Error::NegativeEnergy(energy));
    }
    if energy == 0.0 {
        return Err(Error::DegenerateEnergy);
    }
    let amplitude = spec.amplitude(energy);
    let (mut y, mut v) = match start {
        TurningPoint::Positive => (amplitude, 0.0),
        TurningPoint::Negative => (-amplitude, 0.0),
    };
    let h = cfg.step;
    let mut t = 0.0;
    let mut sign = 0.0;
    let mut events = Vec::with_capacity(2);
    for _ in 0..cfg.max_steps {
        let (ny, nv) = rk4_step(spec, y, v, h);
        if sign != 0.0 && (nv == 0.0 || nv.signum() != sign) {
            let s = if nv == 0.0 {
                h
            } else {
                refine(|s| rk4_step(spec, y, v, s).1, h, v, nv)
            };
            events.push(t + s);
            if events.len() == 2 {
                return Ok(2.0 * (events[1] - events[0]));
            }
            sign = -sign;
        } else if sign == 0.0 && nv != 0.0 {
            sign = nv.signum();
        }
        (y, v) = (ny, nv);
        t += h;
    }
    Err(Error::EventNotFound(cfg.max_steps))
}

/// Time taken to first reach position `target` from `(y0, v0)`.
pub fn transit_time(spec: &OscillatorSpec, y0: f64, v0: f64, target: f64, cfg: &IntegratorConfig) -> Result<f64> {
    cfg.validate()?;
    if y0 == target {
        return Ok(0.0);
    }
    let h = cfg.step;
    let (mut y, mut v, mut t) = (y0, v0, 0.0);
    let side = (y0 - target).signum();
    for _ in 0..cfg.max_steps {
        let (ny, nv) = rk4_step(spec, y, v, h);
        if (ny - target) * side <= 0.0 {
            let s = refine(|s| rk4_step(spec, y, v, s).0 - target, h, y - target, ny - target);
            return Ok(t + s);
        }
        (y, v) = (ny, nv);
        t += h;
    }
    Err(Error::EventNotFound(cfg.max_steps))
}

/// Largest relative deviation of the energy from its first-row value.
pub fn energy_drift(rows: &[OracleRow], spec: &OscillatorSpec) -> Result<f64> {
    let first = rows.first().ok_or(Error::EmptyTrajectory)?;
    let e0 = spec.energy(first.y, first.v);
    let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
    Ok(rows
        .iter()
        .map(|r| (spec.energy(r.y, r.v) - e0).abs() / scale)
        .fold(0.0, f64::max))
}
