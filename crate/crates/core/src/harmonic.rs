//! Closed-form harmonic oscillator world lines.

use std::f64::consts::PI;

use crate::model::{Harmonic, WorldLine};

/// `x(t) = sqrt(2E/k2) cos(w (t - t_max))`.
pub fn ho_position(spec: &Harmonic, wl: &WorldLine, t_hat: f64) -> f64 {
    spec.amplitude(wl.energy) * (spec.omega() * (t_hat - wl.t_max)).cos()
}

pub fn ho_velocity(spec: &Harmonic, wl: &WorldLine, t_hat: f64) -> f64 {
    let omega = spec.omega();
    -omega * spec.amplitude(wl.energy) * (omega * (t_hat - wl.t_max)).sin()
}

/// World line through `(x0, v0)` at time `t0`.
///
/// The phase comes from `atan2(-v0/w, x0)`, so `t_max` lies within half a
/// period of `t0`. The rest state yields `E = 0, t_max = t0`.
pub fn ho_from_initial(spec: &Harmonic, x0: f64, v0: f64, t0: f64) -> WorldLine {
    let energy = 0.5 * spec.mass * v0 * v0 + 0.5 * spec.k2 * x0 * x0;
    if energy == 0.0 {
        return WorldLine { energy, t_max: t0 };
    }
    let omega = spec.omega();
    let phase = (-v0 / omega).atan2(x0);
    WorldLine {
        energy,
        t_max: t0 - phase / omega,
    }
}

/// `2 pi sqrt(m / k2)`.
pub fn ho_period(spec: &Harmonic) -> f64 {
    2.0 * PI * (spec.mass / spec.k2).sqrt()
}
