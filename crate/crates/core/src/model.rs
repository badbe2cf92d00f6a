//! Oscillator descriptions, world lines and kinematic states.
//!
//! All quantities are plain `f64` in whatever consistent unit system the
//! caller picks. The harmonic oscillator carries its own tag but behaves as
//! the `n = 1` member of the even-power family `V(y) = k y^(2n) / 2n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance.
pub const ABS_TOL: f64 = 1e-10;
/// Default relative tolerance.
pub const REL_TOL: f64 = 1e-8;

/// Mixed absolute/relative tolerance: `|err| <= abs + rel * |value|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Same value for both parts.
    pub const fn uniform(tol: f64) -> Self {
        Self { abs: tol, rel: tol }
    }

    pub fn validate(self) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(self.abs) && ok(self.rel) && (self.abs > 0.0 || self.rel > 0.0) {
            Ok(self)
        } else {
            Err(Error::BadTolerance {
                abs: self.abs,
                rel: self.rel,
            })
        }
    }

    pub fn bound(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    /// Quadrature default: 1e-10 absolute and 1e-10 relative.
    fn default() -> Self {
        Self::uniform(ABS_TOL)
    }
}

/// Harmonic oscillator `m x'' = -k2 x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub mass: f64,
    pub k2: f64,
}

impl Harmonic {
    pub fn new(mass: f64, k2: f64) -> Result<Self> {
        let spec = Self { mass, k2 };
        validate_spec(OscillatorSpec::Harmonic(spec))?;
        Ok(spec)
    }

    pub fn omega(&self) -> f64 {
        (self.k2 / self.mass).sqrt()
    }

    /// Amplitude `sqrt(2E/k2)` of a world line with energy `energy`.
    pub fn amplitude(&self, energy: f64) -> f64 {
        (2.0 * energy / self.k2).sqrt()
    }
}

/// Attractive even-power oscillator `m y'' = -k y^(2n-1)`, `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub mass: f64,
    pub n: u32,
    pub k: f64,
}

impl PowerLaw {
    pub fn new(mass: f64, n: u32, k: f64) -> Result<Self> {
        let spec = Self { mass, n, k };
        validate_spec(OscillatorSpec::PowerLaw(spec))?;
        Ok(spec)
    }

    pub fn quartic(mass: f64, k4: f64) -> Result<Self> {
        Self::new(mass, 2, k4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum OscillatorSpec {
    Harmonic(Harmonic),
    PowerLaw(PowerLaw),
}

impl From<Harmonic> for OscillatorSpec {
    fn from(h: Harmonic) -> Self {
        OscillatorSpec::Harmonic(h)
    }
}

impl From<PowerLaw> for OscillatorSpec {
    fn from(p: PowerLaw) -> Self {
        OscillatorSpec::PowerLaw(p)
    }
}

impl OscillatorSpec {
    pub fn mass(&self) -> f64 {
        match self {
            OscillatorSpec::Harmonic(h) => h.mass,
            OscillatorSpec::PowerLaw(p) => p.mass,
        }
    }

    /// Hierarchy index; the harmonic oscillator is `n = 1`.
    pub fn n(&self) -> u32 {
        match self {
            OscillatorSpec::Harmonic(_) => 1,
            OscillatorSpec::PowerLaw(p) => p.n,
        }
    }

    pub fn stiffness(&self) -> f64 {
        match self {
            OscillatorSpec::Harmonic(h) => h.k2,
            OscillatorSpec::PowerLaw(p) => p.k,
        }
    }

    /// `V(y) = k y^(2n) / 2n`.
    pub fn potential(&self, y: f64) -> f64 {
        let two_n = 2 * self.n() as i32;
        self.stiffness() * y.powi(two_n) / two_n as f64
    }

    /// Restoring force `-k y^(2n-1)`.
    pub fn force(&self, y: f64) -> f64 {
        -self.stiffness() * y.powi(2 * self.n() as i32 - 1)
    }

    pub fn energy(&self, y: f64, v: f64) -> f64 {
        0.5 * self.mass() * v * v + self.potential(y)
    }

    /// Turning point `(2nE/k)^(1/2n)` for energy `energy`.
    pub fn amplitude(&self, energy: f64) -> f64 {
        let two_n = 2.0 * self.n() as f64;
        (two_n * energy / self.stiffness()).powf(1.0 / two_n)
    }
}

/// Checks mass, stiffness and exponent, returning the spec unchanged.
pub fn validate_spec(spec: OscillatorSpec) -> Result<OscillatorSpec> {
    let mass = spec.mass();
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NonPositiveMass(mass));
    }
    let k = spec.stiffness();
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::NonPositiveStiffness(k));
    }
    if let OscillatorSpec::PowerLaw(p) = spec {
        if p.n < 2 {
            return Err(Error::BadExponent(p.n as f64));
        }
    }
    Ok(spec)
}

/// Converts a real-valued hierarchy index into `n`, rejecting `n < 2` and
/// non-integers.
pub fn exponent_index(n: f64) -> Result<u32> {
    if n.is_finite() && n.fract() == 0.0 && n >= 2.0 && n <= u32::MAX as f64 {
        Ok(n as u32)
    } else {
        Err(Error::BadExponent(n))
    }
}

/// A harmonic world line, identified by its energy and the time at which
/// the position reaches its positive maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldLine {
    pub energy: f64,
    pub t_max: f64,
}

impl WorldLine {
    pub fn new(energy: f64, t_max: f64) -> Result<Self> {
        if !(energy.is_finite() && energy >= 0.0) {
            return Err(Error::NegativeEnergy(energy));
        }
        Ok(Self { energy, t_max })
    }

    /// The rest solution `x = 0`. Representable, but rejected by every
    /// operation that deforms time.
    pub fn is_rest(&self) -> bool {
        self.energy == 0.0
    }

    pub(crate) fn require_moving(&self) -> Result<()> {
        if self.is_rest() {
            Err(Error::DegenerateEnergy)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinState {
    pub time: f64,
    pub position: f64,
    pub velocity: f64,
}

impl KinState {
    pub fn new(time: f64, position: f64, velocity: f64) -> Self {
        Self {
            time,
            position,
            velocity,
        }
    }

    pub fn momentum(&self, mass: f64) -> f64 {
        mass * self.velocity
    }
}

/// Harmonic source plus target oscillator of the same mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapPair {
    pub source: Harmonic,
    pub target: OscillatorSpec,
}

impl MapPair {
    pub fn new(source: Harmonic, target: impl Into<OscillatorSpec>) -> Result<Self> {
        let target = validate_spec(target.into())?;
        validate_spec(source.into())?;
        if source.mass != target.mass() {
            return Err(Error::MassMismatch {
                source_mass: source.mass,
                target_mass: target.mass(),
            });
        }
        Ok(Self { source, target })
    }

    pub fn mass(&self) -> f64 {
        self.source.mass
    }

    pub fn n(&self) -> u32 {
        self.target.n()
    }

    pub fn power_law(&self) -> Result<PowerLaw> {
        match self.target {
            OscillatorSpec::PowerLaw(p) => Ok(p),
            OscillatorSpec::Harmonic(_) => Err(Error::TargetNotPowerLaw),
        }
    }
}
