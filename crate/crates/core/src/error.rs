use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass must be positive and finite, got {0}")]
    NonPositiveMass(f64),
    #[error("stiffness must be positive and finite, got {0}")]
    NonPositiveStiffness(f64),
    #[error("power-law exponent index must be an integer n >= 2, got {0}")]
    BadExponent(f64),
    #[error("source and target masses differ ({source_mass} vs {target_mass})")]
    MassMismatch { source_mass: f64, target_mass: f64 },
    #[error("operation requires a power-law target oscillator")]
    TargetNotPowerLaw,
    #[error("time rate dt/dt_hat is singular at x = 0")]
    SingularAtZero,
    #[error("world line has zero energy; time deformation is undefined")]
    DegenerateEnergy,
    #[error("energy must be finite and non-negative, got {0}")]
    NegativeEnergy(f64),
    #[error("initial state (0, 0) is the rest solution; no time anchor exists")]
    RestState,
    #[error("sample grid is not strictly increasing at index {0}")]
    NonMonotoneGrid(usize),
    #[error("grid must contain at least {min} samples, got {got}")]
    GridTooShort { min: usize, got: usize },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("tolerance must be positive, got abs={abs}, rel={rel}")]
    BadTolerance { abs: f64, rel: f64 },
    #[error("singularity exponent {0} is not integrable (must be > -1)")]
    NonIntegrableSingularity(f64),
    #[error("quadrature did not reach tolerance on [{a}, {b}] (estimate {estimate}, error {error})")]
    ToleranceNotMet { a: f64, b: f64, estimate: f64, error: f64 },
    #[error("integrand is not finite at {0}")]
    NonFiniteIntegrand(f64),
    #[error("could not bracket target time {0}")]
    RootBracketFailure(f64),
    #[error("integration needs {needed} steps, limit is {limit}")]
    StepCountExceeded { needed: u64, limit: u64 },
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("velocity sign-change event not found within {0} steps")]
    EventNotFound(u64),
    #[error("position {0} lies outside the energetically allowed region")]
    EnergeticallyForbidden(f64),
    #[error("leg from {from} to {to} against the velocity branch passes a turning point")]
    TurningPointInterior { from: f64, to: f64 },
    #[error("operation is only defined for the quartic oscillator (n = 2)")]
    NotQuartic,
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("row {row}: energy residual {residual:e} exceeds tolerance {tol:e}")]
    EnergyResidual { row: usize, residual: f64, tol: f64 },
    #[error("table parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::ToleranceNotMet { .. }
                | Error::NonFiniteIntegrand(_)
                | Error::RootBracketFailure(_)
                | Error::StepCountExceeded { .. }
                | Error::EventNotFound(_)
                | Error::EnergyResidual { .. }
                | Error::SingularAtZero
        )
    }
}
