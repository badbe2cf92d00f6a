use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use oscillmap::{exponent_index, Harmonic, MapPair, OscillatorSpec, PowerLaw, Result};

#[derive(Debug, Parser)]
#[command(
    name = "oscillmap",
    version,
    about = "Linearization maps between harmonic and power-law oscillators"
)]
pub struct Cli {
    /// Absolute and relative quadrature tolerance (overrides OSCILLMAP_TOL).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map a single coordinate and report potentials and time rates.
    MapPoint(MapPointArgs),
    /// Sample a target world line through the map on a harmonic time grid.
    Trajectory(TrajectoryArgs),
    /// Solve the target initial value problem through the map.
    SolveIvp(SolveIvpArgs),
    /// Period of the target oscillator.
    Period(PeriodArgs),
    /// Paired (position, momentum) data over one cycle.
    PhasePortrait(PhasePortraitArgs),
    /// Harmonic and target potentials on a position grid.
    Potentials(PotentialsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodMethod {
    Map,
    Rk4,
    Whittaker,
}

impl PeriodMethod {
    pub fn name(self) -> &'static str {
        match self {
            PeriodMethod::Map => "map",
            PeriodMethod::Rk4 => "rk4",
            PeriodMethod::Whittaker => "whittaker",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Rk4,
}

/// Oscillator pair: harmonic `k2 x^2 / 2` onto `kt y^(2n) / 2n`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PairArgs {
    /// Hierarchy index of the target (2 = quartic).
    #[arg(long, default_value_t = 2.0)]
    pub n: f64,
    /// Common mass.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Harmonic stiffness.
    #[arg(long, default_value_t = 1.0)]
    pub k2: f64,
    /// Target stiffness.
    #[arg(long, default_value_t = 1.0)]
    pub kt: f64,
}

impl PairArgs {
    pub fn target(&self) -> Result<PowerLaw> {
        PowerLaw::new(self.m, exponent_index(self.n)?, self.kt)
    }

    pub fn pair(&self) -> Result<MapPair> {
        MapPair::new(Harmonic::new(self.m, self.k2)?, self.target()?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(ArgGroup::new("point").required(true).args(["x", "y"])))]
pub struct MapPointArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Harmonic coordinate to map forward.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Target coordinate to map back.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(ArgGroup::new("motion").required(true).args(["energy", "x0"])))]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Energy shared by both oscillators.
    #[arg(long = "E", visible_alias = "energy", id = "energy")]
    pub energy: Option<f64>,
    /// Harmonic time of maximal elongation (with --E).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, conflicts_with = "x0")]
    pub tmax: f64,
    /// Harmonic position at --t0, instead of --E.
    #[arg(long, allow_hyphen_values = true, requires = "v0")]
    pub x0: Option<f64>,
    /// Harmonic velocity at --t0.
    #[arg(long, allow_hyphen_values = true, requires = "x0")]
    pub v0: Option<f64>,
    /// First harmonic time of the grid.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    /// Last harmonic time of the grid [default: t0 + one harmonic period].
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    /// Target time assigned to harmonic time --t0.
    #[arg(long = "t-ref", allow_hyphen_values = true)]
    pub t_ref: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveIvpArgs {
    /// Hierarchy index of the target (2 = quartic).
    #[arg(long, default_value_t = 2.0)]
    pub n: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Target stiffness.
    #[arg(long, default_value_t = 1.0)]
    pub kt: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    /// Last target time [default: t0 + one target period].
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Stiffness of the internal harmonic reference.
    #[arg(long, default_value_t = 1.0)]
    pub k2ref: f64,
    /// Co-run an independent integrator and append its deviation.
    #[arg(long, value_enum)]
    pub check: Option<Check>,
    /// Step of the check integrator.
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl SolveIvpArgs {
    pub fn target(&self) -> Result<PowerLaw> {
        PowerLaw::new(self.m, exponent_index(self.n)?, self.kt)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Treat the target as harmonic with stiffness --kt.
    #[arg(long)]
    pub harmonic: bool,
    /// Energies, comma separated.
    #[arg(long = "E", visible_alias = "energy", value_delimiter = ',', default_value = "1")]
    pub energy: Vec<f64>,
    /// Methods, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "map")]
    pub method: Vec<PeriodMethod>,
    /// Step of the rk4 method.
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
}

impl PeriodArgs {
    pub fn target(&self) -> Result<OscillatorSpec> {
        if self.harmonic {
            Ok(Harmonic::new(self.pair.m, self.pair.kt)?.into())
        } else {
            Ok(self.pair.target()?.into())
        }
    }

    pub fn pair(&self) -> Result<MapPair> {
        MapPair::new(Harmonic::new(self.pair.m, self.pair.k2)?, self.target()?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PhasePortraitArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long = "E", visible_alias = "energy", default_value_t = 1.0)]
    pub energy: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tmax: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Only the quarter cycle from the origin out to the turning point.
    #[arg(long)]
    pub first_quadrant: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PotentialsArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Largest position [default: twice the crossing point].
    #[arg(long)]
    pub y_range: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
