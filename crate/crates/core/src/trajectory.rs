//! Gridded world-line pairing, the initial-value solver for the target
//! oscillator, and the potential / phase-space comparison tables.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::ho_from_initial;
use crate::map::{space_map_forward, space_map_inverse, Deformation, Phase, TimeAnchor};
use crate::model::{Harmonic, MapPair, PowerLaw, Tolerance, WorldLine, REL_TOL};
use crate::table::{GridAxis, GridSpec, TableMeta, TrajectoryRow, TrajectoryTable};

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridTooShort { min: 1, got: 0 });
    }
    for (i, g) in grid.iter().enumerate() {
        if !g.is_finite() || (i > 0 && *g <= grid[i - 1]) {
            return Err(Error::NonMonotoneGrid(i));
        }
    }
    Ok(())
}

/// `count` evenly spaced points on `[start, stop]`; a single point is `start`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

fn row(d: &Deformation, phase: Phase, t_hat: f64, t: f64, energy: f64) -> TrajectoryRow {
    let (x, v) = d.harmonic_state(phase);
    let y = space_map_forward(d.pair(), x);
    let e = d.pair().target.energy(y, v);
    TrajectoryRow {
        t_hat,
        x,
        v_x: v,
        t,
        y,
        v_y: v,
        energy_residual: (e - energy) / energy,
        rk4_deviation: None,
    }
}

/// Maps the harmonic world line at every time of `t_hat_grid`.
pub fn sample_mapped_trajectory(
    pair: &MapPair,
    wl: &WorldLine,
    t_hat_grid: &[f64],
    anchor: &TimeAnchor,
    tol: Tolerance,
) -> Result<TrajectoryTable> {
    let d = Deformation::new(pair, wl, tol)?;
    check_grid(t_hat_grid)?;
    let clock = d.clock_offset(anchor)?;
    let rows = t_hat_grid
        .iter()
        .map(|&t_hat| {
            let phase = d.phase(t_hat);
            let t = if t_hat == anchor.t_hat_ref {
                anchor.t_ref
            } else {
                d.target_state_on(phase, clock)?.time
            };
            Ok(row(&d, phase, t_hat, t, wl.energy))
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = TableMeta {
        pair: *pair,
        world_line: *wl,
        anchor: *anchor,
        grid: GridSpec::describe(GridAxis::HarmonicTime, t_hat_grid),
    };
    TrajectoryTable::new(meta, rows, REL_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvpOptions {
    /// Stiffness of the internal harmonic stand-in. Any positive value gives
    /// the same target trajectory.
    pub reference_k2: f64,
    pub tol: Tolerance,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self {
            reference_k2: 1.0,
            tol: Tolerance::default(),
        }
    }
}

/// Phase of the harmonic state `(x, v)` read directly from the state, so a
/// start near the origin keeps its relative precision.
fn phase_of_state(h: &Harmonic, amplitude: f64, x: f64, v: f64) -> Phase {
    // x = -s A sin(r), v = -s A w cos(r) with cos(r) >= 0 and s = (-1)^j.
    let w = h.omega();
    let s = if v > 0.0 || (v == 0.0 && x < 0.0) { -1.0 } else { 1.0 };
    let offset = (-s * x / amplitude).atan2(-s * v / (w * amplitude));
    Phase {
        half_cycle: if s > 0.0 { 0.0 } else { -1.0 },
        offset,
    }
}

/// Solves `m y'' = -k y^(2n-1)` from `(y0, v0)` at `t0` by mapping the
/// initial state onto a harmonic world line and inverting the time
/// deformation at every time of `t_grid`.
pub fn solve_ivp_via_map(
    target: &PowerLaw,
    y0: f64,
    v0: f64,
    t0: f64,
    t_grid: &[f64],
    opts: &IvpOptions,
) -> Result<TrajectoryTable> {
    if y0 == 0.0 && v0 == 0.0 {
        return Err(Error::RestState);
    }
    if !(y0.is_finite() && v0.is_finite() && t0.is_finite()) {
        return Err(Error::InvalidInterval { a: y0, b: v0 });
    }
    let source = Harmonic::new(target.mass, opts.reference_k2)?;
    let pair = MapPair::new(source, *target)?;
    check_grid(t_grid)?;

    let energy = pair.target.energy(y0, v0);
    let x0 = space_map_inverse(&pair, y0);
    let wl = ho_from_initial(&source, x0, v0, 0.0);
    let anchor = TimeAnchor::new(0.0, t0);
    let d = Deformation::new(&pair, &wl, opts.tol)?;

    let mut start = phase_of_state(&source, source.amplitude(wl.energy), x0, v0);
    let turns = |p: Phase| p.half_cycle + p.offset / PI;
    start.half_cycle += 2.0 * ((turns(d.phase(0.0)) - turns(start)) / 2.0).round();

    let rows = t_grid
        .iter()
        .map(|&t| {
            let phase = if t == t0 { start } else { d.invert(start, t - t0)? };
            Ok(row(&d, phase, d.time_of(phase), t, energy))
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = TableMeta {
        pair,
        world_line: wl,
        anchor,
        grid: GridSpec::describe(GridAxis::TargetTime, t_grid),
    };
    TrajectoryTable::new(meta, rows, REL_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialRow {
    pub y: f64,
    pub v_harmonic: f64,
    pub v_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialTable {
    pub rows: Vec<PotentialRow>,
    /// Positive coordinate where the two potentials are equal.
    pub crossing: Option<f64>,
}

/// Both potentials on `[0, y_range]`, plus a row at their crossing.
///
/// Below the crossing the hierarchy potential lies under the harmonic one.
/// The crossing row is inserted even when it lies beyond `y_range`.
pub fn potential_table(pair: &MapPair, y_range: f64, samples: usize) -> Result<PotentialTable> {
    if samples < 2 {
        return Err(Error::GridTooShort { min: 2, got: samples });
    }
    if !(y_range.is_finite() && y_range > 0.0) {
        return Err(Error::InvalidInterval { a: 0.0, b: y_range });
    }
    let k2 = pair.source.k2;
    let eval = |y: f64| PotentialRow {
        y,
        v_harmonic: 0.5 * k2 * y * y,
        v_target: pair.target.potential(y),
    };
    let n = pair.n();
    // k2 y^2 / 2 = k y^(2n) / 2n  =>  y^(2n-2) = n k2 / k
    let crossing = (n > 1).then(|| {
        let n = n as f64;
        (n * k2 / pair.target.stiffness()).powf(1.0 / (2.0 * n - 2.0))
    });
    let mut rows = linspace(0.0, y_range, samples)
        .into_iter()
        .map(eval)
        .collect::<Vec<_>>();
    if let Some(c) = crossing {
        let at = rows.partition_point(|r| r.y < c);
        if rows.get(at).map(|r| r.y) != Some(c) {
            rows.insert(at, eval(c));
        }
    }
    Ok(PotentialTable { rows, crossing })
}

/// One row of paired phase-space data; momenta are equal by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub t_hat: f64,
    pub x: f64,
    pub p_x: f64,
    pub t: f64,
    pub y: f64,
    pub p_y: f64,
}

/// Paired phase portraits over one full cycle starting at the positive
/// turning point, `samples` rows with the last closing onto the first.
///
/// With `first_quadrant` only the quarter cycle from the origin (positive
/// velocity) up to the turning point is emitted, using a quarter of the
/// samples.
pub fn phase_portrait(
    pair: &MapPair,
    wl: &WorldLine,
    samples: usize,
    first_quadrant: bool,
    tol: Tolerance,
) -> Result<Vec<PhaseRow>> {
    let d = Deformation::new(pair, wl, tol)?;
    if samples < 2 {
        return Err(Error::GridTooShort { min: 2, got: samples });
    }
    // Phase angle w (t_hat - t_max) over the emitted range.
    let (from, to, count) = if first_quadrant {
        (-FRAC_PI_2, 0.0, ((samples - 1) / 4).max(1) + 1)
    } else {
        (0.0, 2.0 * PI, samples)
    };
    let mass = pair.mass();
    let omega = pair.source.omega();
    let to_phase = |angle: f64| {
        let u = angle - FRAC_PI_2;
        let half_cycle = (u / PI).round();
        Phase {
            half_cycle,
            offset: u - half_cycle * PI,
        }
    };
    let first = to_phase(from);
    let clock = -d.target_state_on(first, 0.0)?.time;
    linspace(from, to, count)
        .into_iter()
        .map(|angle| {
            let phase = to_phase(angle);
            let (x, v) = d.harmonic_state(phase);
            let s = d.target_state_on(phase, clock)?;
            Ok(PhaseRow {
                t_hat: wl.t_max + angle / omega,
                x,
                p_x: mass * v,
                t: s.time,
                y: s.position,
                p_y: mass * s.velocity,
            })
        })
        .collect()
}
