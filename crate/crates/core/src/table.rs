//! Paired trajectory tables and their CSV / JSON encodings.
//!
//! CSV floats are written with 17 significant digits in scientific notation
//! with `\n` line endings, so identical inputs give byte-identical files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::TimeAnchor;
use crate::model::{MapPair, WorldLine};

pub const TRAJECTORY_HEADER: [&str; 7] = ["t_hat", "x", "v_x", "t", "y", "v_y", "energy_residual"];
pub const DEVIATION_COLUMN: &str = "rk4_deviation";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t_hat: f64,
    pub x: f64,
    pub v_x: f64,
    pub t: f64,
    pub y: f64,
    pub v_y: f64,
    /// `(E_target(y, v_y) - E) / E`.
    pub energy_residual: f64,
    /// Position difference against an independent integration, when run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rk4_deviation: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridAxis {
    /// Rows sampled at prescribed harmonic times.
    HarmonicTime,
    /// Rows sampled at prescribed target times.
    TargetTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axis: GridAxis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn describe(axis: GridAxis, grid: &[f64]) -> Self {
        Self {
            axis,
            start: grid.first().copied().unwrap_or(f64::NAN),
            stop: grid.last().copied().unwrap_or(f64::NAN),
            count: grid.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub pair: MapPair,
    pub world_line: WorldLine,
    pub anchor: TimeAnchor,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    meta: TableMeta,
    rows: Vec<TrajectoryRow>,
}

impl TrajectoryTable {
    /// Checks that both time columns increase strictly and that every energy
    /// residual is within `residual_tol`.
    pub fn new(meta: TableMeta, rows: Vec<TrajectoryRow>, residual_tol: f64) -> Result<Self> {
        for (i, w) in rows.windows(2).enumerate() {
            if !(w[1].t_hat > w[0].t_hat && w[1].t > w[0].t) {
                return Err(Error::NonMonotoneGrid(i + 1));
            }
        }
        for (row, r) in rows.iter().enumerate() {
            if r.energy_residual.is_nan() || r.energy_residual.abs() > residual_tol {
                return Err(Error::EnergyResidual {
                    row,
                    residual: r.energy_residual,
                    tol: residual_tol,
                });
            }
        }
        Ok(Self { meta, rows })
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn rows(&self) -> &[TrajectoryRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.energy_residual.abs()).fold(0.0, f64::max)
    }

    pub fn set_deviations(&mut self, deviations: &[f64]) {
        for (row, d) in self.rows.iter_mut().zip(deviations) {
            row.rk4_deviation = Some(*d);
        }
    }
}

/// `{:.16e}`: 17 significant digits, round-trips exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a numeric table with a header line.
pub fn write_numeric_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format_float(*v))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Reads a table written by [`write_numeric_csv`].
pub fn read_numeric_csv<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("{f:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::Parse(format!(
                "row has {} fields, header {}",
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn row_values(r: &TrajectoryRow) -> Vec<f64> {
    let mut v = vec![r.t_hat, r.x, r.v_x, r.t, r.y, r.v_y, r.energy_residual];
    if let Some(d) = r.rk4_deviation {
        v.push(d);
    }
    v
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut header = TRAJECTORY_HEADER.to_vec();
    if rows.first().is_some_and(|r| r.rk4_deviation.is_some()) {
        header.push(DEVIATION_COLUMN);
    }
    let values = rows.iter().map(row_values).collect::<Vec<_>>();
    write_numeric_csv(out, &header, &values)
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let (header, rows) = read_numeric_csv(input)?;
    let with_dev = match header.len() {
        7 => false,
        8 if header[7] == DEVIATION_COLUMN => true,
        _ => return Err(Error::Parse(format!("unexpected header {header:?}"))),
    };
    if header[..7] != TRAJECTORY_HEADER {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    Ok(rows
        .into_iter()
        .map(|v| TrajectoryRow {
            t_hat: v[0],
            x: v[1],
            v_x: v[2],
            t: v[3],
            y: v[4],
            v_y: v[5],
            energy_residual: v[6],
            rk4_deviation: with_dev.then(|| v[7]),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonMeta {
    #[serde(flatten)]
    pub table: TableMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonTrajectory {
    pub meta: JsonMeta,
    pub rows: Vec<TrajectoryRow>,
}

pub fn write_trajectory_json<W: Write>(
    mut out: W,
    table: &TrajectoryTable,
    run_config: Option<serde_json::Value>,
) -> Result<()> {
    let doc = JsonTrajectory {
        meta: JsonMeta {
            table: table.meta,
            run_config,
        },
        rows: table.rows.clone(),
    };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Parse(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_trajectory_json<R: Read>(input: R) -> Result<JsonTrajectory> {
    serde_json::from_reader(input).map_err(|e| Error::Parse(e.to_string()))
}
