use serde::Serialize;
use serde_json::{json, Value};

use oscillmap::harmonic::{ho_from_initial, ho_period};
use oscillmap::map::{
    space_map_forward, space_map_inverse, target_period, time_rate_forward, time_rate_inverse, TimeAnchor,
};
use oscillmap::oracle::{measure_period, propagate, IntegratorConfig};
use oscillmap::table::{format_float, write_numeric_csv, write_trajectory_csv, write_trajectory_json, TrajectoryTable};
use oscillmap::trajectory::{
    linspace, phase_portrait, potential_table, sample_mapped_trajectory, solve_ivp_via_map, IvpOptions,
};
use oscillmap::whittaker::{whittaker_time, Branch};
use oscillmap::{Error, Tolerance, WorldLine};

use crate::args::{
    Format, MapPointArgs, OutputArgs, PeriodArgs, PeriodMethod, PhasePortraitArgs, PotentialsArgs, SolveIvpArgs,
    TrajectoryArgs,
};
use crate::CliError;

type Out = Result<Vec<u8>, CliError>;

fn run_config<A: Serialize>(command: &str, args: &A, tol: Tolerance) -> Value {
    json!({ "command": command, "args": args, "tol": tol })
}

fn grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>, Error> {
    if count == 0 {
        return Err(Error::GridTooShort { min: 1, got: 0 });
    }
    if !(start.is_finite() && stop.is_finite()) || (count > 1 && stop <= start) {
        return Err(Error::InvalidInterval { a: start, b: stop });
    }
    Ok(linspace(start, stop, count))
}

fn csv_bytes(header: &[&str], rows: &[Vec<f64>]) -> Out {
    let mut buf = Vec::new();
    write_numeric_csv(&mut buf, header, rows)?;
    Ok(buf)
}

fn json_bytes(doc: &Value) -> Out {
    let mut buf = serde_json::to_vec_pretty(doc).map_err(|e| Error::Parse(e.to_string()))?;
    buf.push(b'\n');
    Ok(buf)
}

fn table_bytes(table: &TrajectoryTable, output: &OutputArgs, config: Value) -> Out {
    let mut buf = Vec::new();
    match output.format {
        Format::Csv => write_trajectory_csv(&mut buf, table.rows())?,
        Format::Json => write_trajectory_json(&mut buf, table, Some(config))?,
    }
    Ok(buf)
}

pub fn map_point(args: &MapPointArgs) -> Out {
    let pair = args.pair.pair()?;
    let (x, y) = match (args.x, args.y) {
        (Some(x), _) => (x, space_map_forward(&pair, x)),
        (None, Some(y)) => (space_map_inverse(&pair, y), y),
        (None, None) => unreachable!("clap requires --x or --y"),
    };
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::InvalidInterval { a: x, b: y }.into());
    }
    let forward = match time_rate_forward(&pair, x) {
        Ok(r) => format_float(r),
        Err(Error::SingularAtZero) => "singular".to_owned(),
        Err(e) => return Err(e.into()),
    };
    let fields = [
        format_float(x),
        format_float(y),
        format_float(0.5 * pair.source.k2 * x * x),
        format_float(pair.target.potential(y)),
        forward,
        format_float(time_rate_inverse(&pair, y)),
    ];
    Ok(format!(
        "x,y,potential_harmonic,potential_target,dt_dt_hat,dt_hat_dt\n{}\n",
        fields.join(",")
    )
    .into_bytes())
}

pub fn trajectory(args: &TrajectoryArgs, tol: Tolerance) -> Out {
    let pair = args.pair.pair()?;
    let wl = match (args.energy, args.x0, args.v0) {
        (Some(e), _, _) => WorldLine::new(e, args.tmax)?,
        (None, Some(x0), Some(v0)) => ho_from_initial(&pair.source, x0, v0, args.t0),
        _ => unreachable!("clap requires --E or --x0 with --v0"),
    };
    let t1 = args.t1.unwrap_or(args.t0 + ho_period(&pair.source));
    let t_hat = grid(args.t0, t1, args.samples)?;
    let anchor = TimeAnchor::new(args.t0, args.t_ref.unwrap_or(args.t0));
    let table = sample_mapped_trajectory(&pair, &wl, &t_hat, &anchor, tol)?;
    table_bytes(&table, &args.output, run_config("trajectory", args, tol))
}

pub fn solve_ivp(args: &SolveIvpArgs, tol: Tolerance) -> Out {
    let target = args.target()?;
    if args.y0 == 0.0 && args.v0 == 0.0 {
        return Err(Error::RestState.into());
    }
    let opts = IvpOptions {
        reference_k2: args.k2ref,
        tol,
    };
    let t1 = match args.t1 {
        Some(t1) => t1,
        None => {
            let pair = oscillmap::MapPair::new(oscillmap::Harmonic::new(args.m, args.k2ref)?, target)?;
            let energy = pair.target.energy(args.y0, args.v0);
            args.t0 + target_period(&pair, energy, tol)?
        }
    };
    let t = grid(args.t0, t1, args.samples)?;
    let mut table = solve_ivp_via_map(&target, args.y0, args.v0, args.t0, &t, &opts)?;
    if args.check.is_some() {
        let cfg = IntegratorConfig::rk4(args.step);
        cfg.validate()?;
        let spec = target.into();
        let (mut y, mut v, mut at) = (args.y0, args.v0, args.t0);
        let mut deviations = Vec::with_capacity(t.len());
        for row in table.rows() {
            (y, v) = propagate(&spec, y, v, at, row.t, &cfg)?;
            at = row.t;
            deviations.push((row.y - y).abs());
        }
        table.set_deviations(&deviations);
    }
    table_bytes(&table, &args.output, run_config("solve-ivp", args, tol))
}

pub fn period(args: &PeriodArgs, tol: Tolerance) -> Out {
    let pair = args.pair()?;
    let spec = pair.target;
    let cfg = IntegratorConfig::rk4(args.step);
    let mut out = String::from("method,n,m,k2,kt,energy,period\n");
    for &energy in &args.energy {
        WorldLine::new(energy, 0.0)?;
        if energy == 0.0 {
            return Err(Error::DegenerateEnergy.into());
        }
        for &method in &args.method {
            let value = match method {
                PeriodMethod::Map => target_period(&pair, energy, tol)?,
                PeriodMethod::Rk4 => measure_period(&spec, energy, &cfg)?,
                PeriodMethod::Whittaker => {
                    4.0 * whittaker_time(&spec, energy, 0.0, spec.amplitude(energy), Branch::Forward, tol)?
                }
            };
            let numbers = [spec.mass(), pair.source.k2, spec.stiffness(), energy, value].map(format_float);
            out.push_str(&format!("{},{},{}\n", method.name(), spec.n(), numbers.join(",")));
        }
    }
    Ok(out.into_bytes())
}

pub fn phase(args: &PhasePortraitArgs, tol: Tolerance) -> Out {
    let pair = args.pair.pair()?;
    let wl = WorldLine::new(args.energy, args.tmax)?;
    let rows = phase_portrait(&pair, &wl, args.samples, args.first_quadrant, tol)?;
    match args.output.format {
        Format::Csv => {
            let values = rows
                .iter()
                .map(|r| vec![r.t_hat, r.x, r.p_x, r.t, r.y, r.p_y])
                .collect::<Vec<_>>();
            csv_bytes(&["t_hat", "x", "p_x", "t", "y", "p_y"], &values)
        }
        Format::Json => json_bytes(&json!({
            "meta": { "run_config": run_config("phase-portrait", args, tol) },
            "rows": rows,
        })),
    }
}

pub fn potentials(args: &PotentialsArgs, tol: Tolerance) -> Out {
    let pair = args.pair.pair()?;
    let y_range = match args.y_range {
        Some(r) => r,
        None => {
            let n = pair.n() as f64;
            2.0 * (n * pair.source.k2 / pair.target.stiffness()).powf(1.0 / (2.0 * n - 2.0))
        }
    };
    let table = potential_table(&pair, y_range, args.samples)?;
    match args.output.format {
        Format::Csv => {
            let values = table
                .rows
                .iter()
                .map(|r| vec![r.y, r.v_harmonic, r.v_target])
                .collect::<Vec<_>>();
            csv_bytes(&["y", "v_harmonic", "v_target"], &values)
        }
        Format::Json => json_bytes(&json!({
            "meta": { "run_config": run_config("potentials", args, tol), "crossing": table.crossing },
            "rows": table.rows,
        })),
    }
}
