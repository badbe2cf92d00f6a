use std::f64::consts::{PI, SQRT_2};
use std::process::{Command, Output};

use oscillmap::table::{read_numeric_csv, read_trajectory_csv, read_trajectory_json};

fn oscillmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscillmap"))
        .args(args)
        .env_remove("OSCILLMAP_TOL")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = oscillmap(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn table(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    read_numeric_csv(ok(args).as_slice()).unwrap()
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

#[test]
fn map_point_forward() {
    let text = String::from_utf8(ok(&["map-point", "--n", "2", "--k2", "1", "--kt", "1", "--x", "2"])).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("x,y,potential_harmonic,potential_target,dt_dt_hat,dt_hat_dt")
    );
    let f: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((f[1] - 1.68179).abs() < 1e-5);
    assert!((f[2] - 2.0).abs() < 1e-12 && (f[3] - 2.0).abs() < 1e-12);
    // The two rates are reciprocal at matched points.
    assert!((f[4] * f[5] - 1.0).abs() < 1e-12);
}

#[test]
fn map_point_origin_and_inverse() {
    let text = String::from_utf8(ok(&["map-point", "--x", "0"])).unwrap();
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(fields[4], "singular");

    let text = String::from_utf8(ok(&["map-point", "--y", "-1.6817928305074292"])).unwrap();
    let x: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((x + 2.0).abs() < 1e-12);
}

#[test]
fn validation_errors_exit_2() {
    let out = oscillmap(&["map-point", "--n", "1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exponent"));

    let out = oscillmap(&["solve-ivp", "--y0", "0", "--v0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rest"));

    assert_eq!(oscillmap(&["map-point", "--x", "1", "--y", "1"]).status.code(), Some(2));
    assert_eq!(oscillmap(&["trajectory", "--E", "-1"]).status.code(), Some(2));
    assert_eq!(
        oscillmap(&["trajectory", "--E", "1", "--samples", "0"]).status.code(),
        Some(2)
    );

    let out = Command::new(env!("CARGO_BIN_EXE_oscillmap"))
        .args(["period"])
        .env("OSCILLMAP_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let out = oscillmap(&[
        "solve-ivp",
        "--y0",
        "1",
        "--v0",
        "0",
        "--check",
        "rk4",
        "--step",
        "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn trajectory_defaults_cover_one_target_period() {
    let (header, rows) = table(&["trajectory", "--E", "1"]);
    assert_eq!(header, ["t_hat", "x", "v_x", "t", "y", "v_y", "energy_residual"]);
    assert_eq!(rows.len(), 201);
    let t = column(&header, &rows, "t");
    assert!((t.last().unwrap() - 5.24412).abs() < 1e-5);
    let worst = column(&header, &rows, "energy_residual")
        .into_iter()
        .fold(0.0f64, |a, r| a.max(r.abs()));
    assert!(worst <= 1e-8);
    // Velocities agree column for column.
    assert_eq!(column(&header, &rows, "v_x"), column(&header, &rows, "v_y"));

    let (_, single) = table(&["trajectory", "--E", "1", "--samples", "1"]);
    assert_eq!(single.len(), 1);
}

#[test]
fn trajectory_from_initial_conditions_and_anchor() {
    let (h, rows) = table(&[
        "trajectory",
        "--x0",
        "0",
        "--v0",
        "1",
        "--t0",
        "0",
        "--t1",
        "1",
        "--t-ref",
        "10",
        "--samples",
        "5",
    ]);
    let t = column(&h, &rows, "t");
    assert_eq!(t[0], 10.0);
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(column(&h, &rows, "x")[0], 0.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        // The output path is part of the echoed configuration, so reuse it.
        let path = dir.path().join(format!("run.{format}"));
        let run = || {
            ok(&[
                "trajectory",
                "--E",
                "0.7",
                "--n",
                "3",
                "--kt",
                "2",
                "--tmax",
                "0.4",
                "--samples",
                "57",
                "--format",
                format,
                "--out",
                path.to_str().unwrap(),
            ]);
            std::fs::read(&path).unwrap()
        };
        let first = run();
        assert!(!first.is_empty());
        assert_eq!(first, run());
    }
    let first = ok(&["solve-ivp", "--y0", "0.4", "--v0", "-1", "--check", "rk4"]);
    assert_eq!(first, ok(&["solve-ivp", "--y0", "0.4", "--v0", "-1", "--check", "rk4"]));
}

#[test]
fn emitted_files_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let json = dir.path().join("t.json");
    let common = ["trajectory", "--E", "2", "--samples", "33"];
    ok(&[&common[..], &["--out", csv.to_str().unwrap()]].concat());
    ok(&[&common[..], &["--format", "json", "--out", json.to_str().unwrap()]].concat());

    let from_csv = read_trajectory_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    let from_json = read_trajectory_json(std::fs::File::open(&json).unwrap()).unwrap();
    assert_eq!(from_csv.len(), 33);
    assert_eq!(from_csv, from_json.rows);
    assert_eq!(from_json.meta.table.world_line.energy, 2.0);
    let config = from_json.meta.run_config.unwrap();
    assert_eq!(config["command"], "trajectory");
    assert_eq!(config["args"]["samples"], 33);
}

#[test]
fn solve_ivp_matches_rk4() {
    let (h, rows) = table(&["solve-ivp", "--y0", "1.41421356", "--v0", "0", "--check", "rk4"]);
    assert_eq!(h.last().unwrap(), "rk4_deviation");
    let worst = column(&h, &rows, "rk4_deviation").into_iter().fold(0.0f64, f64::max);
    assert!(worst <= 1e-6, "{worst}");
    let t = column(&h, &rows, "t");
    assert!((t.last().unwrap() - 5.24412).abs() < 1e-4);
}

#[test]
fn solve_ivp_reference_stiffness_is_invisible() {
    let run = |k2: &str| {
        table(&[
            "solve-ivp",
            "--n",
            "3",
            "--kt",
            "1.5",
            "--y0",
            "-0.6",
            "--v0",
            "0.9",
            "--t1",
            "7",
            "--k2ref",
            k2,
        ])
    };
    let (h, base) = run("1");
    for k2 in ["0.25", "4"] {
        let (_, other) = run(k2);
        for name in ["t", "y", "v_y"] {
            let a = column(&h, &base, name);
            let b = column(&h, &other, name);
            let worst = a.iter().zip(&b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-8, "{name} k2={k2}: {worst}");
        }
    }
}

#[test]
fn period_methods_agree() {
    let text = String::from_utf8(ok(&["period", "--E", "1,16", "--method", "map,rk4,whittaker"])).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,n,m,k2,kt,energy,period"));
    let rows: Vec<(String, f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_owned(), f[5].parse().unwrap(), f[6].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 6);
    for (_, e, p) in &rows {
        let reference = if *e == 1.0 { rows[0].2 } else { rows[3].2 };
        assert!((p - reference).abs() <= 1e-5 * reference);
    }
    assert!((rows[0].2 - 5.24412).abs() < 1e-4);
    assert!((rows[3].2 / rows[0].2 - 0.5).abs() < 1e-10);
}

#[test]
fn harmonic_period_is_independent_of_energy() {
    let text = String::from_utf8(ok(&[
        "period",
        "--harmonic",
        "--E",
        "0.01,3,300",
        "--method",
        "map,whittaker",
    ]))
    .unwrap();
    for line in text.lines().skip(1) {
        let p: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((p - 2.0 * PI).abs() < 1e-10, "{line}");
    }
}

#[test]
fn potentials_include_crossing() {
    let (h, rows) = table(&["potentials", "--k2", "1", "--kt", "1", "--samples", "10"]);
    assert_eq!(h, ["y", "v_harmonic", "v_target"]);
    assert_eq!(rows.len(), 11);
    let crossing = rows.iter().find(|r| (r[0] - SQRT_2).abs() < 1e-15).unwrap();
    assert!((crossing[1] - crossing[2]).abs() < 1e-12);
}

#[test]
fn phase_portrait_closes_and_quarters() {
    let (h, rows) = table(&["phase-portrait", "--E", "1.5", "--n", "3", "--samples", "101"]);
    assert_eq!(h, ["t_hat", "x", "p_x", "t", "y", "p_y"]);
    assert_eq!(rows.len(), 101);
    let (first, last) = (&rows[0], rows.last().unwrap());
    for c in [1, 2, 4, 5] {
        assert!((first[c] - last[c]).abs() < 1e-6);
    }
    let (_, quad) = table(&[
        "phase-portrait",
        "--E",
        "1.5",
        "--n",
        "3",
        "--samples",
        "101",
        "--first-quadrant",
    ]);
    assert_eq!(quad.len(), 26);
}
