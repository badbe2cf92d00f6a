mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use oscillmap::{Error, Tolerance};

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("OSCILLMAP_TOL: {0}")]
    Env(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_validation() => 3,
            _ => 2,
        }
    }
}

fn tolerance(flag: Option<f64>) -> Result<Tolerance, CliError> {
    let value = match flag {
        Some(v) => v,
        None => match std::env::var("OSCILLMAP_TOL") {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Env(format!("not a number: {s:?}")))?,
            Err(std::env::VarError::NotPresent) => return Ok(Tolerance::default()),
            Err(e) => return Err(CliError::Env(e.to_string())),
        },
    };
    Ok(Tolerance::uniform(value).validate()?)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let tol = tolerance(cli.tol)?;
    let (bytes, out) = match &cli.command {
        Command::MapPoint(a) => (commands::map_point(a)?, None),
        Command::Trajectory(a) => (commands::trajectory(a, tol)?, a.output.out.as_deref()),
        Command::SolveIvp(a) => (commands::solve_ivp(a, tol)?, a.output.out.as_deref()),
        Command::Period(a) => (commands::period(a, tol)?, None),
        Command::PhasePortrait(a) => (commands::phase(a, tol)?, a.output.out.as_deref()),
        Command::Potentials(a) => (commands::potentials(a, tol)?, a.output.out.as_deref()),
    };
    output::emit(out, &bytes)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
