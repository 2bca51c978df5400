// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner for the dispersive postselection cooling protocol.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 verification failure.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::CliError;
use config::{ExperimentConfig, Mode};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "photon-cooling",
    version,
    about = "Cool a thermal cavity field to vacuum by dispersive coupling and atomic postselection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key = value config file (# comments); flags override it
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Initial (and bath) thermal occupancy
    #[arg(long = "n-t", global = true, value_name = "N", allow_negative_numbers = true)]
    n_t: Option<f64>,

    /// Number of atoms in the dyadic sequence
    #[arg(long, global = true, value_name = "N")]
    atoms: Option<usize>,

    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Thermal tail mass allowed above the Fock truncation
    #[arg(long = "tail-tol", global = true, value_name = "TOL")]
    tail_tol: Option<f64>,

    /// Integrator step in seconds (open runs)
    #[arg(long, global = true, value_name = "SECONDS")]
    dt: Option<f64>,

    /// Atom-free interval in seconds (open runs)
    #[arg(long, global = true, value_name = "SECONDS")]
    gap: Option<f64>,

    /// Seed for the randomized verification suite
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Ideal lossless cooling run: distributions, traces, Wigner maps
    CoolClosed,
    /// Lossy cooling run under the thermal master equation
    CoolOpen,
    /// Vacuum fidelity and success probability versus sequence length
    FidelitySweep,
    /// Wigner map of the initial thermal state
    Wigner,
    /// Randomized oracle-versus-closed-form verification
    Verify {
        /// Number of randomized instances
        #[arg(long, default_value_t = 1000, hide = true)]
        instances: usize,
        /// Corrupt one comparison to prove failures are detected
        #[arg(long, hide = true)]
        inject_failure: bool,
    },
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::CoolClosed => Mode::CoolClosed,
            Command::CoolOpen => Mode::CoolOpen,
            Command::FidelitySweep => Mode::FidelitySweep,
            Command::Wigner => Mode::Wigner,
            Command::Verify { .. } => Mode::Verify,
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        cfg.apply_file(&text, cli.command.mode())
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    if let Some(n_t) = cli.n_t {
        cfg.n_t = n_t;
    }
    if let Some(atoms) = cli.atoms {
        cfg.n_atoms = atoms;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(tol) = cli.tail_tol {
        cfg.tail_tol = tol;
    }
    if let Some(dt) = cli.dt {
        cfg.params.dt = dt;
    }
    if let Some(gap) = cli.gap {
        cfg.params.gap = gap;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve_config(&cli)?;
    match cli.command {
        Command::CoolClosed => commands::cmd_cool_closed(&cfg),
        Command::CoolOpen => commands::cmd_cool_open(&cfg),
        Command::FidelitySweep => commands::cmd_fidelity_sweep(&cfg),
        Command::Wigner => commands::cmd_wigner(&cfg),
        Command::Verify {
            instances,
            inject_failure,
        } => commands::cmd_verify(&cfg, instances, inject_failure),
    }
}

fn main() -> ExitCode {
    // Bad flags are configuration errors (exit 1), matching config files.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
