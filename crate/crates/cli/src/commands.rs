// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! The five experiment commands and their file outputs.
//!
//! CSV floats carry 17 significant digits so files round-trip exactly;
//! identical configuration and seed produce byte-identical outputs.

use crate::config::ExperimentConfig;
use photon_cooling::fock::{self, choose_truncation, thermal_state, FieldState};
use photon_cooling::lindblad::{run_open_protocol, PhysicalParams};
use photon_cooling::oracle::{self, EquivalenceReport};
use photon_cooling::protocol::{self, dyadic_sequence, Outcome};
use photon_cooling::wigner::{wigner_diagonal, PhaseGrid};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 1: configuration or I/O problems.
    Config(String),
    /// Exit code 2: numerical failure inside the simulation.
    Numerical(String),
    /// Exit code 3: the verification suite found a disagreement.
    Verification(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Verification(m) => write!(f, "verification failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

macro_rules! numerical_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Numerical(e.to_string())
            }
        }
    )*};
}

numerical_from!(
    photon_cooling::fock::FockError,
    photon_cooling::protocol::ProtocolError,
    photon_cooling::lindblad::LindbladError,
    photon_cooling::wigner::WignerError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("serialization: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

fn write_distribution(path: &Path, probs: &[f64]) -> Result<(), CliError> {
    let mut text = String::from("n,p_n\n");
    for (n, p) in probs.iter().enumerate() {
        let _ = writeln!(text, "{n},{}", fmt_float(*p));
    }
    write_text(path, &text)
}

#[derive(Serialize)]
struct WignerMeta<'a> {
    x_min: f64,
    x_max: f64,
    p_min: f64,
    p_max: f64,
    nx: usize,
    np: usize,
    state: &'a str,
}

fn write_wigner(
    out_dir: &Path,
    stem: &str,
    state: &FieldState,
    grid: &PhaseGrid,
    description: &str,
) -> Result<(), CliError> {
    let map = wigner_diagonal(state, grid)?;
    let mut text = String::from("x,p,W\n");
    for ip in 0..grid.np {
        for ix in 0..grid.nx {
            let _ = writeln!(
                text,
                "{},{},{}",
                fmt_float(grid.x(ix)),
                fmt_float(grid.p(ip)),
                fmt_float(map[(ip, ix)])
            );
        }
    }
    write_text(&out_dir.join(format!("{stem}.csv")), &text)?;
    write_json(
        &out_dir.join(format!("{stem}_meta.json")),
        &WignerMeta {
            x_min: grid.x_min,
            x_max: grid.x_max,
            p_min: grid.p_min,
            p_max: grid.p_max,
            nx: grid.nx,
            np: grid.np,
            state: description,
        },
    )
}

fn ensure_out_dir(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out_dir)?;
    Ok(cfg.out_dir.clone())
}

fn open_params(cfg: &ExperimentConfig) -> PhysicalParams {
    // Field and reservoir start in mutual equilibrium.
    PhysicalParams {
        n_t_bath: cfg.n_t,
        ..cfg.params
    }
}

#[derive(Serialize)]
struct CoolingReport {
    n_t: f64,
    phases: Vec<f64>,
    p_trace: Vec<f64>,
    fidelity_trace: Vec<f64>,
    p_post: f64,
    distribution: Vec<f64>,
}

pub fn cmd_cool_closed(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let out = ensure_out_dir(cfg)?;
    let trunc = choose_truncation(cfg.n_t, cfg.tail_tol);
    let initial = thermal_state(cfg.n_t, &trunc)?;
    let result = protocol::cool_to_vacuum(cfg.n_t, cfg.n_atoms, &trunc)?;
    let fidelity = protocol::vacuum_fidelity(&result.final_state)?;

    write_distribution(
        &out.join("initial_distribution.csv"),
        &fock::photon_distribution(&initial),
    )?;
    write_distribution(
        &out.join("final_distribution.csv"),
        &fock::photon_distribution(&result.final_state),
    )?;
    write_json(
        &out.join("cooling_result.json"),
        &CoolingReport {
            n_t: cfg.n_t,
            phases: dyadic_sequence(cfg.n_atoms)?.phases().to_vec(),
            p_trace: result.p_trace.clone(),
            fidelity_trace: result.fidelity_trace.clone(),
            p_post: result.p_post,
            distribution: fock::photon_distribution(&result.final_state),
        },
    )?;
    write_wigner(
        &out,
        "wigner_initial",
        &initial,
        &cfg.grid,
        &format!("thermal(n_t={})", cfg.n_t),
    )?;
    write_wigner(
        &out,
        "wigner_final",
        &result.final_state,
        &cfg.grid,
        &format!("cooled(n_t={}, atoms={})", cfg.n_t, cfg.n_atoms),
    )?;

    println!("p_post = {:.6}", result.p_post);
    println!("vacuum fidelity = {fidelity:.6}");
    println!("wrote {}", out.display());
    Ok(())
}

pub fn cmd_fidelity_sweep(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let out = ensure_out_dir(cfg)?;
    let trunc = choose_truncation(cfg.n_t, cfg.tail_tol);
    let mut text = String::from("N,fidelity,p_post\n");
    let mut last = (0.0, 0.0);
    for n_atoms in 1..=cfg.n_atoms {
        let result = protocol::cool_to_vacuum(cfg.n_t, n_atoms, &trunc)?;
        let fidelity = protocol::vacuum_fidelity(&result.final_state)?;
        let _ = writeln!(
            text,
            "{n_atoms},{},{}",
            fmt_float(fidelity),
            fmt_float(result.p_post)
        );
        last = (fidelity, result.p_post);
    }
    write_text(&out.join("fidelity_sweep.csv"), &text)?;
    println!(
        "N = {}: fidelity = {:.6}, p_post = {:.6}",
        cfg.n_atoms, last.0, last.1
    );
    println!("wrote {}", out.join("fidelity_sweep.csv").display());
    Ok(())
}

#[derive(Serialize)]
struct OpenReport {
    n_t: f64,
    phases: Vec<f64>,
    p_stage: Vec<f64>,
    p_total: f64,
    vacuum_fidelity: f64,
    best_thermal_nbar: f64,
    fidelity_to_best_thermal: f64,
    distribution: Vec<f64>,
}

pub fn cmd_cool_open(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let out = ensure_out_dir(cfg)?;
    let params = open_params(cfg);
    let trunc = choose_truncation(cfg.n_t, cfg.tail_tol);
    let rho0 = thermal_state(cfg.n_t, &trunc)?;
    let seq = dyadic_sequence(cfg.n_atoms)?;
    let run = run_open_protocol(&params, &seq, &rho0)?;

    write_json(
        &out.join("open_result.json"),
        &OpenReport {
            n_t: cfg.n_t,
            phases: seq.phases().to_vec(),
            p_stage: run.p_stage.clone(),
            p_total: run.p_total,
            vacuum_fidelity: run.vacuum_fidelity,
            best_thermal_nbar: run.best_thermal_nbar,
            fidelity_to_best_thermal: run.fidelity_to_best_thermal,
            distribution: fock::photon_distribution(&run.final_field),
        },
    )?;
    write_distribution(
        &out.join("final_distribution.csv"),
        &fock::photon_distribution(&run.final_field),
    )?;
    write_wigner(
        &out,
        "wigner_final",
        &run.final_field,
        &cfg.grid,
        &format!("open-cooled(n_t={}, atoms={})", cfg.n_t, cfg.n_atoms),
    )?;
    let mut text = String::from("time_s,mean_photon\n");
    for (t, n) in &run.trajectory {
        let _ = writeln!(text, "{},{}", fmt_float(*t), fmt_float(*n));
    }
    write_text(&out.join("trajectory.csv"), &text)?;

    println!("vacuum fidelity = {:.6}", run.vacuum_fidelity);
    println!(
        "best thermal fit: n_t = {:.6}, fidelity = {:.6}",
        run.best_thermal_nbar, run.fidelity_to_best_thermal
    );
    println!("p_total = {:.6}", run.p_total);
    println!("wrote {}", out.display());
    Ok(())
}

pub fn cmd_wigner(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let out = ensure_out_dir(cfg)?;
    let trunc = choose_truncation(cfg.n_t, cfg.tail_tol);
    let state = thermal_state(cfg.n_t, &trunc)?;
    write_wigner(
        &out,
        "wigner",
        &state,
        &cfg.grid,
        &format!("thermal(n_t={})", cfg.n_t),
    )?;
    println!(
        "W(0) = {:.6}",
        photon_cooling::wigner::thermal_wigner_analytic(cfg.n_t, num_complex::Complex64::ZERO)
    );
    println!("wrote {}", out.join("wigner.csv").display());
    Ok(())
}

#[derive(Serialize)]
struct VerifyFailure {
    instance: usize,
    dim: usize,
    phases: Vec<f64>,
    outcomes: Vec<String>,
    check: String,
    deviation: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    instances: usize,
    comparisons: usize,
    state_comparisons: usize,
    max_probability_deviation: f64,
    max_trace_distance: f64,
    max_symmetric_deviation: f64,
    tolerance: f64,
    passed: bool,
    failure: Option<VerifyFailure>,
}

impl VerifyReport {
    fn from_core(report: &EquivalenceReport) -> Self {
        Self {
            seed: report.seed,
            instances: report.instances,
            comparisons: report.comparisons,
            state_comparisons: report.state_comparisons,
            max_probability_deviation: report.max_probability_deviation,
            max_trace_distance: report.max_trace_distance,
            max_symmetric_deviation: report.max_symmetric_deviation,
            tolerance: report.tolerance,
            passed: report.passed(),
            failure: report.failure.as_ref().map(|f| VerifyFailure {
                instance: f.instance,
                dim: f.dim,
                phases: f.phases.clone(),
                outcomes: f
                    .outcomes
                    .iter()
                    .map(|o| match o {
                        Outcome::Ground => "g".to_string(),
                        Outcome::Excited => "e".to_string(),
                    })
                    .collect(),
                check: f.check.clone(),
                deviation: f.deviation,
            }),
        }
    }
}

pub fn cmd_verify(
    cfg: &ExperimentConfig,
    instances: usize,
    inject_failure: bool,
) -> Result<(), CliError> {
    let out = ensure_out_dir(cfg)?;
    let report =
        oracle::equivalence_report_with_injection(cfg.seed, instances, 1e-10, inject_failure);
    write_json(&out.join("verify_report.json"), &VerifyReport::from_core(&report))?;
    println!(
        "{} instances, {} comparisons ({} with state checks)",
        report.instances, report.comparisons, report.state_comparisons
    );
    println!(
        "max deviations: probability {:.3e}, trace distance {:.3e}, symmetric {:.3e} (tolerance {:.0e})",
        report.max_probability_deviation,
        report.max_trace_distance,
        report.max_symmetric_deviation,
        report.tolerance
    );
    println!("wrote {}", out.join("verify_report.json").display());
    if report.passed() {
        println!("verification PASSED");
        Ok(())
    } else {
        let detail = report
            .failure
            .map(|f| format!("first failing case: instance {} check {}", f.instance, f.check))
            .unwrap_or_else(|| "deviation above tolerance".to_string());
        Err(CliError::Verification(detail))
    }
}
