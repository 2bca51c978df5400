// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Browser bindings for the postselection cooling protocol.
//!
//! Three operations back the demo page: a full closed cooling run, Wigner
//! maps of the initial/final field, and the fidelity-versus-atom-number
//! sweep. Results cross the boundary as JSON strings or flat float
//! arrays; the logic lives in plain functions so native tests cover it.

use photon_cooling::fock::{self, choose_truncation, thermal_state};
use photon_cooling::protocol::{self, dyadic_sequence};
use photon_cooling::wigner::{wigner_diagonal, PhaseGrid};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Tail mass allowed above the Fock truncation; tight enough for clean
/// Wigner fringes at every slider setting.
const TAIL_TOL: f64 = 1e-9;
const MAX_OCCUPANCY: f64 = 30.0;
const MAX_ATOMS: usize = 16;

fn check_inputs(n_t: f64, n_atoms: usize) -> Result<(), String> {
    if !n_t.is_finite() || !(0.0..=MAX_OCCUPANCY).contains(&n_t) {
        return Err(format!("n_t must lie in [0, {MAX_OCCUPANCY}], got {n_t}"));
    }
    if !(1..=MAX_ATOMS).contains(&n_atoms) {
        return Err(format!("atom count must lie in 1..={MAX_ATOMS}, got {n_atoms}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct CoolingRun {
    n_t: f64,
    n_atoms: usize,
    p_post: f64,
    vacuum_fidelity: f64,
    phases: Vec<f64>,
    p_trace: Vec<f64>,
    fidelity_trace: Vec<f64>,
    initial_distribution: Vec<f64>,
    final_distribution: Vec<f64>,
}

fn cooling_run_impl(n_t: f64, n_atoms: usize) -> Result<String, String> {
    check_inputs(n_t, n_atoms)?;
    let trunc = choose_truncation(n_t, TAIL_TOL);
    let initial = thermal_state(n_t, &trunc).map_err(|e| e.to_string())?;
    let result = protocol::cool_to_vacuum(n_t, n_atoms, &trunc).map_err(|e| e.to_string())?;
    let vacuum_fidelity =
        protocol::vacuum_fidelity(&result.final_state).map_err(|e| e.to_string())?;
    let run = CoolingRun {
        n_t,
        n_atoms,
        p_post: result.p_post,
        vacuum_fidelity,
        phases: dyadic_sequence(n_atoms)
            .map_err(|e| e.to_string())?
            .phases()
            .to_vec(),
        p_trace: result.p_trace,
        fidelity_trace: result.fidelity_trace,
        initial_distribution: fock::photon_distribution(&initial),
        final_distribution: fock::photon_distribution(&result.final_state),
    };
    serde_json::to_string(&run).map_err(|e| e.to_string())
}

fn wigner_map_impl(
    n_t: f64,
    n_atoms: usize,
    cooled: bool,
    half_width: f64,
    resolution: usize,
) -> Result<Vec<f64>, String> {
    check_inputs(n_t, n_atoms)?;
    if !(half_width > 0.0 && half_width <= 10.0) {
        return Err(format!("half width must lie in (0, 10], got {half_width}"));
    }
    if !(16..=301).contains(&resolution) {
        return Err(format!("resolution must lie in 16..=301, got {resolution}"));
    }
    let trunc = choose_truncation(n_t, TAIL_TOL);
    let state = if cooled {
        protocol::cool_to_vacuum(n_t, n_atoms, &trunc)
            .map_err(|e| e.to_string())?
            .final_state
    } else {
        thermal_state(n_t, &trunc).map_err(|e| e.to_string())?
    };
    let grid = PhaseGrid::centered(half_width, resolution).map_err(|e| e.to_string())?;
    let map = wigner_diagonal(&state, &grid).map_err(|e| e.to_string())?;
    // Row-major over p, matching ImageData rows.
    let mut out = Vec::with_capacity(resolution * resolution);
    for ip in 0..resolution {
        for ix in 0..resolution {
            out.push(map[(ip, ix)]);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct Sweep {
    n_t: f64,
    atoms: Vec<usize>,
    fidelity: Vec<f64>,
    p_post: Vec<f64>,
    asymptote: f64,
}

fn sweep_impl(n_t: f64, max_atoms: usize) -> Result<String, String> {
    check_inputs(n_t, max_atoms)?;
    let trunc = choose_truncation(n_t, TAIL_TOL);
    let mut sweep = Sweep {
        n_t,
        atoms: Vec::new(),
        fidelity: Vec::new(),
        p_post: Vec::new(),
        asymptote: protocol::asymptotic_success(n_t),
    };
    for n_atoms in 1..=max_atoms {
        let result = protocol::cool_to_vacuum(n_t, n_atoms, &trunc).map_err(|e| e.to_string())?;
        sweep.atoms.push(n_atoms);
        sweep
            .fidelity
            .push(protocol::vacuum_fidelity(&result.final_state).map_err(|e| e.to_string())?);
        sweep.p_post.push(result.p_post);
    }
    serde_json::to_string(&sweep).map_err(|e| e.to_string())
}

/// Closed cooling run as JSON: success probability, fidelity, per-atom
/// traces, and initial/final photon distributions.
#[wasm_bindgen]
pub fn cooling_run_json(n_t: f64, n_atoms: u32) -> Result<String, JsError> {
    cooling_run_impl(n_t, n_atoms as usize).map_err(|e| JsError::new(&e))
}

/// Wigner map of the initial thermal (`cooled = false`) or cooled
/// (`cooled = true`) field on a centered square grid, row-major over p.
#[wasm_bindgen]
pub fn wigner_map(
    n_t: f64,
    n_atoms: u32,
    cooled: bool,
    half_width: f64,
    resolution: u32,
) -> Result<Vec<f64>, JsError> {
    wigner_map_impl(n_t, n_atoms as usize, cooled, half_width, resolution as usize)
        .map_err(|e| JsError::new(&e))
}

/// Vacuum fidelity and success probability for sequences of 1..=max
/// atoms, as JSON.
#[wasm_bindgen]
pub fn fidelity_sweep_json(n_t: f64, max_atoms: u32) -> Result<String, JsError> {
    sweep_impl(n_t, max_atoms as usize).map_err(|e| JsError::new(&e))
}
