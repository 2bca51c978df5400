// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` experiment configuration with `#` comments.
//!
//! Frequencies (`g`, `delta`, `omega`) are given as ordinary frequencies
//! in Hz — the way instrument settings are quoted — and converted to
//! angular rad/s internally. Decay constants `kappa`/`gamma` are rates in
//! 1/s; times (`gap`, `dt`) are seconds. Command-line flags override any
//! value set in the file.

use photon_cooling::{PhaseGrid, PhysicalParams};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    CoolClosed,
    CoolOpen,
    FidelitySweep,
    Wigner,
    Verify,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::CoolClosed => "cool-closed",
            Mode::CoolOpen => "cool-open",
            Mode::FidelitySweep => "fidelity-sweep",
            Mode::Wigner => "wigner",
            Mode::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "cool-closed" => Ok(Mode::CoolClosed),
            "cool-open" => Ok(Mode::CoolOpen),
            "fidelity-sweep" => Ok(Mode::FidelitySweep),
            "wigner" => Ok(Mode::Wigner),
            "verify" => Ok(Mode::Verify),
            other => Err(ConfigError(format!("unrecognized mode '{other}'"))),
        }
    }
}

/// Fully resolved experiment settings: defaults, then the config file,
/// then command-line flags.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Initial thermal occupancy; also the reservoir occupancy for open
    /// runs (field and bath start in mutual equilibrium).
    pub n_t: f64,
    pub n_atoms: usize,
    pub tail_tol: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub params: PhysicalParams,
    pub grid: PhaseGrid,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_t: 3.6,
            n_atoms: 5,
            tail_tol: 1e-8,
            out_dir: PathBuf::from("out"),
            seed: 42,
            params: PhysicalParams::default(),
            grid: PhaseGrid::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_t < 0.0 {
            return Err(ConfigError(format!("n_t must be nonnegative, got {}", self.n_t)));
        }
        if self.n_atoms < 1 {
            return Err(ConfigError("atoms must be at least 1".into()));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(ConfigError(format!(
                "tail_tol must lie in (0, 1), got {}",
                self.tail_tol
            )));
        }
        Ok(())
    }

    /// Applies a parsed config file. `expected_mode` is the subcommand in
    /// effect; a `mode` key in the file must agree with it.
    pub fn apply_file(&mut self, text: &str, expected_mode: Mode) -> Result<(), ConfigError> {
        let entries = parse_flat(text)?;
        for (key, (value, line)) in &entries {
            let fail = |msg: String| ConfigError(format!("line {line}: {msg}"));
            let num = || -> Result<f64, ConfigError> {
                value
                    .parse::<f64>()
                    .map_err(|e| fail(format!("key '{key}': {e}")))
            };
            match key.as_str() {
                "mode" => {
                    let mode = Mode::parse(value).map_err(|e| fail(e.0))?;
                    if mode != expected_mode {
                        return Err(fail(format!(
                            "config mode '{}' conflicts with subcommand '{}'",
                            mode.name(),
                            expected_mode.name()
                        )));
                    }
                }
                "n_t" => self.n_t = num()?,
                "atoms" => {
                    self.n_atoms = value
                        .parse::<usize>()
                        .map_err(|e| fail(format!("key 'atoms': {e}")))?
                }
                "tail_tol" => self.tail_tol = num()?,
                "out" => self.out_dir = PathBuf::from(value),
                "seed" => {
                    self.seed = value
                        .parse::<u64>()
                        .map_err(|e| fail(format!("key 'seed': {e}")))?
                }
                // Frequencies quoted in Hz, stored angular.
                "g" => self.params.g = TAU * num()?,
                "delta" => self.params.delta = TAU * num()?,
                "omega" => self.params.omega = TAU * num()?,
                "kappa" => self.params.kappa = num()?,
                "gamma" => self.params.gamma = num()?,
                "gap" => self.params.gap = num()?,
                "dt" => self.params.dt = num()?,
                "grid_x_min" => self.grid.x_min = num()?,
                "grid_x_max" => self.grid.x_max = num()?,
                "grid_p_min" => self.grid.p_min = num()?,
                "grid_p_max" => self.grid.p_max = num()?,
                "grid_nx" => {
                    self.grid.nx = value
                        .parse::<usize>()
                        .map_err(|e| fail(format!("key 'grid_nx': {e}")))?
                }
                "grid_np" => {
                    self.grid.np = value
                        .parse::<usize>()
                        .map_err(|e| fail(format!("key 'grid_np': {e}")))?
                }
                other => return Err(fail(format!("unknown key '{other}'"))),
            }
        }
        Ok(())
    }
}

/// Parses `key = value` lines, returning values with their line numbers.
fn parse_flat(text: &str) -> Result<BTreeMap<String, (String, usize)>, ConfigError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError(format!(
                "line {line_no}: expected 'key = value', got '{raw}'"
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError(format!(
                "line {line_no}: empty key or value in '{raw}'"
            )));
        }
        if out.insert(key.clone(), (value, line_no)).is_some() {
            return Err(ConfigError(format!(
                "line {line_no}: duplicate key '{key}'"
            )));
        }
    }
    Ok(out)
}
