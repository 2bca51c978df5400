// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Wigner function of Fock-diagonal states.
//!
//! For a diagonal ρ the Wigner function is the Laguerre series
//!
//!   W(α) = (2/π) Σ_n ρ_nn (−1)ⁿ L_n(4|α|²) e^{−2|α|²}
//!
//! evaluated with the three-term recurrence on the pre-damped functions
//! M_n(x) = L_n(x)e^{−x/2} (|M_n| ≤ 1 for x ≥ 0), which never overflows
//! regardless of grid extent or truncation. Thermal states admit the
//! closed form W(α) = (2/π)·e^{−2|α|²/(2n̄+1)}/(2n̄+1) used as a
//! cross-check.

use crate::fock::{FieldState, FockError, DIAGONAL_TOL};
use crate::linalg::C64;
use nalgebra::DMatrix;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WignerError {
    #[error("state is not diagonal: off-diagonal 1-norm {norm:.3e} exceeds {DIAGONAL_TOL:.0e}")]
    NotDiagonal { norm: f64 },
    #[error("grid bounds must be increasing: [{min}, {max}]")]
    BadBounds { min: f64, max: f64 },
    #[error("grid needs at least 2 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Rectangular grid in the dimensionless quadrature plane α = x + ip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl PhaseGrid {
    pub fn new(
        x_min: f64,
        x_max: f64,
        p_min: f64,
        p_max: f64,
        nx: usize,
        np: usize,
    ) -> Result<Self, WignerError> {
        if !(x_max > x_min) {
            return Err(WignerError::BadBounds {
                min: x_min,
                max: x_max,
            });
        }
        if !(p_max > p_min) {
            return Err(WignerError::BadBounds {
                min: p_min,
                max: p_max,
            });
        }
        if nx < 2 || np < 2 {
            return Err(WignerError::TooFewPoints(nx.min(np)));
        }
        Ok(Self {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        })
    }

    /// Symmetric square grid of the given half-width.
    pub fn centered(half_width: f64, points: usize) -> Result<Self, WignerError> {
        Self::new(-half_width, half_width, -half_width, half_width, points, points)
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn p(&self, ip: usize) -> f64 {
        self.p_min + (self.p_max - self.p_min) * ip as f64 / (self.np - 1) as f64
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self {
            x_min: -4.0,
            x_max: 4.0,
            p_min: -4.0,
            p_max: 4.0,
            nx: 161,
            np: 161,
        }
    }
}

fn wigner_from_diagonal(probs: &[f64], alpha: C64) -> f64 {
    let x = 4.0 * alpha.norm_sqr();
    // M_n(x) = L_n(x) e^{-x/2}; same recurrence as L_n, damped seed.
    let damp = f64::exp(-x / 2.0);
    let mut m_prev = damp; // M_0
    let mut sum = probs[0] * m_prev;
    if probs.len() > 1 {
        let mut m_cur = (1.0 - x) * damp; // M_1
        sum -= probs[1] * m_cur;
        let mut sign = 1.0;
        for n in 1..probs.len() - 1 {
            let m_next =
                ((2.0 * n as f64 + 1.0 - x) * m_cur - n as f64 * m_prev) / (n as f64 + 1.0);
            m_prev = m_cur;
            m_cur = m_next;
            sum += sign * probs[n + 1] * m_cur;
            sign = -sign;
        }
    }
    2.0 / PI * sum
}

/// Wigner function of a diagonal state at a single phase-space point.
pub fn wigner_point(rho: &FieldState, alpha: C64) -> Result<f64, WignerError> {
    let norm = rho.off_diagonal_l1();
    if norm >= DIAGONAL_TOL {
        return Err(WignerError::NotDiagonal { norm });
    }
    let probs: Vec<f64> = rho.diagonal().iter().map(|p| p.max(0.0)).collect();
    Ok(wigner_from_diagonal(&probs, alpha))
}

/// Wigner function sampled on the grid; entry (ip, ix) is W(x_ix + i·p_ip).
pub fn wigner_diagonal(rho: &FieldState, grid: &PhaseGrid) -> Result<DMatrix<f64>, WignerError> {
    let norm = rho.off_diagonal_l1();
    if norm >= DIAGONAL_TOL {
        return Err(WignerError::NotDiagonal { norm });
    }
    let probs: Vec<f64> = rho.diagonal().iter().map(|p| p.max(0.0)).collect();
    let mut out = DMatrix::zeros(grid.np, grid.nx);
    for ip in 0..grid.np {
        let p = grid.p(ip);
        for ix in 0..grid.nx {
            let alpha = C64::new(grid.x(ix), p);
            out[(ip, ix)] = wigner_from_diagonal(&probs, alpha);
        }
    }
    Ok(out)
}

/// Closed-form thermal Wigner function
/// W(α) = (2/π)·e^{−2|α|²/(2n̄+1)}/(2n̄+1).
pub fn thermal_wigner_analytic(n_t: f64, alpha: C64) -> f64 {
    let width = 2.0 * n_t + 1.0;
    2.0 / (PI * width) * f64::exp(-2.0 * alpha.norm_sqr() / width)
}
