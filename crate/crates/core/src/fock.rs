// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-space states of a single cavity mode.
//!
//! A [`FieldState`] is a density operator expanded in the photon-number
//! basis {|0⟩, …, |dim−1⟩}. Thermal states carry the geometric photon
//! distribution ρ_nn = n̄ⁿ/(1+n̄)ⁿ⁺¹, renormalized after truncation so the
//! trace is exactly 1; the discarded tail mass is the closed-form geometric
//! remainder (n̄/(1+n̄))^dim, see [`thermal_tail_mass`].
//!
//! Temperature conversions use the Bose–Einstein occupancy
//! n̄ = 1/(exp(ħω/k_B T) − 1) with the 2019 exact SI values of ħ and k_B.
//!
//! Every constructor validates Hermiticity (tolerance [`HERMITICITY_TOL`]),
//! positivity (eigenvalues above [`EIGENVALUE_FLOOR`]), and flags whether
//! the trace equals one within [`TRACE_TOL`]. Unnormalized intermediates
//! (conditional states before renormalization) are legal values with
//! `is_normalized() == false`.

use crate::linalg::{self, C64, CMatrix};
use thiserror::Error;

/// Reduced Planck constant, J·s (2019 SI exact).
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant, J/K (2019 SI exact).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Max tolerated |ρ[i,j] − conj(ρ[j,i])|.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues above this floor are treated as round-off and clipped to
/// zero where a probability is needed; anything below is a hard error.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// A state is flagged normalized when |trace − 1| is below this.
pub const TRACE_TOL: f64 = 1e-10;
/// Off-diagonal 1-norm limit for operations restricted to diagonal states.
pub const DIAGONAL_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("truncation dim {dim} leaves tail mass {tail:.3e} >= tolerance {tail_tol:.3e}; need dim >= {required}")]
    TruncationTooSmall {
        dim: usize,
        tail: f64,
        tail_tol: f64,
        required: usize,
    },
    #[error("truncation dimension must be at least 2, got {0}")]
    InvalidTruncationDim(usize),
    #[error("tail tolerance must lie in (0, 1), got {0}")]
    InvalidTailTolerance(f64),
    #[error("Fock level {n} outside truncated space of dimension {dim}")]
    LevelOutOfRange { n: usize, dim: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state is not diagonal: off-diagonal 1-norm {norm:.3e} exceeds {tol:.3e}")]
    NotDiagonal { norm: f64, tol: f64 },
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {HERMITICITY_TOL:.0e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} below {EIGENVALUE_FLOOR:.0e}")]
    NotPositive { eigenvalue: f64 },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix must be square and nonempty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("mean occupancy must be nonnegative, got {0}")]
    NegativeOccupancy(f64),
    #[error("mean occupancy must be positive, got {0}")]
    NonPositiveOccupancy(f64),
    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),
    #[error("angular frequency must be positive, got {0} rad/s")]
    NonPositiveFrequency(f64),
    #[error("cannot normalize a state with trace {trace:.3e}")]
    ZeroTrace { trace: f64 },
}

/// Fock-space truncation: levels 0..dim−1 are kept, and the probability
/// mass allowed above the cut is bounded by `tail_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    dim: usize,
    tail_tol: f64,
}

impl Truncation {
    pub fn new(dim: usize, tail_tol: f64) -> Result<Self, FockError> {
        if dim < 2 {
            return Err(FockError::InvalidTruncationDim(dim));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(FockError::InvalidTailTolerance(tail_tol));
        }
        Ok(Self { dim, tail_tol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }
}

#[derive(Debug, Clone)]
enum Repr {
    /// Real diagonal in the Fock basis; off-diagonal entries are
    /// identically zero.
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

/// Density operator of the cavity mode on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct FieldState {
    dim: usize,
    repr: Repr,
    normalized: bool,
}

impl FieldState {
    /// State with the given Fock-basis probabilities (or unnormalized
    /// weights) on the diagonal and zero coherences.
    pub fn from_diagonal(weights: Vec<f64>) -> Result<Self, FockError> {
        if weights.is_empty() {
            return Err(FockError::NotSquare { rows: 0, cols: 0 });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(FockError::NonFinite);
        }
        if let Some(&bad) = weights.iter().find(|&&w| w < EIGENVALUE_FLOOR) {
            return Err(FockError::NotPositive { eigenvalue: bad });
        }
        let trace: f64 = weights.iter().sum();
        Ok(Self {
            dim: weights.len(),
            repr: Repr::Diagonal(weights),
            normalized: (trace - 1.0).abs() <= TRACE_TOL,
        })
    }

    /// General density matrix. Validates Hermiticity and positivity;
    /// exactly diagonal input collapses to the diagonal representation.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self, FockError> {
        if matrix.nrows() != matrix.ncols() || matrix.is_empty() {
            return Err(FockError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FockError::NonFinite);
        }
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(FockError::NotHermitian { deviation: dev });
        }
        if linalg::is_exactly_diagonal(&matrix) {
            let weights: Vec<f64> = matrix.diagonal().iter().map(|z| z.re).collect();
            return Self::from_diagonal(weights);
        }
        // Gershgorin first; the full decomposition only when inconclusive.
        if linalg::gershgorin_lower_bound(&matrix) < EIGENVALUE_FLOOR {
            let min_eig = linalg::min_eigenvalue(&matrix);
            if min_eig < EIGENVALUE_FLOOR {
                return Err(FockError::NotPositive { eigenvalue: min_eig });
            }
        }
        let trace = linalg::trace_re(&matrix);
        Ok(Self {
            dim: matrix.nrows(),
            repr: Repr::Dense(matrix),
            normalized: (trace - 1.0).abs() <= TRACE_TOL,
        })
    }

    /// Construction for internal hot paths where the invariants hold by
    /// construction (products of bounded trigonometric weights).
    pub(crate) fn from_diagonal_unchecked(weights: Vec<f64>) -> Self {
        debug_assert!(weights.iter().all(|w| w.is_finite() && *w >= EIGENVALUE_FLOOR));
        let trace: f64 = weights.iter().sum();
        Self {
            dim: weights.len(),
            repr: Repr::Diagonal(weights),
            normalized: (trace - 1.0).abs() <= TRACE_TOL,
        }
    }

    pub(crate) fn from_dense_unchecked(matrix: CMatrix) -> Self {
        let trace = linalg::trace_re(&matrix);
        Self {
            dim: matrix.nrows(),
            repr: Repr::Dense(matrix),
            normalized: (trace - 1.0).abs() <= TRACE_TOL,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Diagonal(w) => w.iter().sum(),
            Repr::Dense(m) => linalg::trace_re(m),
        }
    }

    /// Real diagonal ρ_nn, unclipped. See [`photon_distribution`] for the
    /// clipped probability vector.
    pub fn diagonal(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Diagonal(w) => w.clone(),
            Repr::Dense(m) => m.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    /// Dense matrix form (materialized on demand for diagonal states).
    pub fn matrix(&self) -> CMatrix {
        match &self.repr {
            Repr::Diagonal(w) => {
                let mut m = CMatrix::zeros(self.dim, self.dim);
                for (n, &p) in w.iter().enumerate() {
                    m[(n, n)] = C64::new(p, 0.0);
                }
                m
            }
            Repr::Dense(m) => m.clone(),
        }
    }

    /// Sum of |ρ[i,j]| over i ≠ j; identically zero for states held in
    /// diagonal form.
    pub fn off_diagonal_l1(&self) -> f64 {
        match &self.repr {
            Repr::Diagonal(_) => 0.0,
            Repr::Dense(m) => linalg::off_diagonal_l1(m),
        }
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.off_diagonal_l1() <= tol
    }

    /// Returns the state scaled to unit trace together with the trace it
    /// had, failing on (numerically) zero trace.
    pub fn normalize(&self) -> Result<(Self, f64), FockError> {
        let trace = self.trace();
        if trace < 1e-300 {
            return Err(FockError::ZeroTrace { trace });
        }
        let repr = match &self.repr {
            Repr::Diagonal(w) => Repr::Diagonal(w.iter().map(|p| p / trace).collect()),
            Repr::Dense(m) => Repr::Dense(m / C64::new(trace, 0.0)),
        };
        Ok((
            Self {
                dim: self.dim,
                repr,
                normalized: true,
            },
            trace,
        ))
    }
}

/// Smallest dim (≥ 2) whose discarded thermal tail (n̄/(1+n̄))^dim is
/// below `tail_tol`.
///
/// Requires n_t ≥ 0 and tail_tol ∈ (0, 1).
pub fn choose_truncation(n_t: f64, tail_tol: f64) -> Truncation {
    assert!(n_t >= 0.0, "mean occupancy must be nonnegative");
    assert!(
        tail_tol > 0.0 && tail_tol < 1.0,
        "tail tolerance must lie in (0, 1)"
    );
    if n_t == 0.0 {
        return Truncation { dim: 2, tail_tol };
    }
    let r = n_t / (1.0 + n_t);
    let tail = |d: usize| r.powi(d.min(i32::MAX as usize) as i32);
    // Log-based guess, then walk to the exact minimum.
    let mut dim = ((tail_tol.ln() / r.ln()).ceil().max(2.0)) as usize;
    while dim > 2 && tail(dim - 1) < tail_tol {
        dim -= 1;
    }
    while tail(dim) >= tail_tol {
        dim += 1;
    }
    Truncation { dim, tail_tol }
}

/// Probability mass of the untruncated thermal state above level dim−1:
/// Σ_{n≥dim} n̄ⁿ/(1+n̄)ⁿ⁺¹ = (n̄/(1+n̄))^dim.
pub fn thermal_tail_mass(n_t: f64, dim: usize) -> f64 {
    if n_t <= 0.0 {
        return 0.0;
    }
    (n_t / (1.0 + n_t)).powi(dim.min(i32::MAX as usize) as i32)
}

/// Truncated thermal photon distribution, renormalized to unit sum.
pub fn thermal_probabilities(n_t: f64, dim: usize) -> Vec<f64> {
    let mut probs = vec![0.0; dim];
    if n_t <= 0.0 {
        probs[0] = 1.0;
        return probs;
    }
    let r = n_t / (1.0 + n_t);
    // Kept mass is exactly 1 - r^dim.
    let norm = 1.0 - thermal_tail_mass(n_t, dim);
    let mut p = 1.0 / (1.0 + n_t) / norm;
    for slot in probs.iter_mut() {
        *slot = p;
        p *= r;
    }
    probs
}

/// Thermal state with mean photon number `n_t` on the truncated space,
/// renormalized so the trace is exactly one.
///
/// Fails when the truncation keeps less than 1 − tail_tol of the
/// untruncated distribution; the error names the dimension that would
/// suffice.
pub fn thermal_state(n_t: f64, trunc: &Truncation) -> Result<FieldState, FockError> {
    if n_t < 0.0 {
        return Err(FockError::NegativeOccupancy(n_t));
    }
    let tail = thermal_tail_mass(n_t, trunc.dim);
    if tail >= trunc.tail_tol {
        return Err(FockError::TruncationTooSmall {
            dim: trunc.dim,
            tail,
            tail_tol: trunc.tail_tol,
            required: choose_truncation(n_t, trunc.tail_tol).dim,
        });
    }
    FieldState::from_diagonal(thermal_probabilities(n_t, trunc.dim))
}

/// Pure projector |n⟩⟨n| on the truncated space.
pub fn fock_state(n: usize, trunc: &Truncation) -> Result<FieldState, FockError> {
    if n >= trunc.dim {
        return Err(FockError::LevelOutOfRange { n, dim: trunc.dim });
    }
    let mut weights = vec![0.0; trunc.dim];
    weights[n] = 1.0;
    FieldState::from_diagonal(weights)
}

/// Photon-number distribution p_n = ρ_nn with round-off negatives
/// (≥ [`EIGENVALUE_FLOOR`]) clipped to zero.
pub fn photon_distribution(rho: &FieldState) -> Vec<f64> {
    rho.diagonal().iter().map(|&p| p.max(0.0)).collect()
}

/// Mean photon number Σ n ρ_nn.
pub fn mean_photon(rho: &FieldState) -> f64 {
    rho.diagonal()
        .iter()
        .enumerate()
        .map(|(n, &p)| n as f64 * p)
        .sum()
}

pub(crate) fn fidelity_from_distributions(p: &[f64], q: &[f64]) -> f64 {
    let overlap: f64 = p
        .iter()
        .zip(q)
        .map(|(&a, &b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    (overlap * overlap).min(1.0)
}

/// Uhlmann fidelity (Σ_n √(p_n q_n))² for commuting Fock-diagonal states.
///
/// Both inputs must be normalized, of equal dimension, and diagonal to
/// within [`DIAGONAL_TOL`] in off-diagonal 1-norm. When `sigma` is a Fock
/// projector |m⟩⟨m| this reduces to ρ_mm.
pub fn fidelity(rho: &FieldState, sigma: &FieldState) -> Result<f64, FockError> {
    if rho.dim() != sigma.dim() {
        return Err(FockError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    for state in [rho, sigma] {
        let norm = state.off_diagonal_l1();
        if norm >= DIAGONAL_TOL {
            return Err(FockError::NotDiagonal {
                norm,
                tol: DIAGONAL_TOL,
            });
        }
    }
    Ok(fidelity_from_distributions(&rho.diagonal(), &sigma.diagonal()))
}

/// Trace distance ½‖ρ − σ‖₁; for diagonal states this is half the L1
/// distance of the photon distributions.
pub fn trace_distance(rho: &FieldState, sigma: &FieldState) -> Result<f64, FockError> {
    if rho.dim() != sigma.dim() {
        return Err(FockError::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    match (&rho.repr, &sigma.repr) {
        (Repr::Diagonal(p), Repr::Diagonal(q)) => {
            Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
        }
        _ => Ok(linalg::trace_distance(&rho.matrix(), &sigma.matrix())),
    }
}

/// Bose–Einstein occupancy n̄ = 1/(exp(ħω/k_B T) − 1).
pub fn nbar_from_temperature(omega: f64, temperature: f64) -> Result<f64, FockError> {
    if omega <= 0.0 {
        return Err(FockError::NonPositiveFrequency(omega));
    }
    if temperature <= 0.0 {
        return Err(FockError::NonPositiveTemperature(temperature));
    }
    Ok(1.0 / f64::exp_m1(HBAR * omega / (BOLTZMANN * temperature)))
}

/// Inverse of [`nbar_from_temperature`]: T = ħω / (k_B ln(1 + 1/n̄)).
pub fn temperature_from_nbar(omega: f64, n_t: f64) -> Result<f64, FockError> {
    if omega <= 0.0 {
        return Err(FockError::NonPositiveFrequency(omega));
    }
    if n_t <= 0.0 {
        return Err(FockError::NonPositiveOccupancy(n_t));
    }
    Ok(HBAR * omega / (BOLTZMANN * f64::ln_1p(1.0 / n_t)))
}
