// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form postselection protocol.
//!
//! One atom, prepared in |e⟩, crosses a π/2 pulse, the cavity (acquiring a
//! photon-number-dependent phase φ·n on its |e⟩ component), and a second
//! π/2 pulse. Detecting the atom in |g⟩ or |e⟩ applies a diagonal filter
//! to the field:
//!
//!   outcome g:  ρ_nn' ← e^{iφ(n'−n)/2} cos(φn/2) cos(φn'/2) ρ_nn'
//!   outcome e:  ρ_nn' ← e^{iφ(n'−n)/2} sin(φn/2) sin(φn'/2) ρ_nn'
//!
//! with success probability equal to the trace of the filtered state. The
//! coherence phase factor follows from the exact two-pulse algebra and is
//! validated against the brute-force joint simulation in [`crate::oracle`].
//!
//! Repeating the filter with the dyadic phase sequence φ_k = π/2^(k−1) and
//! keeping only all-|g⟩ detections removes every Fock component except the
//! multiples of 2^N, cooling a thermal field to the vacuum with success
//! probability approaching 1/(1+n̄).

use crate::fock::{self, thermal_state, FieldState, FockError, Truncation, DIAGONAL_TOL};
use crate::linalg::C64;
use std::f64::consts::PI;
use thiserror::Error;

/// Probabilities below this signal a postselection pattern that cannot
/// occur; normalizing past it would amplify garbage.
pub const POSTSELECTION_UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("phase sequence must contain at least one atom")]
    EmptySequence,
    #[error("phase {0} is not finite")]
    NonFinitePhase(f64),
    #[error("number of atoms must be at least 1")]
    NoAtoms,
    #[error("detuning must be nonzero")]
    ZeroDetuning,
    #[error("coupling must be positive, got {0}")]
    NonPositiveCoupling(f64),
    #[error("postselection of {n_excited} excited atoms impossible for {n_atoms} atoms")]
    SpecTooLarge { n_excited: usize, n_atoms: usize },
    #[error("postselection impossible: probability {probability:.3e} underflows")]
    ImpossiblePostselection { probability: f64 },
    #[error("input state must be diagonal: off-diagonal 1-norm {norm:.3e}")]
    NotDiagonal { norm: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Atomic detection outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ground,
    Excited,
}

/// Ordered one-photon phase shifts φ_k, one per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSequence {
    phases: Vec<f64>,
}

impl PhaseSequence {
    pub fn new(phases: Vec<f64>) -> Result<Self, ProtocolError> {
        if phases.is_empty() {
            return Err(ProtocolError::EmptySequence);
        }
        if let Some(&bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(ProtocolError::NonFinitePhase(bad));
        }
        Ok(Self { phases })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }
}

/// Postselection pattern up to ordering: N_e atoms detected in |e⟩, the
/// remaining N − N_e in |g⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostselectionSpec {
    pub n_excited: usize,
}

impl PostselectionSpec {
    pub fn all_ground() -> Self {
        Self { n_excited: 0 }
    }
}

/// Outcome of a sequential cooling run.
#[derive(Debug, Clone)]
pub struct CoolingResult {
    /// Normalized field state after the last postselected atom.
    pub final_state: FieldState,
    /// Probability that every atom is detected in |g⟩.
    pub p_post: f64,
    /// Vacuum fidelity ⟨0|ρ|0⟩ after each atom.
    pub fidelity_trace: Vec<f64>,
    /// Cumulative success probability after each atom (non-increasing).
    pub p_trace: Vec<f64>,
}

/// Dyadic sequence [π, π/2, …, π/2^(N−1)].
pub fn dyadic_sequence(n_atoms: usize) -> Result<PhaseSequence, ProtocolError> {
    if n_atoms == 0 {
        return Err(ProtocolError::NoAtoms);
    }
    PhaseSequence::new((0..n_atoms).map(|k| PI / f64::powi(2.0, k as i32)).collect())
}

/// One-photon phase shift φ = g²τ/δ accumulated over an interaction
/// time τ.
pub fn phase_from_physics(g: f64, delta: f64, tau: f64) -> Result<f64, ProtocolError> {
    if delta == 0.0 {
        return Err(ProtocolError::ZeroDetuning);
    }
    Ok(g * g * tau / delta)
}

/// Interaction time producing a requested phase: τ = φδ/g².
pub fn interaction_time_for_phase(g: f64, delta: f64, phi: f64) -> Result<f64, ProtocolError> {
    if g <= 0.0 {
        return Err(ProtocolError::NonPositiveCoupling(g));
    }
    Ok(phi * delta / (g * g))
}

fn filter_amplitude(phi: f64, n: usize, outcome: Outcome) -> f64 {
    let arg = phi * n as f64 / 2.0;
    match outcome {
        Outcome::Ground => arg.cos(),
        Outcome::Excited => arg.sin(),
    }
}

/// Conditional (unnormalized) field state after one atom is detected in
/// the given level, together with the outcome probability.
///
/// The input must be normalized. Diagonal states stay diagonal; for dense
/// states the coherences additionally pick up the phase e^{iφ(n'−n)/2}.
pub fn single_atom_filter(rho: &FieldState, phi: f64, outcome: Outcome) -> (FieldState, f64) {
    if rho.off_diagonal_l1() == 0.0 {
        let weights: Vec<f64> = rho
            .diagonal()
            .iter()
            .enumerate()
            .map(|(n, &p)| {
                let w = filter_amplitude(phi, n, outcome);
                w * w * p
            })
            .collect();
        let p: f64 = weights.iter().sum();
        (FieldState::from_diagonal_unchecked(weights), p)
    } else {
        // w_n = e^{-i φ n / 2} · (cos or sin)(φn/2); ρ' = w ρ w†
        let dim = rho.dim();
        let w: Vec<C64> = (0..dim)
            .map(|n| {
                C64::from_polar(1.0, -phi * n as f64 / 2.0) * filter_amplitude(phi, n, outcome)
            })
            .collect();
        let mut m = rho.matrix();
        for j in 0..dim {
            for i in 0..dim {
                m[(i, j)] *= w[i] * w[j].conj();
            }
        }
        let state = FieldState::from_dense_unchecked(m);
        let p = state.trace();
        (state, p)
    }
}

/// Product of all |g⟩-filter weights Π_k cos²(φ_k n/2) for Fock level n.
/// An empty phase list leaves every level untouched (weight 1).
pub fn survival_weight(phases: &[f64], n: usize) -> f64 {
    phases
        .iter()
        .map(|&phi| {
            let c = filter_amplitude(phi, n, Outcome::Ground);
            c * c
        })
        .product()
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Joint postselection of the full sequence onto the order-symmetrized
/// target with `spec.n_excited` atoms in |e⟩.
///
/// For a diagonal input the postselected weights are ρ_nn E(n)²/C(N,N_e)
/// where E(n) sums Π cos · Π sin over the C(N,N_e) assignments of which
/// atoms exit excited (evaluated by a generating-polynomial recurrence).
/// With N_e = 0 this is exactly the all-ground product Π_k cos²(φ_k n/2);
/// with equal phases it collapses to C(N,N_e) cos^{2(N−N_e)} sin^{2N_e}.
///
/// Returns the normalized state and the success probability.
pub fn postselect_evolve(
    rho0: &FieldState,
    seq: &PhaseSequence,
    spec: &PostselectionSpec,
) -> Result<(FieldState, f64), ProtocolError> {
    let norm = rho0.off_diagonal_l1();
    if norm >= DIAGONAL_TOL {
        return Err(ProtocolError::NotDiagonal { norm });
    }
    let n_atoms = seq.len();
    if spec.n_excited > n_atoms {
        return Err(ProtocolError::SpecTooLarge {
            n_excited: spec.n_excited,
            n_atoms,
        });
    }
    let combinations = binomial(n_atoms, spec.n_excited);
    let weights: Vec<f64> = rho0
        .diagonal()
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            // e[j] accumulates the coefficient of x^j in Π_k (c_k + x d_k).
            let mut e = vec![0.0; spec.n_excited + 1];
            e[0] = 1.0;
            for &phi in seq.phases() {
                let c = filter_amplitude(phi, n, Outcome::Ground);
                let d = filter_amplitude(phi, n, Outcome::Excited);
                for j in (0..e.len()).rev() {
                    e[j] = c * e[j] + if j > 0 { d * e[j - 1] } else { 0.0 };
                }
            }
            let sym = e[spec.n_excited];
            p.max(0.0) * sym * sym / combinations
        })
        .collect();
    let p_post: f64 = weights.iter().sum();
    if p_post < POSTSELECTION_UNDERFLOW {
        return Err(ProtocolError::ImpossiblePostselection {
            probability: p_post,
        });
    }
    let normalized: Vec<f64> = weights.iter().map(|w| w / p_post).collect();
    Ok((FieldState::from_diagonal_unchecked(normalized), p_post))
}

/// Sequential all-ground cooling of a thermal field with the dyadic
/// sequence: filter, renormalize, and record vacuum fidelity and the
/// cumulative success probability after each atom.
pub fn cool_to_vacuum(
    n_t: f64,
    n_atoms: usize,
    trunc: &Truncation,
) -> Result<CoolingResult, ProtocolError> {
    let seq = dyadic_sequence(n_atoms)?;
    let initial = thermal_state(n_t, trunc)?;
    let mut weights = initial.diagonal();
    let mut fidelity_trace = Vec::with_capacity(n_atoms);
    let mut p_trace = Vec::with_capacity(n_atoms);
    for &phi in seq.phases() {
        for (n, w) in weights.iter_mut().enumerate() {
            let c = filter_amplitude(phi, n, Outcome::Ground);
            *w *= c * c;
        }
        // The running sum is the cumulative probability because the
        // initial trace is one and weights only ever shrink.
        let p_cum: f64 = weights.iter().sum();
        if p_cum < POSTSELECTION_UNDERFLOW {
            return Err(ProtocolError::ImpossiblePostselection { probability: p_cum });
        }
        p_trace.push(p_cum);
        fidelity_trace.push(weights[0] / p_cum);
    }
    let p_post = *p_trace.last().expect("sequence is nonempty");
    let normalized: Vec<f64> = weights.iter().map(|w| w / p_post).collect();
    Ok(CoolingResult {
        final_state: FieldState::from_diagonal_unchecked(normalized),
        p_post,
        fidelity_trace,
        p_trace,
    })
}

/// Fock levels below the truncation whose all-ground survival weight
/// exceeds `tol`. For the dyadic sequence of length N these are exactly
/// the multiples of 2^N.
pub fn survivors(seq: &PhaseSequence, trunc: &Truncation, tol: f64) -> Vec<usize> {
    (0..trunc.dim())
        .filter(|&n| survival_weight(seq.phases(), n) > tol)
        .collect()
}

/// Large-N limit of the all-ground success probability: 1/(1+n̄).
pub fn asymptotic_success(n_t: f64) -> f64 {
    1.0 / (1.0 + n_t)
}

/// Vacuum fidelity of a cooling result against the vacuum of the same
/// truncation.
pub fn vacuum_fidelity(state: &FieldState) -> Result<f64, ProtocolError> {
    let vac = fock::fock_state(0, &Truncation::new(state.dim().max(2), 0.5)?)?;
    Ok(fock::fidelity(state, &vac)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{choose_truncation, fock_state, mean_photon, photon_distribution};
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    #[test]
    fn dyadic_sequence_values() {
        let seq = dyadic_sequence(3).unwrap();
        assert_eq!(seq.phases(), &[PI, PI / 2.0, PI / 4.0]);
        assert_eq!(dyadic_sequence(1).unwrap().phases(), &[PI]);
        for n in 1..=20 {
            let seq = dyadic_sequence(n).unwrap();
            let last = *seq.phases().last().unwrap();
            assert_eq!(last * f64::powi(2.0, n as i32 - 1), PI);
        }
        assert!(dyadic_sequence(0).is_err());
    }

    #[test]
    fn phase_from_interaction_time() {
        let g = TAU * 49e3;
        let delta = TAU * 245e3;
        let phi = phase_from_physics(g, delta, 51.02e-6).unwrap();
        assert!((phi - PI).abs() < 1e-3);
        assert_eq!(phase_from_physics(g, delta, 0.0).unwrap(), 0.0);
        let doubled = phase_from_physics(g, delta, 2.0 * 51.02e-6).unwrap();
        assert_relative_eq!(doubled, 2.0 * phi, epsilon = 1e-12);
        assert!(phase_from_physics(g, 0.0, 1e-6).is_err());
    }

    #[test]
    fn interaction_time_round_trips() {
        let g = TAU * 49e3;
        let delta = TAU * 245e3;
        let tau = interaction_time_for_phase(g, delta, PI).unwrap();
        assert!((tau - 51.0e-6).abs() < 0.1e-6);
        let half = interaction_time_for_phase(g, delta, PI / 2.0).unwrap();
        assert_relative_eq!(half, tau / 2.0, epsilon = 1e-15);
        for &phi in &[0.1, 1.0, PI, 5.5] {
            let tau = interaction_time_for_phase(g, delta, phi).unwrap();
            let back = phase_from_physics(g, delta, tau).unwrap();
            assert_relative_eq!(back, phi, epsilon = 1e-12);
        }
        assert!(interaction_time_for_phase(0.0, delta, PI).is_err());
    }

    #[test]
    fn filter_on_vacuum_ground_outcome_is_identity() {
        let trunc = Truncation::new(8, 1e-8).unwrap();
        let vac = fock_state(0, &trunc).unwrap();
        let (state, p) = single_atom_filter(&vac, 1.234, Outcome::Ground);
        assert_relative_eq!(p, 1.0, epsilon = 1e-15);
        assert_eq!(photon_distribution(&state), photon_distribution(&vac));
    }

    #[test]
    fn filter_on_single_photon_at_pi_is_deterministic() {
        let trunc = Truncation::new(4, 1e-8).unwrap();
        let one = fock_state(1, &trunc).unwrap();
        let (_, p_g) = single_atom_filter(&one, PI, Outcome::Ground);
        assert!(p_g < 1e-30);
        let (state, p_e) = single_atom_filter(&one, PI, Outcome::Excited);
        assert_relative_eq!(p_e, 1.0, epsilon = 1e-15);
        assert_relative_eq!(mean_photon(&state), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn joint_postselection_reference_probability() {
        let trunc = choose_truncation(3.6, 1e-8);
        let rho = thermal_state(3.6, &trunc).unwrap();
        let seq = dyadic_sequence(5).unwrap();
        let (state, p) = postselect_evolve(&rho, &seq, &PostselectionSpec::all_ground()).unwrap();
        // Independently: ground population + the surviving multiples of 32.
        assert_relative_eq!(p, 0.217476585063251, epsilon = 1e-12);
        assert!((p - 0.217).abs() < 2e-3);
        assert!(state.is_normalized());
    }

    #[test]
    fn joint_postselection_on_vacuum() {
        let trunc = Truncation::new(8, 1e-8).unwrap();
        let vac = fock_state(0, &trunc).unwrap();
        let seq = PhaseSequence::new(vec![0.7, 2.1, 0.4]).unwrap();
        let (state, p) = postselect_evolve(&vac, &seq, &PostselectionSpec::all_ground()).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-15);
        assert_eq!(photon_distribution(&state)[0], 1.0);

        // No atom can ever be excited by the vacuum.
        let err = postselect_evolve(&vac, &seq, &PostselectionSpec { n_excited: 1 }).unwrap_err();
        assert!(matches!(err, ProtocolError::ImpossiblePostselection { .. }));
    }

    #[test]
    fn postselection_spec_larger_than_sequence_is_rejected() {
        let trunc = Truncation::new(8, 1e-8).unwrap();
        let vac = fock_state(0, &trunc).unwrap();
        let seq = dyadic_sequence(2).unwrap();
        assert!(matches!(
            postselect_evolve(&vac, &seq, &PostselectionSpec { n_excited: 3 }),
            Err(ProtocolError::SpecTooLarge { .. })
        ));
    }

    #[test]
    fn cooling_reference_run() {
        let result = cool_to_vacuum(3.6, 5, &choose_truncation(3.6, 1e-10)).unwrap();
        assert!((result.p_post - 0.217).abs() < 2e-3);
        let fid = vacuum_fidelity(&result.final_state).unwrap();
        assert!(fid >= 0.999);
        assert_relative_eq!(fid, 0.9996078706549593, epsilon = 1e-10);
        assert_eq!(result.p_trace.len(), 5);
        assert_eq!(result.fidelity_trace.len(), 5);
        assert_relative_eq!(result.p_post, *result.p_trace.last().unwrap(), epsilon = 0.0);
    }

    #[test]
    fn cooling_zero_temperature_is_trivial() {
        let result = cool_to_vacuum(0.0, 4, &Truncation::new(8, 1e-8).unwrap()).unwrap();
        assert!(result.fidelity_trace.iter().all(|&f| f == 1.0));
        assert_relative_eq!(result.p_post, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cooling_large_thermal_field_converges_by_ten_atoms() {
        let result = cool_to_vacuum(100.0, 10, &choose_truncation(100.0, 1e-8)).unwrap();
        let fid = vacuum_fidelity(&result.final_state).unwrap();
        assert!(fid > 0.99, "fidelity {fid}");
    }

    #[test]
    fn sequential_matches_joint_form() {
        let trunc = choose_truncation(3.6, 1e-10);
        let result = cool_to_vacuum(3.6, 5, &trunc).unwrap();
        let rho = thermal_state(3.6, &trunc).unwrap();
        let seq = dyadic_sequence(5).unwrap();
        let (joint_state, p_joint) =
            postselect_evolve(&rho, &seq, &PostselectionSpec::all_ground()).unwrap();
        assert!((result.p_post - p_joint).abs() < 1e-12);
        let dist = fock::trace_distance(&result.final_state, &joint_state).unwrap();
        assert!(dist < 1e-12);
    }

    #[test]
    fn survivors_of_dyadic_sequences() {
        let seq = dyadic_sequence(2).unwrap();
        let trunc = Truncation::new(16, 1e-8).unwrap();
        assert_eq!(survivors(&seq, &trunc, 1e-12), vec![0, 4, 8, 12]);

        let seq = dyadic_sequence(5).unwrap();
        let trunc = Truncation::new(64, 1e-8).unwrap();
        assert_eq!(survivors(&seq, &trunc, 1e-12), vec![0, 32]);

        // With no filters applied every level survives.
        for n in 0..32 {
            assert_eq!(survival_weight(&[], n), 1.0);
        }
    }

    #[test]
    fn asymptotic_success_probability() {
        assert!((asymptotic_success(3.6) - 0.21739).abs() < 1e-5);
        assert_eq!(asymptotic_success(0.0), 1.0);
        let mut last = 1.0;
        for i in 1..=50 {
            let p = asymptotic_success(i as f64 * 0.5);
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(5, 5), 1.0);
        assert_eq!(binomial(12, 6), 924.0);
    }
}
