// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Property-based invariants of the Fock-space operations, the
//! closed-form protocol, the joint-space oracle, and the dissipative
//! generator.

use nalgebra::DMatrix;
use photon_cooling::fock::{
    self, choose_truncation, fock_state, thermal_state, thermal_tail_mass, FieldState, Truncation,
};
use photon_cooling::linalg::{self, C64, CMatrix};
use photon_cooling::lindblad::{self, annihilation_operator, creation_operator};
use photon_cooling::oracle::{self, JointState};
use photon_cooling::protocol::{self, Outcome, PhaseSequence, PostselectionSpec};
use photon_cooling::wigner;
use proptest::collection::vec;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn normalized_weights(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    vec(1e-6f64..1.0, dim..=dim).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    })
}

fn diagonal_state() -> impl Strategy<Value = FieldState> {
    (2usize..14).prop_flat_map(|dim| {
        normalized_weights(dim).prop_map(|w| FieldState::from_diagonal(w).unwrap())
    })
}

proptest! {
    #[test]
    fn choose_truncation_is_minimal(n_t in 0.01f64..50.0, log_tol in -12.0f64..-2.0) {
        let tol = 10f64.powf(log_tol);
        let trunc = choose_truncation(n_t, tol);
        prop_assert!(thermal_tail_mass(n_t, trunc.dim()) < tol);
        if trunc.dim() > 2 {
            prop_assert!(thermal_tail_mass(n_t, trunc.dim() - 1) >= tol);
        }
    }

    #[test]
    fn temperature_occupancy_round_trip(n_t in 0.001f64..1000.0) {
        let omega = TAU * 51.1e9;
        let t = fock::temperature_from_nbar(omega, n_t).unwrap();
        let back = fock::nbar_from_temperature(omega, t).unwrap();
        prop_assert!(((back - n_t) / n_t).abs() < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_and_one_only_on_equal_distributions(
        a in normalized_weights(10),
        b in normalized_weights(10),
    ) {
        let rho = FieldState::from_diagonal(a.clone()).unwrap();
        let sigma = FieldState::from_diagonal(b.clone()).unwrap();
        let f_ab = fock::fidelity(&rho, &sigma).unwrap();
        let f_ba = fock::fidelity(&sigma, &rho).unwrap();
        prop_assert!((f_ab - f_ba).abs() < 1e-12);
        prop_assert!((fock::fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-14);
        let max_diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if max_diff > 1e-4 {
            prop_assert!(f_ab < 1.0 - 1e-10);
        }
    }

    #[test]
    fn constructors_return_exactly_diagonal_matrices(n_t in 0.0f64..10.0, level in 0usize..8) {
        let trunc = Truncation::new(12, 0.9).unwrap();
        let thermal = thermal_state(n_t, &trunc).unwrap();
        prop_assert_eq!(thermal.off_diagonal_l1(), 0.0);
        prop_assert!(linalg::is_exactly_diagonal(&thermal.matrix()));
        let fockn = fock_state(level, &trunc).unwrap();
        prop_assert_eq!(fockn.off_diagonal_l1(), 0.0);
        prop_assert!((fock::mean_photon(&fockn) - level as f64).abs() < 1e-15);
    }

    #[test]
    fn sequential_filters_reproduce_joint_all_ground_form(
        rho in diagonal_state(),
        phases in vec(0.0f64..TAU, 1..5),
    ) {
        let seq = PhaseSequence::new(phases).unwrap();
        let mut filtered = rho.clone();
        for &phi in seq.phases() {
            filtered = protocol::single_atom_filter(&filtered, phi, Outcome::Ground).0;
        }
        // Trace of the unnormalized composition is the joint probability.
        let p_seq = filtered.trace();
        match protocol::postselect_evolve(&rho, &seq, &PostselectionSpec::all_ground()) {
            Ok((joint_state, p_joint)) => {
                prop_assert!((p_seq - p_joint).abs() < 1e-12);
                if p_joint > 1e-9 {
                    let (normalized, _) = filtered.normalize().unwrap();
                    let dist = fock::trace_distance(&normalized, &joint_state).unwrap();
                    prop_assert!(dist < 1e-12);
                }
            }
            Err(protocol::ProtocolError::ImpossiblePostselection { .. }) => {
                prop_assert!(p_seq < 1e-250);
            }
            Err(other) => return Err(TestCaseError::fail(format!("unexpected: {other}"))),
        }
    }

    #[test]
    fn cooling_fidelity_is_monotone(n_t in 0.0f64..20.0, n_atoms in 1usize..10) {
        let trunc = choose_truncation(n_t.max(0.1), 1e-8);
        let result = protocol::cool_to_vacuum(n_t, n_atoms, &trunc).unwrap();
        for pair in result.fidelity_trace.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-12);
        }
        for pair in result.p_trace.windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-15);
        }
        prop_assert!((result.p_post - result.p_trace.last().unwrap()).abs() == 0.0);
    }

    #[test]
    fn success_probability_is_bracketed(n_t in 0.0f64..20.0, n_atoms in 1usize..13) {
        let trunc = choose_truncation(n_t.max(0.1), 1e-10);
        let result = protocol::cool_to_vacuum(n_t, n_atoms, &trunc).unwrap();
        let floor = protocol::asymptotic_success(n_t);
        prop_assert!(result.p_post <= 1.0 + 1e-12);
        prop_assert!(result.p_post >= floor - 1e-12);
    }

    #[test]
    fn phase_order_does_not_matter(
        rho in diagonal_state(),
        phases in vec(0.0f64..TAU, 2..5),
    ) {
        let seq = PhaseSequence::new(phases.clone()).unwrap();
        let mut reversed = phases;
        reversed.reverse();
        let seq_rev = PhaseSequence::new(reversed).unwrap();
        let spec = PostselectionSpec::all_ground();
        match (
            protocol::postselect_evolve(&rho, &seq, &spec),
            protocol::postselect_evolve(&rho, &seq_rev, &spec),
        ) {
            (Ok((state_a, p_a)), Ok((state_b, p_b))) => {
                prop_assert!((p_a - p_b).abs() < 1e-12);
                prop_assert!(fock::trace_distance(&state_a, &state_b).unwrap() < 1e-12);
            }
            (Err(_), Err(_)) => {}
            _ => return Err(TestCaseError::fail("order changed feasibility")),
        }
    }

    #[test]
    fn dyadic_survivors_are_multiples_of_two_to_the_n(n_atoms in 1usize..8) {
        let seq = protocol::dyadic_sequence(n_atoms).unwrap();
        let trunc = Truncation::new(300, 0.9).unwrap();
        let survivors = protocol::survivors(&seq, &trunc, 1e-12);
        let modulus = 1usize << n_atoms;
        let expected: Vec<usize> = (0..300).filter(|n| n % modulus == 0).collect();
        prop_assert_eq!(survivors, expected);
    }

    #[test]
    fn one_atom_evolution_is_unitary(
        rho in diagonal_state(),
        phi in 0.0f64..TAU,
    ) {
        let joint = JointState::from_excited_atom(&rho);
        let before = linalg::hermitian_eigenvalues(joint.matrix());
        let evolved = oracle::evolve_one_atom(&joint, phi);
        prop_assert!((evolved.trace() - joint.trace()).abs() < 1e-12);
        let after = linalg::hermitian_eigenvalues(evolved.matrix());
        for (x, y) in before.iter().zip(&after) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_blocks_sum_to_partial_trace(
        rho in diagonal_state(),
        phi in 0.0f64..TAU,
    ) {
        let evolved = oracle::evolve_one_atom(&JointState::from_excited_atom(&rho), phi);
        let (sg, pg) = oracle::measure_atom(&evolved, Outcome::Ground);
        let (se, pe) = oracle::measure_atom(&evolved, Outcome::Excited);
        prop_assert!((pg + pe - 1.0).abs() < 1e-12);
        let sum = sg.matrix() + se.matrix();
        prop_assert!(linalg::trace_distance(&sum, &evolved.partial_field()) < 1e-12);
    }

    #[test]
    fn lindblad_rhs_is_traceless(
        seed in vec(-1.0f64..1.0, 32),
        kappa in 0.0f64..2.0,
        n_bath in 0.0f64..3.0,
    ) {
        // Random positive matrix rho = A A† / tr.
        let dim = 4;
        let a = DMatrix::from_fn(dim, dim, |i, j| {
            C64::new(seed[i * dim + j], seed[16 + i * dim + j])
        });
        let mut rho: CMatrix = &a * a.adjoint();
        let tr = linalg::trace_re(&rho);
        rho /= C64::new(tr, 0.0);

        let mut h = CMatrix::zeros(dim, dim);
        for n in 0..dim {
            h[(n, n)] = C64::new(n as f64 * 1e4, 0.0);
        }
        let ops = [
            annihilation_operator(dim) * C64::new((kappa * (1.0 + n_bath)).sqrt(), 0.0),
            creation_operator(dim) * C64::new((kappa * n_bath).sqrt(), 0.0),
        ];
        let out = lindblad::lindblad_rhs(&rho, &h, &ops).unwrap();
        let scale: f64 = out.iter().map(|z| z.norm()).sum::<f64>() + 1.0;
        prop_assert!(linalg::trace_re(&out).abs() < 1e-12 * scale);
        prop_assert!(linalg::hermiticity_deviation(&out) < 1e-12 * scale);
    }

    #[test]
    fn wigner_is_bounded_by_two_over_pi(
        rho in diagonal_state(),
        x in -4.0f64..4.0,
        p in -4.0f64..4.0,
    ) {
        let w = wigner::wigner_point(&rho, C64::new(x, p)).unwrap();
        prop_assert!(w.abs() <= 2.0 / PI + 1e-12);
    }
}

#[test]
fn success_probability_converges_to_asymptote_by_twelve_atoms() {
    let trunc = choose_truncation(3.6, 1e-10);
    let result = protocol::cool_to_vacuum(3.6, 12, &trunc).unwrap();
    let asymptote = protocol::asymptotic_success(3.6);
    assert!(
        (result.p_post - asymptote).abs() < 1e-3,
        "p = {}, limit = {}",
        result.p_post,
        asymptote
    );
}
