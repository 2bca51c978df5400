// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: every headline number of the cooling protocol at its
//! stated tolerance, one test (and one pass/fail line) per criterion.
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! measured values.

use photon_cooling::fock::{
    self, choose_truncation, fock_state, thermal_state, Truncation,
};
use photon_cooling::linalg::{self, C64, CMatrix};
use photon_cooling::lindblad::{
    self, joint_dissipators, run_open_protocol, PhysicalParams,
};
use photon_cooling::oracle;
use photon_cooling::protocol::{self, dyadic_sequence};
use photon_cooling::wigner::{self, PhaseGrid};
use std::f64::consts::{PI, TAU};
use std::time::Instant;

#[test]
fn criterion_1_success_probability() {
    let start = Instant::now();
    let trunc = choose_truncation(3.6, 1e-10);
    let result = protocol::cool_to_vacuum(3.6, 5, &trunc).unwrap();
    let elapsed = start.elapsed();
    assert!(
        (result.p_post - 0.217).abs() <= 0.002,
        "p_post = {}",
        result.p_post
    );
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 1 PASS: p_post = {:.6} (target 0.217 +/- 0.002) in {elapsed:?}",
        result.p_post
    );
}

#[test]
fn criterion_2_asymptotic_probability() {
    let start = Instant::now();
    let trunc = choose_truncation(3.6, 1e-10);
    let result = protocol::cool_to_vacuum(3.6, 12, &trunc).unwrap();
    let limit = protocol::asymptotic_success(3.6);
    let elapsed = start.elapsed();
    assert!(
        (result.p_post - limit).abs() < 1e-3,
        "p_post = {}, limit = {}",
        result.p_post,
        limit
    );
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 2 PASS: |p_post - 1/(1+n_t)| = {:.3e} (target < 1e-3) in {elapsed:?}",
        (result.p_post - limit).abs()
    );
}

#[test]
fn criterion_3_fidelity_convergence() {
    let start = Instant::now();
    let trunc = choose_truncation(100.0, 1e-8);
    assert_eq!(trunc.dim(), 1852);
    let mut fidelities = Vec::new();
    for n_atoms in 1..=14 {
        let result = protocol::cool_to_vacuum(100.0, n_atoms, &trunc).unwrap();
        fidelities.push(protocol::vacuum_fidelity(&result.final_state).unwrap());
    }
    let elapsed = start.elapsed();
    for pair in fidelities.windows(2) {
        assert!(pair[1] >= pair[0] - 1e-12, "fidelity decreased: {pair:?}");
    }
    assert!(fidelities[9] > 0.99, "F(10) = {}", fidelities[9]);
    assert!(fidelities[13] > 0.999, "F(14) = {}", fidelities[13]);
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 3 PASS: monotone sweep, F(10) = {:.6}, F(14) = {:.9} in {elapsed:?}",
        fidelities[9], fidelities[13]
    );
}

#[test]
fn criterion_4_ideal_final_state() {
    let trunc = choose_truncation(3.6, 1e-10);
    let result = protocol::cool_to_vacuum(3.6, 5, &trunc).unwrap();
    let fidelity = protocol::vacuum_fidelity(&result.final_state).unwrap();
    assert!(fidelity >= 0.999, "vacuum fidelity = {fidelity}");
    println!("criterion 4 PASS: vacuum fidelity = {fidelity:.6} (target >= 0.999)");
}

#[test]
fn criterion_5_open_system_run() {
    let start = Instant::now();
    let params = PhysicalParams::default();
    let trunc = choose_truncation(params.n_t_bath, 1e-8);
    assert_eq!(trunc.dim(), 76);
    let rho0 = thermal_state(params.n_t_bath, &trunc).unwrap();
    let seq = dyadic_sequence(5).unwrap();
    let run = run_open_protocol(&params, &seq, &rho0).unwrap();
    let elapsed = start.elapsed();
    assert!(
        (run.vacuum_fidelity - 0.983).abs() <= 0.005,
        "vacuum fidelity = {}",
        run.vacuum_fidelity
    );
    assert!(
        (run.best_thermal_nbar - 0.017).abs() <= 0.005,
        "best thermal n_t = {}",
        run.best_thermal_nbar
    );
    assert!(
        (run.fidelity_to_best_thermal - 0.997).abs() <= 0.003,
        "fit fidelity = {}",
        run.fidelity_to_best_thermal
    );
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "criterion 5 PASS: vacuum fidelity = {:.4} (0.983 +/- 0.005), thermal fit n_t = {:.4} \
         (0.017 +/- 0.005) with fidelity {:.4} (0.997 +/- 0.003) in {elapsed:?}",
        run.vacuum_fidelity, run.best_thermal_nbar, run.fidelity_to_best_thermal
    );
}

#[test]
fn criterion_6_temperature_conversions() {
    let omega = TAU * 51.1e9;
    let hot = fock::nbar_from_temperature(omega, 10.0).unwrap();
    let cold = fock::nbar_from_temperature(omega, 0.6).unwrap();
    assert!((hot - 3.60).abs() <= 0.02, "n_t(10 K) = {hot}");
    assert!((cold - 0.017).abs() <= 0.001, "n_t(0.6 K) = {cold}");
    println!(
        "criterion 6 PASS: n_t(10 K) = {hot:.4} (3.60 +/- 0.02), n_t(0.6 K) = {cold:.5} \
         (0.017 +/- 0.001)"
    );
}

#[test]
fn criterion_7_oracle_equivalence() {
    let start = Instant::now();
    let report = oracle::equivalence_report(20260809, 1000, 1e-10);
    let elapsed = start.elapsed();
    assert!(report.passed(), "failure: {:?}", report.failure);
    assert!(report.instances >= 1000);
    assert!(report.comparisons >= 1000);
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 7 PASS: {} instances / {} comparisons, max |dp| = {:.2e}, max trace distance \
         = {:.2e}, max symmetric deviation = {:.2e} (all < 1e-10) in {elapsed:?}",
        report.instances,
        report.comparisons,
        report.max_probability_deviation,
        report.max_trace_distance,
        report.max_symmetric_deviation
    );
}

#[test]
fn criterion_8_lindblad_properties() {
    let start = Instant::now();
    let params = PhysicalParams::default();

    // Trace drift over a joint interaction segment at the run settings,
    // starting from the post-pulse atomic superposition the protocol
    // actually integrates.
    let dim = choose_truncation(3.6, 1e-8).dim();
    let rho0 = thermal_state(3.6, &Truncation::new(dim, 1e-7).unwrap()).unwrap();
    let joint0 = oracle::JointState::from_excited_atom(&rho0);
    let r_joint = oracle::ramsey_matrix().kronecker(&CMatrix::identity(dim, dim));
    let after_pulse: CMatrix = &r_joint * joint0.matrix() * r_joint.adjoint();
    let mut h_joint = CMatrix::zeros(2 * dim, 2 * dim);
    for n in 0..dim {
        h_joint[(n, n)] = C64::new(params.dispersive_shift() * n as f64, 0.0);
    }
    let tau = protocol::interaction_time_for_phase(params.g, params.delta, PI).unwrap();
    let out = lindblad::evolve(
        &after_pulse,
        &h_joint,
        &joint_dissipators(&params, dim),
        tau,
        params.dt,
    )
    .unwrap();
    let drift = (linalg::trace_re(&out) - 1.0).abs();
    assert!(drift < 1e-9, "trace drift {drift:.3e}");

    // Thermalization: vacuum relaxes to the truncated thermal state.
    let vac = fock_state(0, &Truncation::new(dim, 1e-7).unwrap()).unwrap();
    let steady = lindblad::evolve(
        &vac.matrix(),
        &CMatrix::zeros(dim, dim),
        &lindblad::field_dissipators(&params, dim),
        15.0 / params.kappa,
        2.0e-4,
    )
    .unwrap();
    let steady_state = fock::FieldState::from_matrix(steady).unwrap();
    let target = thermal_state(3.6, &Truncation::new(dim, 1e-7).unwrap()).unwrap();
    let fid = fock::fidelity(&steady_state, &target).unwrap();
    assert!(fid > 1.0 - 1e-4, "steady-state fidelity {fid}");

    // Measured RK4 order on the interaction configuration via Richardson
    // comparison at dt, dt/2, dt/4.
    let tau5 = protocol::interaction_time_for_phase(params.g, params.delta, PI / 16.0).unwrap();
    let diss = joint_dissipators(&params, dim);
    let run = |dt: f64| lindblad::evolve(&after_pulse, &h_joint, &diss, tau5, dt).unwrap();
    let r1 = run(0.2e-6);
    let r2 = run(0.1e-6);
    let r3 = run(0.05e-6);
    let order = f64::log2((&r1 - &r2).norm() / (&r2 - &r3).norm());
    assert!(order >= 3.8, "measured order {order}");

    // Closed-system limit reproduces the ideal protocol.
    let closed = PhysicalParams {
        kappa: 0.0,
        gamma: 0.0,
        dt: 0.05e-6,
        ..params
    };
    let trunc = choose_truncation(3.6, 1e-8);
    let rho0 = thermal_state(3.6, &trunc).unwrap();
    let seq = dyadic_sequence(5).unwrap();
    let open = run_open_protocol(&closed, &seq, &rho0).unwrap();
    let ideal = protocol::cool_to_vacuum(3.6, 5, &trunc).unwrap();
    let dp = (open.p_total - ideal.p_post).abs();
    let dist = fock::trace_distance(&open.final_field, &ideal.final_state).unwrap();
    assert!(dp < 1e-6, "probability gap {dp:.3e}");
    assert!(dist < 1e-6, "state gap {dist:.3e}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "criterion 8 PASS: trace drift {drift:.2e} < 1e-9, thermalization fidelity {fid:.6} > \
         1-1e-4, RK4 order {order:.2} >= 3.8, closed limit dp = {dp:.2e} and distance = {dist:.2e} \
         < 1e-6 in {elapsed:?}"
    );
}

#[test]
fn criterion_9_wigner() {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64);
    for &n_t in &[0.0, 0.017, 3.6] {
        let trunc = choose_truncation(n_t, 1e-12);
        let rho = thermal_state(n_t, &trunc).unwrap();
        for i in 0..61 {
            for j in 0..61 {
                let alpha = C64::new(-3.0 + 0.1 * i as f64, -3.0 + 0.1 * j as f64);
                if alpha.norm() > 3.0 {
                    continue;
                }
                let dev =
                    (wigner::wigner_point(&rho, alpha).unwrap()
                        - wigner::thermal_wigner_analytic(n_t, alpha))
                    .abs();
                if dev > worst.1 {
                    worst = (n_t, dev);
                }
            }
        }
    }
    assert!(worst.1 < 1e-8, "max deviation {worst:?}");

    let vac = fock_state(0, &Truncation::new(16, 1e-8).unwrap()).unwrap();
    let w0 = wigner::wigner_point(&vac, C64::ZERO).unwrap();
    assert!((w0 - 2.0 / PI).abs() <= 1e-12, "W(0) = {w0}");

    let rho = thermal_state(3.6, &choose_truncation(3.6, 1e-12)).unwrap();
    let grid = PhaseGrid::default();
    let map = wigner::wigner_diagonal(&rho, &grid).unwrap();
    let bound = 2.0 / PI + 1e-12;
    assert!(map.iter().all(|w| w.abs() <= bound));

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 9 PASS: series vs analytic max deviation = {:.2e} (< 1e-8, worst at n_t = {}), \
         vacuum W(0) - 2/pi = {:.2e}, |W| <= 2/pi everywhere in {elapsed:?}",
        worst.1,
        worst.0,
        w0 - 2.0 / PI
    );
}
