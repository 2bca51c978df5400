// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Brute-force ground truth for the closed-form protocol.
//!
//! Each atom is simulated explicitly on the joint (atom ⊗ field) space:
//! π/2 pulse, dispersive phase e^{−iφ a†a |e⟩⟨e|}, second π/2 pulse, then a
//! projective measurement of the atomic level. No trigonometric shortcut
//! is taken anywhere, so agreement with [`crate::protocol`] validates the
//! closed forms including the coherence phase factor.
//!
//! Basis conventions, fixed throughout: the atom basis is ordered
//! (|e⟩, |g⟩) and joint indices are atom-major, i.e. index = a·dim + n.
//! Atoms never interact with each other, so a fresh two-level atom is
//! attached per stage instead of carrying an N-atom tensor space.

use crate::fock::{FieldState, FockError, EIGENVALUE_FLOOR, HERMITICITY_TOL};
use crate::linalg::{self, C64, CMatrix};
use crate::protocol::{
    self, Outcome, PhaseSequence, PostselectionSpec, ProtocolError, POSTSELECTION_UNDERFLOW,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("sequence has {phases} phases but {outcomes} outcomes were prescribed")]
    LengthMismatch { phases: usize, outcomes: usize },
    #[error("postselection impossible at stage {stage}: probability {probability:.3e}")]
    ImpossiblePostselection { stage: usize, probability: f64 },
    #[error("joint matrix is {rows}x{cols}, expected {expected}x{expected}")]
    BadJointDim {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("joint matrix is not Hermitian: deviation {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("joint matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPositive { eigenvalue: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// Index of the excited atomic level in the (|e⟩, |g⟩) basis.
const ATOM_E: usize = 0;
/// Index of the ground atomic level.
const ATOM_G: usize = 1;

/// Density matrix on (two-level atom) ⊗ (truncated field), atom-major.
#[derive(Debug, Clone)]
pub struct JointState {
    field_dim: usize,
    matrix: CMatrix,
}

impl JointState {
    pub fn new(matrix: CMatrix, field_dim: usize) -> Result<Self, OracleError> {
        let expected = 2 * field_dim;
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(OracleError::BadJointDim {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected,
            });
        }
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(OracleError::NotHermitian { deviation: dev });
        }
        if linalg::gershgorin_lower_bound(&matrix) < EIGENVALUE_FLOOR {
            let min_eig = linalg::min_eigenvalue(&matrix);
            if min_eig < EIGENVALUE_FLOOR {
                return Err(OracleError::NotPositive {
                    eigenvalue: min_eig,
                });
            }
        }
        Ok(Self { field_dim, matrix })
    }

    /// Fresh atom in |e⟩⟨e| attached to the given field state.
    pub fn from_excited_atom(field: &FieldState) -> Self {
        let dim = field.dim();
        let mut matrix = CMatrix::zeros(2 * dim, 2 * dim);
        matrix
            .view_mut((ATOM_E * dim, ATOM_E * dim), (dim, dim))
            .copy_from(&field.matrix());
        Self {
            field_dim: dim,
            matrix,
        }
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    /// Partial trace over the atom.
    pub fn partial_field(&self) -> CMatrix {
        let d = self.field_dim;
        let e = self.matrix.view((ATOM_E * d, ATOM_E * d), (d, d));
        let g = self.matrix.view((ATOM_G * d, ATOM_G * d), (d, d));
        e + g
    }
}

/// Resonant π/2 pulse (1/√2)[[1, i], [i, 1]] in the (|e⟩, |g⟩) basis.
pub fn ramsey_matrix() -> CMatrix {
    let s = 1.0 / f64::sqrt(2.0);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(s, 0.0),
            C64::new(0.0, s),
            C64::new(0.0, s),
            C64::new(s, 0.0),
        ],
    )
}

/// Joint unitary of the dispersive interaction: e^{−iφn} on |e⟩⊗|n⟩,
/// identity on the |g⟩ block.
pub fn dispersive_unitary(phi: f64, field_dim: usize) -> CMatrix {
    let mut u = CMatrix::zeros(2 * field_dim, 2 * field_dim);
    for n in 0..field_dim {
        u[(ATOM_E * field_dim + n, ATOM_E * field_dim + n)] =
            C64::from_polar(1.0, -phi * n as f64);
        u[(ATOM_G * field_dim + n, ATOM_G * field_dim + n)] = C64::ONE;
    }
    u
}

/// One full Ramsey pass: conjugation by (R⊗I)·U_eff(φ)·(R⊗I).
pub fn evolve_one_atom(joint: &JointState, phi: f64) -> JointState {
    let dim = joint.field_dim;
    let r_joint = ramsey_matrix().kronecker(&CMatrix::identity(dim, dim));
    let u = &r_joint * dispersive_unitary(phi, dim) * &r_joint;
    let mut evolved = &u * &joint.matrix * u.adjoint();
    linalg::hermitize_mut(&mut evolved);
    JointState {
        field_dim: dim,
        matrix: evolved,
    }
}

/// Projects the atom onto the measured level and returns the conditional
/// (unnormalized) field state with its probability.
pub fn measure_atom(joint: &JointState, outcome: Outcome) -> (FieldState, f64) {
    let d = joint.field_dim;
    let a = match outcome {
        Outcome::Excited => ATOM_E,
        Outcome::Ground => ATOM_G,
    };
    let block: CMatrix = joint.matrix.view((a * d, a * d), (d, d)).into();
    let p = linalg::trace_re(&block);
    (FieldState::from_dense_unchecked(block), p)
}

/// Full sequence with a fresh |e⟩ atom per stage and the prescribed
/// measurement outcomes; returns the normalized final field state and the
/// product of the stage probabilities.
pub fn simulate_sequence(
    rho0: &FieldState,
    seq: &PhaseSequence,
    outcomes: &[Outcome],
) -> Result<(FieldState, f64), OracleError> {
    if outcomes.len() != seq.len() {
        return Err(OracleError::LengthMismatch {
            phases: seq.len(),
            outcomes: outcomes.len(),
        });
    }
    let mut field = rho0.clone();
    let mut p_total = 1.0;
    for (stage, (&phi, &outcome)) in seq.phases().iter().zip(outcomes).enumerate() {
        let joint = JointState::from_excited_atom(&field);
        let evolved = evolve_one_atom(&joint, phi);
        let (conditional, p) = measure_atom(&evolved, outcome);
        if p < POSTSELECTION_UNDERFLOW {
            return Err(OracleError::ImpossiblePostselection {
                stage,
                probability: p,
            });
        }
        p_total *= p;
        field = conditional.normalize()?.0;
    }
    Ok((field, p_total))
}

/// Summary of a randomized oracle-versus-closed-form comparison run.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub instances: usize,
    /// Outcome-pattern comparisons performed (probability checks).
    pub comparisons: usize,
    /// Comparisons where the normalized states were also compared (the
    /// pattern probability was large enough for normalization to be
    /// well conditioned).
    pub state_comparisons: usize,
    pub max_probability_deviation: f64,
    pub max_trace_distance: f64,
    /// Deviation of the order-symmetrized joint form against the ordered
    /// oracle runs (equal-phase instances, scaled by C(N, N_e)).
    pub max_symmetric_deviation: f64,
    pub tolerance: f64,
    pub failure: Option<EquivalenceFailure>,
}

/// First comparison that exceeded the tolerance, kept for replay.
#[derive(Debug, Clone)]
pub struct EquivalenceFailure {
    pub instance: usize,
    pub dim: usize,
    pub phases: Vec<f64>,
    pub outcomes: Vec<Outcome>,
    pub check: String,
    pub deviation: f64,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
            && self.max_probability_deviation <= self.tolerance
            && self.max_trace_distance <= self.tolerance
            && self.max_symmetric_deviation <= self.tolerance
    }
}

/// Probabilities below this make normalized-state comparison
/// ill-conditioned (round-off is amplified by 1/p), so only the
/// probabilities themselves are compared there.
const STATE_COMPARE_FLOOR: f64 = 1e-6;

/// Runs `instances` randomized instances (dim ≤ 16, N ≤ 4 atoms, random
/// phases, random diagonal states) and compares every outcome pattern of
/// [`simulate_sequence`] against the closed-form filters, plus the
/// order-symmetrized joint form where it applies exactly (all-ground
/// patterns, and every N_e for equal-phase sequences).
pub fn equivalence_report(seed: u64, instances: usize, tolerance: f64) -> EquivalenceReport {
    equivalence_report_with_injection(seed, instances, tolerance, false)
}

/// Like [`equivalence_report`] but optionally corrupts one comparison;
/// used to prove the harness actually detects disagreement.
pub fn equivalence_report_with_injection(
    seed: u64,
    instances: usize,
    tolerance: f64,
    inject_failure: bool,
) -> EquivalenceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport {
        seed,
        instances,
        comparisons: 0,
        state_comparisons: 0,
        max_probability_deviation: 0.0,
        max_trace_distance: 0.0,
        max_symmetric_deviation: 0.0,
        tolerance,
        failure: None,
    };

    for instance in 0..instances {
        let dim: usize = rng.gen_range(2..=16);
        let n_atoms: usize = rng.gen_range(1..=4);
        let equal_phases = rng.gen_bool(0.3);
        let phases: Vec<f64> = if equal_phases {
            let phi = rng.gen_range(0.0..TAU);
            vec![phi; n_atoms]
        } else {
            (0..n_atoms).map(|_| rng.gen_range(0.0..TAU)).collect()
        };
        let seq = PhaseSequence::new(phases.clone()).expect("nonempty finite phases");

        // Random diagonal state from normalized exponential weights.
        let raw: Vec<f64> = (0..dim)
            .map(|_| -f64::ln(rng.gen_range(1e-12_f64..1.0)))
            .collect();
        let total: f64 = raw.iter().sum();
        let rho0 = FieldState::from_diagonal(raw.iter().map(|w| w / total).collect())
            .expect("valid diagonal state");

        for pattern in 0..(1usize << n_atoms) {
            let outcomes: Vec<Outcome> = (0..n_atoms)
                .map(|k| {
                    if pattern >> k & 1 == 1 {
                        Outcome::Excited
                    } else {
                        Outcome::Ground
                    }
                })
                .collect();

            // Closed form: compose the per-atom filters.
            let mut filtered = rho0.clone();
            for (&phi, &outcome) in seq.phases().iter().zip(&outcomes) {
                filtered = protocol::single_atom_filter(&filtered, phi, outcome).0;
            }
            let p_closed = filtered.trace();

            let oracle_run = simulate_sequence(&rho0, &seq, &outcomes);
            report.comparisons += 1;
            match oracle_run {
                Err(OracleError::ImpossiblePostselection { .. }) => {
                    // The oracle refuses only when a stage underflows, in
                    // which case the closed form must agree the pattern is
                    // impossible.
                    record(
                        &mut report,
                        Check::Probability,
                        p_closed,
                        instance,
                        dim,
                        &phases,
                        &outcomes,
                        "oracle-impossible",
                    );
                }
                Err(other) => panic!("unexpected oracle error: {other}"),
                Ok((state_oracle, mut p_oracle)) => {
                    if inject_failure && instance == 0 && pattern == 0 {
                        p_oracle += 1e-6;
                    }
                    record(
                        &mut report,
                        Check::Probability,
                        (p_oracle - p_closed).abs(),
                        instance,
                        dim,
                        &phases,
                        &outcomes,
                        "pattern-probability",
                    );
                    if p_closed > STATE_COMPARE_FLOOR && p_oracle > STATE_COMPARE_FLOOR {
                        let normalized = filtered.normalize().expect("trace above floor").0;
                        let dist = crate::fock::trace_distance(&normalized, &state_oracle)
                            .expect("equal dims");
                        report.state_comparisons += 1;
                        record(
                            &mut report,
                            Check::TraceDistance,
                            dist,
                            instance,
                            dim,
                            &phases,
                            &outcomes,
                            "pattern-state",
                        );
                    }

                    // All-ground patterns are exactly the N_e = 0 joint form.
                    if pattern == 0 {
                        let (state_joint, p_joint) = protocol::postselect_evolve(
                            &rho0,
                            &seq,
                            &PostselectionSpec::all_ground(),
                        )
                        .expect("diagonal input");
                        record(
                            &mut report,
                            Check::Symmetric,
                            (p_joint - p_oracle).abs(),
                            instance,
                            dim,
                            &phases,
                            &outcomes,
                            "joint-all-ground-probability",
                        );
                        if p_oracle > STATE_COMPARE_FLOOR {
                            let dist = crate::fock::trace_distance(&state_joint, &state_oracle)
                                .expect("equal dims");
                            record(
                                &mut report,
                                Check::Symmetric,
                                dist,
                                instance,
                                dim,
                                &phases,
                                &outcomes,
                                "joint-all-ground-state",
                            );
                        }
                    }

                    // For equal phases every ordering is equally likely and
                    // the symmetrized form is C(N, N_e) times one ordering.
                    if equal_phases {
                        let n_excited = outcomes
                            .iter()
                            .filter(|&&o| o == Outcome::Excited)
                            .count();
                        match protocol::postselect_evolve(
                            &rho0,
                            &seq,
                            &PostselectionSpec { n_excited },
                        ) {
                            Ok((state_joint, p_joint)) => {
                                let scaled = binomial(n_atoms, n_excited) * p_oracle;
                                record(
                                    &mut report,
                                    Check::Symmetric,
                                    (p_joint - scaled).abs(),
                                    instance,
                                    dim,
                                    &phases,
                                    &outcomes,
                                    "joint-symmetric-probability",
                                );
                                if p_oracle > STATE_COMPARE_FLOOR {
                                    let dist =
                                        crate::fock::trace_distance(&state_joint, &state_oracle)
                                            .expect("equal dims");
                                    record(
                                        &mut report,
                                        Check::Symmetric,
                                        dist,
                                        instance,
                                        dim,
                                        &phases,
                                        &outcomes,
                                        "joint-symmetric-state",
                                    );
                                }
                            }
                            Err(ProtocolError::ImpossiblePostselection { .. }) => {
                                record(
                                    &mut report,
                                    Check::Symmetric,
                                    p_oracle,
                                    instance,
                                    dim,
                                    &phases,
                                    &outcomes,
                                    "joint-impossible",
                                );
                            }
                            Err(other) => panic!("unexpected protocol error: {other}"),
                        }
                    }
                }
            }
        }
    }
    report
}

enum Check {
    Probability,
    TraceDistance,
    Symmetric,
}

#[allow(clippy::too_many_arguments)]
fn record(
    report: &mut EquivalenceReport,
    check: Check,
    deviation: f64,
    instance: usize,
    dim: usize,
    phases: &[f64],
    outcomes: &[Outcome],
    label: &str,
) {
    let slot = match check {
        Check::Probability => &mut report.max_probability_deviation,
        Check::TraceDistance => &mut report.max_trace_distance,
        Check::Symmetric => &mut report.max_symmetric_deviation,
    };
    if deviation > *slot {
        *slot = deviation;
    }
    if deviation > report.tolerance && report.failure.is_none() {
        report.failure = Some(EquivalenceFailure {
            instance,
            dim,
            phases: phases.to_vec(),
            outcomes: outcomes.to_vec(),
            check: label.to_string(),
            deviation,
        });
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
