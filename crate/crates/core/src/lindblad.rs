// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Open-system simulation of the cooling schedule.
//!
//! The joint (atom ⊗ field) state evolves under
//!
//!   dρ/dt = −i[H, ρ] + Σ_i (L_i ρ L_i† − ½{L_i†L_i, ρ})
//!
//! with H the dispersive coupling (g²/δ)·a†a·|e⟩⟨e| expressed directly in
//! angular-frequency units (so the commutator coefficient is −i and ħ
//! never appears), and the four thermal-reservoir operators
//! √(Γ(1+n̄))σ₋, √(Γn̄)σ₊, √(κ(1+n̄))a, √(κn̄)a†. Between atoms only the two
//! field operators act. Atomic dissipation is taken on the |e⟩→|g⟩
//! transition (σ₋ = |g⟩⟨e|), the only decay channel inside the modeled
//! two-level space; this choice feeds directly into the reported final
//! fidelities.
//!
//! Integration is classical fixed-step RK4 with re-Hermitization after
//! every step, a trailing partial step to land exactly on the requested
//! duration, and trace/positivity monitoring. π/2 pulses are applied as
//! instantaneous unitaries; losses during them are neglected.
//!
//! Basis conventions match [`crate::oracle`]: atom levels ordered
//! (|e⟩, |g⟩), joint index = a·dim + n.

use crate::fock::{
    self, photon_distribution, thermal_probabilities, FieldState, FockError,
};
use crate::linalg::{self, C64, CMatrix};
use crate::oracle::ramsey_matrix;
use crate::protocol::{self, PhaseSequence, ProtocolError, POSTSELECTION_UNDERFLOW};
use std::f64::consts::TAU;
use thiserror::Error;

/// Allowed |trace(ρ) − trace(ρ₀)| accumulated over one `evolve` call.
pub const TRACE_DRIFT_TOL: f64 = 1e-9;
/// Eigenvalues below this after a step mean the integrator failed.
pub const POSITIVITY_FLOOR: f64 = -1e-7;
/// Full spectral positivity checks run every this many steps (plus the
/// final step); each intermediate step still checks the diagonal, which
/// bounds the smallest eigenvalue from above.
const EIG_CHECK_STRIDE: usize = 25;

#[derive(Debug, Error)]
pub enum LindbladError {
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),
    #[error("operator is {rows}x{cols} but the state is {dim}x{dim}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("duration must be nonnegative, got {0}")]
    NegativeDuration(f64),
    #[error("integrator step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("trace drifted by {drift:.3e} at t={time:.3e} s with dt={dt:.3e}; retry with dt ~ {suggested:.3e}")]
    TraceDrift {
        drift: f64,
        time: f64,
        dt: f64,
        suggested: f64,
    },
    #[error("eigenvalue {eigenvalue:.3e} below {POSITIVITY_FLOOR:.0e} at t={time:.3e} s with dt={dt:.3e}; retry with dt ~ {suggested:.3e}")]
    PositivityLoss {
        eigenvalue: f64,
        time: f64,
        dt: f64,
        suggested: f64,
    },
    #[error("postselection impossible at stage {stage}: probability {probability:.3e}")]
    ImpossiblePostselection { stage: usize, probability: f64 },
    #[error("initial state must be normalized, trace is {trace}")]
    NotNormalized { trace: f64 },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Everything needed for an open-system run. Frequencies are angular
/// (rad/s); κ and Γ are rates (1/s); times are seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Vacuum Rabi coupling g.
    pub g: f64,
    /// Atom-cavity detuning δ.
    pub delta: f64,
    /// Cavity frequency ω (used for temperature bookkeeping only).
    pub omega: f64,
    /// Cavity energy decay rate κ = 1/T_c.
    pub kappa: f64,
    /// Atomic decay rate Γ = 1/T_a.
    pub gamma: f64,
    /// Mean thermal occupancy of the reservoir.
    pub n_t_bath: f64,
    /// Atom-free interval between consecutive atoms.
    pub gap: f64,
    /// RK4 step.
    pub dt: f64,
}

impl Default for PhysicalParams {
    /// Realistic microwave cavity QED values: a 51.1 GHz superconducting
    /// cavity (T_c = 130 ms) probed by circular Rydberg atoms
    /// (T_a = 30 ms, g/2π = 49 kHz, δ/2π = 245 kHz) in a 10 K environment
    /// (n̄ = 3.6), 82 μs between atoms.
    fn default() -> Self {
        Self {
            g: TAU * 49.0e3,
            delta: TAU * 245.0e3,
            omega: TAU * 51.1e9,
            kappa: 1.0 / 0.130,
            gamma: 1.0 / 0.030,
            n_t_bath: 3.6,
            gap: 82.0e-6,
            dt: 0.1e-6,
        }
    }
}

impl PhysicalParams {
    /// Dispersive shift per photon, g²/δ.
    pub fn dispersive_shift(&self) -> f64 {
        self.g * self.g / self.delta
    }

    /// Largest step compatible with resolving both the dispersive period
    /// and the fastest dissipation rate by a factor of 100.
    pub fn max_step(&self) -> f64 {
        let dispersive = 0.01 * TAU * self.delta.abs() / (self.g * self.g);
        let rate = f64::max(
            self.kappa * (1.0 + self.n_t_bath),
            self.gamma * (1.0 + self.n_t_bath),
        );
        if rate > 0.0 {
            dispersive.min(0.01 / rate)
        } else {
            dispersive
        }
    }

    pub fn validate(&self) -> Result<(), LindbladError> {
        let err = |msg: String| Err(LindbladError::InvalidParams(msg));
        if !(self.g > 0.0) {
            return err(format!("coupling g must be positive, got {}", self.g));
        }
        if self.delta == 0.0 || !self.delta.is_finite() {
            return err(format!("detuning must be finite and nonzero, got {}", self.delta));
        }
        if !(self.omega > 0.0) {
            return err(format!("cavity frequency must be positive, got {}", self.omega));
        }
        if self.kappa < 0.0 || self.gamma < 0.0 {
            return err(format!(
                "decay rates must be nonnegative, got kappa={} gamma={}",
                self.kappa, self.gamma
            ));
        }
        if self.n_t_bath < 0.0 {
            return err(format!(
                "bath occupancy must be nonnegative, got {}",
                self.n_t_bath
            ));
        }
        if self.gap < 0.0 {
            return err(format!("inter-atom gap must be nonnegative, got {}", self.gap));
        }
        if !(self.dt > 0.0) {
            return err(format!("integrator step must be positive, got {}", self.dt));
        }
        let max_step = self.max_step();
        if self.dt > max_step {
            return err(format!(
                "dt = {:.3e} s is too coarse; need at most {:.3e} s (100 steps per fastest timescale)",
                self.dt, max_step
            ));
        }
        Ok(())
    }
}

/// Result of one open-system cooling run.
#[derive(Debug, Clone)]
pub struct OpenRunResult {
    /// Normalized field state after the last gap.
    pub final_field: FieldState,
    /// Per-atom ground-detection probability.
    pub p_stage: Vec<f64>,
    /// Product of the stage probabilities.
    pub p_total: f64,
    /// ⟨0|ρ|0⟩ of the final field.
    pub vacuum_fidelity: f64,
    /// Occupancy of the best-fitting thermal state.
    pub best_thermal_nbar: f64,
    /// Fidelity against that thermal state.
    pub fidelity_to_best_thermal: f64,
    /// (time, mean photon number), sampled roughly every microsecond.
    pub trajectory: Vec<(f64, f64)>,
}

/// Field annihilation operator on the truncated space: a|n⟩ = √n|n−1⟩.
pub fn annihilation_operator(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Field creation operator a† = (annihilation)ᵀ.
pub fn creation_operator(dim: usize) -> CMatrix {
    annihilation_operator(dim).transpose()
}

fn sigma_minus() -> CMatrix {
    // |g><e| in the (|e>, |g>) basis
    let mut s = CMatrix::zeros(2, 2);
    s[(1, 0)] = C64::ONE;
    s
}

/// The four reservoir operators on the joint space with rates absorbed
/// (L = √rate · op): √(Γ(1+n̄))σ₋⊗I, √(Γn̄)σ₊⊗I, √(κ(1+n̄))I⊗a, √(κn̄)I⊗a†.
/// Zero-rate channels are omitted, so a T = 0 bath yields two operators.
pub fn joint_dissipators(p: &PhysicalParams, field_dim: usize) -> Vec<CMatrix> {
    let id_f = CMatrix::identity(field_dim, field_dim);
    let id_a = CMatrix::identity(2, 2);
    let sm = sigma_minus();
    let a = annihilation_operator(field_dim);
    let channels = [
        (p.gamma * (1.0 + p.n_t_bath), sm.kronecker(&id_f)),
        (p.gamma * p.n_t_bath, sm.adjoint().kronecker(&id_f)),
        (p.kappa * (1.0 + p.n_t_bath), id_a.kronecker(&a)),
        (p.kappa * p.n_t_bath, id_a.kronecker(&a.adjoint())),
    ];
    channels
        .into_iter()
        .filter(|(rate, _)| *rate > 0.0)
        .map(|(rate, op)| op * C64::new(rate.sqrt(), 0.0))
        .collect()
}

/// The two cavity reservoir operators for the atom-free intervals:
/// √(κ(1+n̄))a and √(κn̄)a†, zero-rate channels omitted.
pub fn field_dissipators(p: &PhysicalParams, field_dim: usize) -> Vec<CMatrix> {
    let a = annihilation_operator(field_dim);
    let channels = [
        (p.kappa * (1.0 + p.n_t_bath), a.clone()),
        (p.kappa * p.n_t_bath, a.adjoint()),
    ];
    channels
        .into_iter()
        .filter(|(rate, _)| *rate > 0.0)
        .map(|(rate, op)| op * C64::new(rate.sqrt(), 0.0))
        .collect()
}

/// Sparse triplet view of an operator; the reservoir and Hamiltonian
/// matrices here have O(dim) nonzeros, which turns every right-hand-side
/// evaluation into O(k·dim²) column AXPYs instead of dense products.
struct SparseOp {
    triplets: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    fn from_dense(m: &CMatrix) -> Self {
        let mut triplets = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != C64::ZERO {
                    triplets.push((i, j, v));
                }
            }
        }
        Self { triplets }
    }

    fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    /// out += α · (self · x)
    fn acc_mul_dense(&self, alpha: C64, x: &CMatrix, out: &mut CMatrix) {
        let n = x.nrows();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for c in 0..n {
            let base = c * n;
            for &(i, j, v) in &self.triplets {
                os[base + i] += alpha * v * xs[base + j];
            }
        }
    }

    /// out += α · (x · self)
    fn acc_dense_mul(&self, alpha: C64, x: &CMatrix, out: &mut CMatrix) {
        let n = x.nrows();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for &(i, j, v) in &self.triplets {
            let av = alpha * v;
            let (src, dst) = (i * n, j * n);
            for r in 0..n {
                os[dst + r] += av * xs[src + r];
            }
        }
    }

    /// out += α · (x · self†)
    fn acc_dense_mul_adjoint(&self, alpha: C64, x: &CMatrix, out: &mut CMatrix) {
        let n = x.nrows();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for &(i, j, v) in &self.triplets {
            let av = alpha * v.conj();
            let (src, dst) = (j * n, i * n);
            for r in 0..n {
                os[dst + r] += av * xs[src + r];
            }
        }
    }
}

struct Channel {
    l: SparseOp,
    /// L†L, for the anticommutator half.
    ldl: SparseOp,
}

struct Generator {
    h: SparseOp,
    channels: Vec<Channel>,
}

impl Generator {
    fn new(h: &CMatrix, dissipators: &[CMatrix]) -> Self {
        let channels = dissipators
            .iter()
            .map(|l| Channel {
                l: SparseOp::from_dense(l),
                ldl: SparseOp::from_dense(&(l.adjoint() * l)),
            })
            .collect();
        Self {
            h: SparseOp::from_dense(h),
            channels,
        }
    }

    fn is_trivial(&self) -> bool {
        self.h.is_empty() && self.channels.is_empty()
    }

    /// out = −i[H, ρ] + Σ (LρL† − ½{L†L, ρ})
    fn rhs_into(&self, rho: &CMatrix, tmp: &mut CMatrix, out: &mut CMatrix) {
        out.fill(C64::ZERO);
        let minus_i = C64::new(0.0, -1.0);
        let plus_i = C64::new(0.0, 1.0);
        self.h.acc_mul_dense(minus_i, rho, out);
        self.h.acc_dense_mul(plus_i, rho, out);
        let half = C64::new(-0.5, 0.0);
        for ch in &self.channels {
            tmp.fill(C64::ZERO);
            ch.l.acc_mul_dense(C64::ONE, rho, tmp);
            ch.l.acc_dense_mul_adjoint(C64::ONE, tmp, out);
            ch.ldl.acc_mul_dense(half, rho, out);
            ch.ldl.acc_dense_mul(half, rho, out);
        }
    }
}

fn check_dims(rho: &CMatrix, h: &CMatrix, dissipators: &[CMatrix]) -> Result<(), LindbladError> {
    let dim = rho.nrows();
    for m in std::iter::once(h).chain(dissipators) {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(LindbladError::DimensionMismatch {
                rows: m.nrows(),
                cols: m.ncols(),
                dim,
            });
        }
    }
    Ok(())
}

/// Lindblad right-hand side −i[H, ρ] + Σ_i (L_i ρ L_i† − ½{L_i†L_i, ρ})
/// with the rates already absorbed into the operators (L = √rate · op).
/// H is in angular-frequency units. The result is Hermitian and traceless.
pub fn lindblad_rhs(
    rho: &CMatrix,
    h: &CMatrix,
    dissipators: &[CMatrix],
) -> Result<CMatrix, LindbladError> {
    check_dims(rho, h, dissipators)?;
    let gen = Generator::new(h, dissipators);
    let dim = rho.nrows();
    let mut tmp = CMatrix::zeros(dim, dim);
    let mut out = CMatrix::zeros(dim, dim);
    gen.rhs_into(rho, &mut tmp, &mut out);
    Ok(out)
}

/// out = base + coeff · add, elementwise.
fn lin_comb_into(out: &mut CMatrix, base: &CMatrix, coeff: f64, add: &CMatrix) {
    let (os, bs, ks) = (out.as_mut_slice(), base.as_slice(), add.as_slice());
    let c = C64::new(coeff, 0.0);
    for ((o, &b), &k) in os.iter_mut().zip(bs).zip(ks) {
        *o = b + c * k;
    }
}

struct Rk4Workspace {
    k1: CMatrix,
    k2: CMatrix,
    k3: CMatrix,
    k4: CMatrix,
    stage: CMatrix,
    tmp: CMatrix,
}

impl Rk4Workspace {
    fn new(dim: usize) -> Self {
        let z = || CMatrix::zeros(dim, dim);
        Self {
            k1: z(),
            k2: z(),
            k3: z(),
            k4: z(),
            stage: z(),
            tmp: z(),
        }
    }
}

fn rk4_step(gen: &Generator, rho: &mut CMatrix, dt: f64, ws: &mut Rk4Workspace) {
    gen.rhs_into(rho, &mut ws.tmp, &mut ws.k1);
    lin_comb_into(&mut ws.stage, rho, dt / 2.0, &ws.k1);
    gen.rhs_into(&ws.stage, &mut ws.tmp, &mut ws.k2);
    lin_comb_into(&mut ws.stage, rho, dt / 2.0, &ws.k2);
    gen.rhs_into(&ws.stage, &mut ws.tmp, &mut ws.k3);
    lin_comb_into(&mut ws.stage, rho, dt, &ws.k3);
    gen.rhs_into(&ws.stage, &mut ws.tmp, &mut ws.k4);
    let w = C64::new(dt / 6.0, 0.0);
    let rs = rho.as_mut_slice();
    let (k1, k2, k3, k4) = (
        ws.k1.as_slice(),
        ws.k2.as_slice(),
        ws.k3.as_slice(),
        ws.k4.as_slice(),
    );
    let two = C64::new(2.0, 0.0);
    for (idx, r) in rs.iter_mut().enumerate() {
        *r += w * (k1[idx] + two * k2[idx] + two * k3[idx] + k4[idx]);
    }
}

fn min_diagonal(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

fn positivity_check(
    rho: &CMatrix,
    time: f64,
    dt: f64,
    full: bool,
) -> Result<(), LindbladError> {
    let fail = |eigenvalue: f64| LindbladError::PositivityLoss {
        eigenvalue,
        time,
        dt,
        suggested: dt / 2.0,
    };
    // The smallest eigenvalue never exceeds the smallest diagonal entry,
    // so a bad diagonal is already conclusive.
    if min_diagonal(rho) < POSITIVITY_FLOOR {
        return Err(fail(linalg::min_eigenvalue(rho)));
    }
    if full && linalg::gershgorin_lower_bound(rho) < POSITIVITY_FLOOR {
        let min_eig = linalg::min_eigenvalue(rho);
        if min_eig < POSITIVITY_FLOOR {
            return Err(fail(min_eig));
        }
    }
    Ok(())
}

fn evolve_inner(
    rho0: &CMatrix,
    h: &CMatrix,
    dissipators: &[CMatrix],
    duration: f64,
    dt: f64,
    mut observer: Option<(usize, &mut dyn FnMut(f64, &CMatrix))>,
) -> Result<CMatrix, LindbladError> {
    check_dims(rho0, h, dissipators)?;
    if duration < 0.0 {
        return Err(LindbladError::NegativeDuration(duration));
    }
    if dt <= 0.0 {
        return Err(LindbladError::NonPositiveStep(dt));
    }
    if duration == 0.0 {
        return Ok(rho0.clone());
    }
    let gen = Generator::new(h, dissipators);
    if gen.is_trivial() {
        if let Some((_, f)) = observer.as_mut() {
            f(duration, rho0);
        }
        return Ok(rho0.clone());
    }

    let dim = rho0.nrows();
    let mut rho = rho0.clone();
    let mut ws = Rk4Workspace::new(dim);
    let trace0 = linalg::trace_re(&rho);

    let full_steps = (duration / dt).floor() as usize;
    let remainder = duration - full_steps as f64 * dt;
    // Guard against a remainder that is pure round-off.
    let total_steps = full_steps + usize::from(remainder > 1e-12 * dt);

    let mut t = 0.0;
    for step in 1..=total_steps {
        let h_step = if step <= full_steps { dt } else { remainder };
        rk4_step(&gen, &mut rho, h_step, &mut ws);
        linalg::hermitize_mut(&mut rho);
        t += h_step;
        let last = step == total_steps;

        let drift = (linalg::trace_re(&rho) - trace0).abs();
        if drift > TRACE_DRIFT_TOL {
            return Err(LindbladError::TraceDrift {
                drift,
                time: t,
                dt,
                suggested: dt / 2.0,
            });
        }
        positivity_check(&rho, t, dt, step % EIG_CHECK_STRIDE == 0 || last)?;
        if let Some((stride, f)) = observer.as_mut() {
            if step % *stride == 0 || last {
                f(t, &rho);
            }
        }
    }
    Ok(rho)
}

/// Fixed-step RK4 integration of the master equation for `duration`
/// seconds. The final step is shortened to land exactly on `duration`;
/// the state is re-Hermitized after every step. Fails when the trace
/// drifts by more than [`TRACE_DRIFT_TOL`] or an eigenvalue falls below
/// [`POSITIVITY_FLOOR`], both signs that `dt` is too coarse.
pub fn evolve(
    rho0: &CMatrix,
    h: &CMatrix,
    dissipators: &[CMatrix],
    duration: f64,
    dt: f64,
) -> Result<CMatrix, LindbladError> {
    evolve_inner(rho0, h, dissipators, duration, dt, None)
}

/// ρ ← (u ⊗ I) ρ (u ⊗ I)† for a 2×2 atomic unitary acting on the
/// atom-major joint state, done blockwise in O(dim²).
fn apply_atom_unitary(joint: &CMatrix, u: &CMatrix, field_dim: usize) -> CMatrix {
    let d = field_dim;
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    for a in 0..2 {
        for b in 0..2 {
            let mut block = CMatrix::zeros(d, d);
            for c in 0..2 {
                for e in 0..2 {
                    let coeff = u[(a, c)] * u[(b, e)].conj();
                    if coeff != C64::ZERO {
                        block += joint.view((c * d, e * d), (d, d)) * coeff;
                    }
                }
            }
            out.view_mut((a * d, b * d), (d, d)).copy_from(&block);
        }
    }
    out
}

fn joint_mean_photon(joint: &CMatrix, field_dim: usize) -> f64 {
    (0..field_dim)
        .map(|n| n as f64 * (joint[(n, n)].re + joint[(field_dim + n, field_dim + n)].re))
        .sum()
}

fn field_mean_photon(field: &CMatrix) -> f64 {
    (0..field.nrows()).map(|n| n as f64 * field[(n, n)].re).sum()
}

/// Full lossy cooling run. Per atom: attach a fresh |e⟩ atom, apply the
/// first π/2 pulse, integrate the joint master equation for
/// τ_k = φ_k δ/g², apply the second pulse, project the atom onto |g⟩
/// (recording the stage probability), then let the field alone relax for
/// the inter-atom gap.
pub fn run_open_protocol(
    p: &PhysicalParams,
    seq: &PhaseSequence,
    rho0: &FieldState,
) -> Result<OpenRunResult, LindbladError> {
    p.validate()?;
    if !rho0.is_normalized() {
        return Err(LindbladError::NotNormalized { trace: rho0.trace() });
    }
    let dim = rho0.dim();
    let chi = p.dispersive_shift();
    let mut h_joint = CMatrix::zeros(2 * dim, 2 * dim);
    for n in 0..dim {
        h_joint[(n, n)] = C64::new(chi * n as f64, 0.0); // |e> block only
    }
    let h_field = CMatrix::zeros(dim, dim);
    let diss_joint = joint_dissipators(p, dim);
    let diss_field = field_dissipators(p, dim);
    let ramsey = ramsey_matrix();
    let stride = usize::max(1, (1e-6 / p.dt).round() as usize);

    let mut field = rho0.matrix();
    let mut p_stage = Vec::with_capacity(seq.len());
    let mut p_total = 1.0;
    let mut trajectory = vec![(0.0, field_mean_photon(&field))];
    let mut t_cursor = 0.0;

    for (stage, &phi) in seq.phases().iter().enumerate() {
        let tau = protocol::interaction_time_for_phase(p.g, p.delta, phi)?;

        let mut joint = CMatrix::zeros(2 * dim, 2 * dim);
        joint.view_mut((0, 0), (dim, dim)).copy_from(&field);
        joint = apply_atom_unitary(&joint, &ramsey, dim);
        {
            let t0 = t_cursor;
            let traj = &mut trajectory;
            let mut obs = |t: f64, m: &CMatrix| traj.push((t0 + t, joint_mean_photon(m, dim)));
            joint = evolve_inner(&joint, &h_joint, &diss_joint, tau, p.dt, Some((stride, &mut obs)))?;
        }
        t_cursor += tau;
        joint = apply_atom_unitary(&joint, &ramsey, dim);

        // Project the atom onto |g> and renormalize the field.
        let block: CMatrix = joint.view((dim, dim), (dim, dim)).into();
        let prob = linalg::trace_re(&block);
        if prob < POSTSELECTION_UNDERFLOW {
            return Err(LindbladError::ImpossiblePostselection {
                stage,
                probability: prob,
            });
        }
        p_stage.push(prob);
        p_total *= prob;
        field = block / C64::new(prob, 0.0);
        linalg::hermitize_mut(&mut field);

        {
            let t0 = t_cursor;
            let traj = &mut trajectory;
            let mut obs = |t: f64, m: &CMatrix| traj.push((t0 + t, field_mean_photon(m)));
            field = evolve_inner(&field, &h_field, &diss_field, p.gap, p.dt, Some((stride, &mut obs)))?;
        }
        t_cursor += p.gap;
    }

    let final_field = FieldState::from_matrix(field)?;
    let vacuum_fidelity = protocol::vacuum_fidelity(&final_field)?;
    let (best_thermal_nbar, fidelity_to_best_thermal) = best_thermal_fit(&final_field);
    Ok(OpenRunResult {
        final_field,
        p_stage,
        p_total,
        vacuum_fidelity,
        best_thermal_nbar,
        fidelity_to_best_thermal,
        trajectory,
    })
}

/// Thermal occupancy maximizing the fidelity between the (diagonal) input
/// and a thermal reference of the same dimension, located by
/// golden-section search to 1e−6 absolute in n̄.
pub fn best_thermal_fit(rho: &FieldState) -> (f64, f64) {
    let probs = photon_distribution(rho);
    let dim = rho.dim();
    let score = |n: f64| {
        fock::fidelity_from_distributions(&probs, &thermal_probabilities(n, dim))
    };
    let (mut lo, mut hi) = (0.0_f64, 10.0 * fock::mean_photon(rho) + 1.0);
    let inv_phi = 0.5 * (f64::sqrt(5.0) - 1.0);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (score(c), score(d));
    while hi - lo > 1e-6 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = score(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = score(d);
        }
    }
    let n_best = 0.5 * (lo + hi);
    (n_best, score(n_best))
}
