// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Cooling a thermal cavity field to its vacuum by dispersive atom-field
//! coupling and atomic postselection.
//!
//! Atoms prepared in |e⟩ cross a Ramsey interferometer enclosing the
//! cavity. In the dispersive regime the cavity imprints a photon-number
//! phase on each atom, and detecting every atom in |g⟩ filters the field
//! with Π_k cos²(φ_k n/2). The dyadic schedule φ_k = π/2^(k−1) wipes out
//! every Fock component except multiples of 2^N, steering any thermal
//! state toward the vacuum with success probability → 1/(1+n̄).
//!
//! Modules:
//! - [`fock`]: truncated Fock-space states, distributions, fidelities,
//!   Bose–Einstein temperature conversions.
//! - [`protocol`]: closed-form filters, the dyadic cooling schedule, and
//!   joint postselection probabilities.
//! - [`oracle`]: brute-force joint-unitary simulation validating the
//!   closed forms, plus the randomized equivalence harness.
//! - [`lindblad`]: lossy runs under the thermal master equation.
//! - [`wigner`]: phase-space maps of the resulting states.

pub mod fock;
pub mod linalg;
pub mod lindblad;
pub mod oracle;
pub mod protocol;
pub mod wigner;

pub use fock::{FieldState, Truncation};
pub use lindblad::{OpenRunResult, PhysicalParams};
pub use oracle::{EquivalenceReport, JointState};
pub use protocol::{CoolingResult, Outcome, PhaseSequence, PostselectionSpec};
pub use wigner::PhaseGrid;
