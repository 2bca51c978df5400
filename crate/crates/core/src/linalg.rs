// Copyright 2026 photon-cooling Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex-matrix helpers shared across the crate.
//!
//! Everything operates on `nalgebra::DMatrix<Complex64>` in column-major
//! storage. Density matrices are checked through these functions rather
//! than trusted by construction.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Max |m[i,j] − conj(m[j,i])| over all index pairs.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Sum of |m[i,j]| over i ≠ j.
pub fn off_diagonal_l1(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut sum = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                sum += m[(i, j)].norm();
            }
        }
    }
    sum
}

/// True when every off-diagonal entry is exactly zero.
pub fn is_exactly_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != C64::ZERO {
                return false;
            }
        }
    }
    true
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

pub fn trace_im(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.im).sum()
}

/// (m + m†)/2, removing anti-Hermitian round-off.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// In-place variant of [`hermitize`].
pub fn hermitize_mut(m: &mut CMatrix) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        let d = m[(j, j)];
        m[(j, j)] = C64::new(d.re, 0.0);
    }
}

/// Gershgorin lower bound on the spectrum of a Hermitian matrix:
/// min_i (Re m[i,i] − Σ_{j≠i} |m[i,j]|). Cheap but often loose; use as a
/// fast positivity certificate before falling back to [`min_eigenvalue`].
pub fn gershgorin_lower_bound(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut bound = f64::INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        for j in 0..n {
            if i != j {
                radius += m[(i, j)].norm();
            }
        }
        bound = bound.min(m[(i, i)].re - radius);
    }
    bound
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if is_exactly_diagonal(m) {
        let mut vals: Vec<f64> = m.diagonal().iter().map(|z| z.re).collect();
        vals.sort_by(f64::total_cmp);
        return vals;
    }
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Trace distance ½‖a − b‖₁ between Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>()
}
