//! Dense complex linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Real scalar as a complex number.
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `‖U U† − I‖_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    frobenius(&(u * u.adjoint() - CMatrix::identity(n, n)))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the lower triangle is trusted, as usual for symmetric eigensolvers.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `exp(-i H t)` for Hermitian `H`, built from its eigendecomposition.
pub fn hermitian_propagator(h: &CMatrix, t: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
    );
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// Closest unitary in the polar sense: `U (U†U)^{-1/2}`.
pub fn polar_unitary(u: &CMatrix) -> CMatrix {
    let svd = u.clone().svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(w), Some(v_t)) => w * v_t,
        _ => u.clone(),
    }
}

/// `|a⟩⟨a|`.
pub fn outer(a: &CVector) -> CMatrix {
    a * a.adjoint()
}

/// Infidelity `1 − |⟨a|b⟩|` of two unit vectors.
///
/// Evaluated as half the squared distance after removing the relative global
/// phase, which stays accurate when the states are almost identical.
pub fn infidelity(a: &CVector, b: &CVector) -> f64 {
    let overlap = a.dotc(b);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    let diff = a * phase - b;
    0.5 * diff.iter().map(|z| z.norm_sqr()).sum::<f64>()
}
