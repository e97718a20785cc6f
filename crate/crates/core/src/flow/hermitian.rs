use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Dense complex square matrix that is Hermitian to within
/// [`HermitianMatrix::TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    /// Absolute tolerance on `|H_ij − conj(H_ji)|` accepted at construction.
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, Self::TOLERANCE)
    }

    /// Validates Hermiticity against `tol`, then symmetrizes so the stored
    /// matrix is exactly Hermitian.
    pub fn with_tolerance(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        let dev = hermiticity_defect(&m);
        if !(dev <= tol) {
            return Err(Error::NotHermitian { max_deviation: dev });
        }
        Ok(Self::hermitize(m))
    }

    /// Row-major complex entries.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: entries.len() });
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    /// Row-major real symmetric entries.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| linalg::re(x)).collect();
        Self::from_row_slice(dim, &c)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let n = diag.len();
        Ok(Self { inner: CMatrix::from_fn(n, n, |i, j| if i == j { linalg::re(diag[i]) } else { linalg::ZERO }) })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_diagonal(&vec![1.0; dim])
    }

    /// Projects onto the Hermitian part, `(M + M†)/2`.
    pub(crate) fn hermitize(m: CMatrix) -> Self {
        let inner = (&m + m.adjoint()) * linalg::re(0.5);
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_inner(self) -> CMatrix {
        self.inner
    }

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).collect()
    }

    /// Ascending eigenvalues from a dense eigensolver.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.inner)
    }

    /// `tr(H^k)`, real for Hermitian `H`.
    pub fn trace_power(&self, k: u32) -> f64 {
        let mut p = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            p = &p * &self.inner;
        }
        p.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { inner: &self.inner * linalg::re(s) }
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.inner[idx]
    }
}

/// Largest `|M_ij − conj(M_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[linalg::re(1.0), linalg::re(2.0), linalg::re(2.1), linalg::re(0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_complex_diagonal() {
        let m = CMatrix::from_row_slice(1, 1, &[Complex64::new(1.0, 1e-6)]);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_empty_and_rectangular() {
        assert_eq!(HermitianMatrix::new(CMatrix::zeros(0, 0)), Err(Error::EmptyMatrix));
        assert!(matches!(HermitianMatrix::new(CMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
        assert!(HermitianMatrix::from_diagonal(&[]).is_err());
    }

    #[test]
    fn accepts_tiny_asymmetry_and_symmetrizes() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[linalg::re(1.0), Complex64::new(0.5, 0.25), Complex64::new(0.5 + 5e-13, -0.25), linalg::re(3.0)],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(hermiticity_defect(h.as_matrix()), 0.0);
        assert_eq!(h.diagonal(), vec![1.0, 3.0]);
    }

    #[test]
    fn trace_powers_of_diagonal() {
        let h = HermitianMatrix::from_diagonal(&[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(h.trace_power(1), 2.0);
        assert_eq!(h.trace_power(2), 14.0);
        assert_eq!(h.trace_power(3), 20.0);
    }
}
