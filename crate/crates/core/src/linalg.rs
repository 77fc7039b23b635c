//! Small dense complex linear algebra used throughout the crate.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance for the Hermitian check.
const HERMITIAN_TOL: f64 = 1e-12;

/// A square Hermitian matrix (a metric tensor value at a point).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    /// Wraps `m` after checking that it is square and Hermitian.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::ShapeMismatch(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        let asym = (&m - m.adjoint()).camax();
        if asym > HERMITIAN_TOL * m.camax().max(1.0) {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self::symmetrized(m))
    }

    /// `(M + M*) / 2`.
    pub fn symmetrized(m: DMatrix<Complex64>) -> Self {
        let adj = m.adjoint();
        HermitianMatrix((m + adj) * Complex64::new(0.5, 0.0))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        HermitianMatrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn determinant(&self) -> f64 {
        self.0.clone().determinant().re
    }

    /// Fails unless every eigenvalue is strictly positive.
    pub fn require_positive_definite(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min > 0.0 && min.is_finite() {
            Ok(())
        } else {
            Err(Error::NotPositiveDefinite { min_eigenvalue: min })
        }
    }

    /// `sum_{ij} M_ij X_i conj(X_j)`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Result<f64> {
        let n = self.order();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.0[(i, j)] * x[i] * x[j].conj();
            }
        }
        Ok(acc.re)
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix(&self.0 * Complex64::new(s, 0.0))
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &other.0)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        (&self.0 - &other.0).camax()
    }
}

impl Serialize for HermitianMatrix {
    /// Rows of `[re, im]` pairs.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(self.order()))?;
        for i in 0..self.order() {
            let row: Vec<[f64; 2]> = (0..self.order())
                .map(|j| [self.0[(i, j)].re, self.0[(i, j)].im])
                .collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

/// Determinant of a square complex matrix.
pub fn determinant(m: &DMatrix<Complex64>) -> Complex64 {
    m.clone().determinant()
}
