//! Dense operators and density operators on 2^k-dimensional spaces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::PureState;
use crate::error::{invalid, Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A square complex matrix whose dimension is a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
}

impl Operator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !matrix.nrows().is_power_of_two() {
            return Err(invalid(format!(
                "operator dimension {} is not a power of two",
                matrix.nrows()
            )));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        debug_assert!(matrix.is_square() && matrix.nrows().is_power_of_two());
        Self { matrix }
    }

    /// Row-major construction.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_matrix_unchecked(self.matrix.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Self::from_matrix_unchecked(&self.matrix * c)
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Self::from_matrix_unchecked(&self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Self::from_matrix_unchecked(&self.matrix - &other.matrix))
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_dim(other)?;
        Ok(Self::from_matrix_unchecked(&self.matrix * &other.matrix))
    }

    /// `self (x) other`; `other` occupies the low-order qubits.
    pub fn kron(&self, other: &Operator) -> Operator {
        Self::from_matrix_unchecked(self.matrix.kronecker(&other.matrix))
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.matrix.adjoint() * &self.matrix;
        max_abs_diff(&prod, &CMatrix::identity(self.dim(), self.dim())) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs_diff(&self.matrix, &self.matrix.adjoint()) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix) <= tol
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        if amps.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: amps.len(),
            });
        }
        let mut out = vec![ZERO; amps.len()];
        for (r, o) in out.iter_mut().enumerate() {
            *o = self
                .matrix
                .row(r)
                .iter()
                .zip(amps)
                .map(|(m, a)| m * a)
                .sum();
        }
        Ok(out)
    }

    /// Operator 2-norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// The one-qubit Pauli matrices sigma_0..sigma_3 = I, X, Y, Z.
pub fn pauli_matrix(index: usize) -> Result<Operator> {
    let entries = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => return Err(invalid(format!("Pauli index {index} out of range 0..3"))),
    };
    Operator::from_rows(2, &entries)
}

/// A density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-9;
    pub const EIGEN_TOL: f64 = 1e-9;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        Operator::new(matrix.clone())?;
        let herm_dev = max_abs_diff(&matrix, &matrix.adjoint());
        if herm_dev > Self::HERMITIAN_TOL {
            return Err(invalid(format!(
                "density operator not Hermitian (deviation {herm_dev:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(invalid(format!("density operator trace {tr} is not 1")));
        }
        let rho = Self { matrix };
        let min_eig = rho.min_eigenvalue();
        if min_eig < -Self::EIGEN_TOL {
            return Err(invalid(format!(
                "density operator has eigenvalue {min_eig:e} < 0"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self::from_matrix_unchecked(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_matrix_unchecked(CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `<psi| rho |psi>`, real part.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    /// Half the nuclear norm of the difference.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        let diff = &self.matrix - &other.matrix;
        Ok(0.5
            * hermitian_eigenvalues(&diff)
                .iter()
                .map(|e| e.abs())
                .sum::<f64>())
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    // symmetrize to absorb rounding before the Hermitian solver
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    nalgebra::SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .copied()
        .collect()
}
