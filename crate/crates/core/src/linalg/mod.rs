//! Dense linear algebra: floating-point matrices and eigenvectors, verified
//! inverse enclosures and the similarity transform into diagonally
//! dominant coordinates.

mod eigen;
mod inverse;
mod matrix;

pub use eigen::{eigenvalues, midpoint_eigvectors, ColumnLayout, EigenDecomposition, MAX_CONDITION};
pub use inverse::{encloses_identity, verified_inverse};
pub use matrix::{Lu, Matrix};

use crate::interval::{IntervalError, IntervalMatrix, IntervalVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("inverse could not be certified (residual norm bound {residual:e})")]
    SingularOrIllConditioned { residual: f64 },
    #[error("complex eigenvalue pair {re} ± {im}i")]
    ComplexEigenvalues { re: f64, im: f64 },
    #[error("eigenvector matrix is nearly defective (condition estimate {condition:e})")]
    NearDefective { condition: f64 },
    #[error("QR iteration did not converge")]
    NoConvergence,
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Similarity transform `x = T z` together with a verified enclosure of
/// `T⁻¹`.
#[derive(Debug, Clone)]
pub struct TransformPair {
    t: Matrix,
    t_interval: IntervalMatrix,
    t_inv: IntervalMatrix,
}

impl TransformPair {
    pub fn new(t: Matrix) -> Result<Self, LinalgError> {
        let t_inv = verified_inverse(&t)?;
        Ok(Self { t_interval: t.to_interval(), t, t_inv })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Matrix::identity(n)).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    pub fn t_interval(&self) -> &IntervalMatrix {
        &self.t_interval
    }

    pub fn t_inv(&self) -> &IntervalMatrix {
        &self.t_inv
    }

    /// `[z] = [T⁻¹] [x]`.
    pub fn to_z(&self, x: &IntervalVector) -> Result<IntervalVector, LinalgError> {
        Ok(self.t_inv.mul_vec(x)?)
    }

    /// `[x] = T [z]`.
    pub fn to_x(&self, z: &IntervalVector) -> Result<IntervalVector, LinalgError> {
        Ok(self.t_interval.mul_vec(z)?)
    }

    /// `[T⁻¹] [A] T`.
    pub fn conjugate(&self, a: &IntervalMatrix) -> Result<IntervalMatrix, LinalgError> {
        Ok(self.t_inv.mul_mat(a)?.mul_mat(&self.t_interval)?)
    }
}

/// Initial box in transformed coordinates, `[z](0) = [T⁻¹] [x](0)`.
pub fn transform_state(tp: &TransformPair, x0: &IntervalVector) -> Result<IntervalVector, LinalgError> {
    tp.to_z(x0)
}
