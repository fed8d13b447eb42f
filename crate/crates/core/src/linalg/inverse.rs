//! Verified enclosure of a matrix inverse.
//!
//! With an approximate inverse `R` and the interval residual
//! `E ⊇ I - R T`, `‖E‖_∞ < 1` proves `T` nonsingular and
//! `T⁻¹ = (I - E)⁻¹ R = R + E (I - E)⁻¹ R`. Row `i` of the correction is
//! bounded entrywise by `δ_i = ‖E_i‖₁ ‖R‖_∞ / (1 - ‖E‖_∞)`.

use super::matrix::Matrix;
use super::LinalgError;
use crate::interval::round::{add_up, div_up, mul_up, sub_down};
use crate::interval::IntervalMatrix;

pub fn verified_inverse(t: &Matrix) -> Result<IntervalMatrix, LinalgError> {
    if !t.is_square() {
        return Err(LinalgError::NotSquare { rows: t.rows(), cols: t.cols() });
    }
    let n = t.rows();
    let r = t.inverse().map_err(|_| LinalgError::SingularOrIllConditioned { residual: f64::INFINITY })?;
    let ri = r.to_interval();
    let rt = ri.mul_mat(&t.to_interval()).expect("square");
    let e = IntervalMatrix::identity(n).add(&neg(&rt)).expect("square");
    let row_norms: Vec<f64> = (0..n).map(|i| e.row(i).iter().fold(0.0, |acc, x| add_up(acc, x.mag()))).collect();
    let e_norm = row_norms.iter().copied().fold(0.0, f64::max);
    if !(e_norm < 1.0) {
        return Err(LinalgError::SingularOrIllConditioned { residual: e_norm });
    }
    let r_norm = (0..n).map(|i| r.row(i).iter().fold(0.0, |acc, x| add_up(acc, x.abs()))).fold(0.0, f64::max);
    let factor = div_up(r_norm, sub_down(1.0, e_norm));
    let mut out = ri;
    for (i, &ei) in row_norms.iter().enumerate() {
        let delta = mul_up(ei, factor);
        for j in 0..n {
            out[(i, j)] = out[(i, j)].inflate_sym(delta).expect("non-negative radius");
        }
    }
    Ok(out)
}

fn neg(m: &IntervalMatrix) -> IntervalMatrix {
    IntervalMatrix::new(m.rows(), m.cols(), m.iter().map(|&x| -x).collect()).expect("same shape")
}

/// `true` when the interval product `E T` contains the identity.
pub fn encloses_identity(e: &IntervalMatrix, t: &Matrix) -> bool {
    let p = e.mul_mat(&t.to_interval()).expect("square");
    (0..p.rows()).all(|i| (0..p.cols()).all(|j| p[(i, j)].contains(if i == j { 1.0 } else { 0.0 })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_inverse_is_tight() {
        let e = verified_inverse(&Matrix::identity(3)).unwrap();
        assert!(e.iter().all(|x| x.width() <= 1e-14));
        assert!(e[(1, 1)].contains(1.0) && e[(0, 2)].contains(0.0));
    }

    #[test]
    fn diagonal_inverse_contains_reciprocals() {
        let e = verified_inverse(&Matrix::from_diagonal(&[2.0, 4.0])).unwrap();
        assert!(e[(0, 0)].contains(0.5) && e[(1, 1)].contains(0.25));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let t = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(verified_inverse(&t), Err(LinalgError::SingularOrIllConditioned { .. })));
    }

    #[test]
    fn hilbert_like_matrix_certificate() {
        let t = Matrix::from_rows(&[&[1.0, 0.5, 1.0 / 3.0], &[0.5, 1.0 / 3.0, 0.25], &[1.0 / 3.0, 0.25, 0.2]]).unwrap();
        let e = verified_inverse(&t).unwrap();
        assert!(encloses_identity(&e, &t));
    }
}
