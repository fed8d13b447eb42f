use super::ModelError;
use crate::linalg::Matrix;

/// Monic polynomial coefficients `[1, c_{n-1}, ..., c_0]` of `Π (s - r_i)`.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck;
            next[k + 1] -= r * ck;
        }
        c = next;
    }
    c
}

/// Characteristic polynomial `det(sI - A)` by the Faddeev-LeVerrier
/// recursion, highest power first.
pub fn char_poly(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.mul(&m).expect("square");
        let c_prev = *coeffs.last().expect("non-empty");
        for i in 0..n {
            next[(i, i)] += c_prev;
        }
        let am = a.mul(&next).expect("square");
        let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs.push(-trace / k as f64);
        m = next;
    }
    coeffs
}

/// State-feedback gain `k` such that `A - b kᵀ` has the `desired`
/// spectrum (Ackermann's formula `kᵀ = e_nᵀ C⁻¹ p(A)`).
pub fn pole_placement(a: &Matrix, b: &[f64], desired: &[f64]) -> Result<Vec<f64>, ModelError> {
    let n = a.rows();
    if !a.is_square() || b.len() != n || desired.len() != n {
        return Err(ModelError::Invalid("pole placement needs square A and matching b".into()));
    }
    let mut ctrb = Matrix::zeros(n, n);
    let mut col = b.to_vec();
    for j in 0..n {
        ctrb.set_col(j, &col);
        col = a.mul_vec(&col)?;
    }
    let measure = controllability_measure(&ctrb);
    if !(measure > 1e-10) {
        return Err(ModelError::Uncontrollable { measure });
    }
    let lu = ctrb.transpose().lu().map_err(|_| ModelError::Uncontrollable { measure })?;
    let mut e_n = vec![0.0; n];
    e_n[n - 1] = 1.0;
    let w = lu.solve(&e_n);
    // p(A) by Horner
    let p = poly_from_roots(desired);
    let mut pa = Matrix::zeros(n, n);
    for &c in &p {
        pa = a.mul(&pa)?;
        for i in 0..n {
            pa[(i, i)] += c;
        }
    }
    Ok((0..n).map(|j| (0..n).map(|i| w[i] * pa[(i, j)]).sum()).collect())
}

/// Reciprocal condition number of the column-normalized matrix, a
/// scale-free measure in `[0, 1]` that vanishes for singular input.
fn controllability_measure(c: &Matrix) -> f64 {
    let mut scaled = c.clone();
    for j in 0..c.cols() {
        let col = c.col(j);
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        scaled.set_col(j, &col.iter().map(|x| x / norm).collect::<Vec<_>>());
    }
    match scaled.inverse() {
        Ok(inv) => 1.0 / (scaled.norm_inf() * inv.norm_inf()),
        Err(_) => 0.0,
    }
}
