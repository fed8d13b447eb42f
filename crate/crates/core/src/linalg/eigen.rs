//! Floating-point eigendecomposition for small real matrices with real,
//! distinct spectra. Nothing here is verified: the transform only needs
//! to be some fixed invertible matrix, and every downstream guarantee is
//! carried by the interval enclosure of its inverse.

use super::matrix::Matrix;
use super::LinalgError;

/// Condition estimate beyond which eigenvectors are treated as defective.
pub const MAX_CONDITION: f64 = 1e12;

const MAX_QR_SWEEPS: usize = 60;

/// Eigenvalues and matching unit eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Explicit column arrangement: columns are ordered to match `order`
/// (nearest eigenvalue) and column `k` is negated where `negate[k]`.
/// Applied on top of the canonical sign convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnLayout {
    pub order: Vec<f64>,
    pub negate: Vec<bool>,
}

/// Eigenvectors of `a` as columns of unit 2-norm whose largest-magnitude
/// component is positive, sorted by ascending eigenvalue.
pub fn midpoint_eigvectors(a: &Matrix) -> Result<EigenDecomposition, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let scale = a.norm_inf().max(f64::MIN_POSITIVE);
    let (wr, wi) = eigenvalues(a)?;
    if let Some(k) = wi.iter().position(|&im| im.abs() > 1e-10 * scale) {
        return Err(LinalgError::ComplexEigenvalues { re: wr[k], im: wi[k].abs() });
    }
    let mut values = wr;
    values.sort_by(f64::total_cmp);
    let mut vectors = Matrix::zeros(n, n);
    for (j, &lambda) in values.iter().enumerate() {
        vectors.set_col(j, &inverse_iteration(a, lambda, scale)?);
    }
    let cond = condition_estimate(&vectors);
    if !(cond <= MAX_CONDITION) {
        return Err(LinalgError::NearDefective { condition: cond });
    }
    Ok(EigenDecomposition { values, vectors })
}

impl EigenDecomposition {
    /// Rearranges columns according to `layout`.
    pub fn with_layout(&self, layout: &ColumnLayout) -> Result<EigenDecomposition, LinalgError> {
        let n = self.values.len();
        if layout.order.len() != n || layout.negate.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, got: layout.order.len() });
        }
        let mut used = vec![false; n];
        let mut values = Vec::with_capacity(n);
        let mut vectors = Matrix::zeros(n, n);
        for (k, &target) in layout.order.iter().enumerate() {
            let j = (0..n)
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (self.values[i] - target).abs().total_cmp(&(self.values[j] - target).abs()))
                .expect("one unused column per target");
            used[j] = true;
            values.push(self.values[j]);
            let sign = if layout.negate[k] { -1.0 } else { 1.0 };
            let col: Vec<f64> = self.vectors.col(j).iter().map(|x| sign * x).collect();
            vectors.set_col(k, &col);
        }
        Ok(EigenDecomposition { values, vectors })
    }

    /// `‖A T - T D‖_∞`.
    pub fn residual(&self, a: &Matrix) -> f64 {
        let at = a.mul(&self.vectors).expect("square");
        let td = self.vectors.mul(&Matrix::from_diagonal(&self.values)).expect("square");
        at.sub(&td).expect("same shape").norm_inf()
    }
}

fn condition_estimate(t: &Matrix) -> f64 {
    match t.inverse() {
        Ok(inv) => t.norm_inf() * inv.norm_inf(),
        Err(_) => f64::INFINITY,
    }
}

/// Unit eigenvector for the (approximate) eigenvalue `lambda`.
fn inverse_iteration(a: &Matrix, lambda: f64, scale: f64) -> Result<Vec<f64>, LinalgError> {
    let n = a.rows();
    let shift = lambda + 1e-10 * scale;
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let lu = match m.lu() {
        Ok(lu) => lu,
        Err(_) => {
            for i in 0..n {
                m[(i, i)] -= 1e-13 * scale;
            }
            m.lu()?
        }
    };
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    normalize(&mut v);
    for _ in 0..4 {
        v = lu.solve(&v);
        if v.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NearDefective { condition: f64::INFINITY });
        }
        normalize(&mut v);
    }
    canonical_sign(&mut v);
    Ok(v)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Makes the largest-magnitude component positive; near-ties go to the
/// first index.
fn canonical_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(k) = v.iter().position(|x| x.abs() >= max * (1.0 - 1e-9)) {
        if v[k] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Eigenvalues (real and imaginary parts) by balancing, reduction to upper
/// Hessenberg form and the Francis double-shift QR iteration.
pub fn eigenvalues(a: &Matrix) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    let n = a.rows();
    // 1-based working copy keeps the classical index arithmetic readable
    let mut h = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            h[i + 1][j + 1] = a[(i, j)];
        }
    }
    balance(&mut h, n);
    hessenberg(&mut h, n);
    hqr(&mut h, n)
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().skip(1) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Similarity reduction to upper Hessenberg form by stabilized elimination.
fn hessenberg(a: &mut [Vec<f64>], n: usize) {
    for m in 2..n {
        let mut x = 0.0f64;
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in m - 1..=n {
                let t = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().skip(1) {
                row.swap(i, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..=n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] -= y * a[m][j];
                    }
                    for j in 1..=n {
                        a[j][m] += y * a[j][i];
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..i.saturating_sub(1) {
            a[i][j] = 0.0;
        }
    }
}

fn hqr(a: &mut [Vec<f64>], n: usize) -> Result<(Vec<f64>, Vec<f64>), LinalgError> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = a[nn - 1][nn - 1];
                let mut w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_QR_SWEEPS {
                        return Err(LinalgError::NoConvergence);
                    }
                    if its == 10 || its == 20 {
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r, mut z);
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            let mmin = nn.min(k + 3);
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((wr[1..].to_vec(), wi[1..].to_vec()))
}
