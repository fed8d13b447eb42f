//! Full-memory Grünwald-Letnikov stepping for Caputo systems.

use super::OracleError;

/// Trajectory sampled at `t_k = k h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlTrajectory {
    pub h: f64,
    pub states: Vec<Vec<f64>>,
}

impl GlTrajectory {
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().map_or(&[], Vec::as_slice)
    }
}

/// Binomial weights `w_j = (-1)^j C(ν, j)` for `j = 0..=m`.
pub fn gl_weights(nu: f64, m: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(m + 1);
    w.push(1.0);
    for j in 1..=m {
        let prev = w[j - 1];
        w.push(prev * (1.0 - (nu + 1.0) / j as f64));
    }
    w
}

/// Explicit stepping of `x^(ν) = f(x)` (Caputo) with the whole history:
///
/// ```text
/// x_k = h^ν f(x_{k-1}) - Σ_{j=1}^{k} w_j x_{k-j} + c_k x_0,   c_k = Σ_{j=0}^{k} w_j
/// ```
///
/// The `c_k x_0` term applies the scheme to `x - x_0`, which turns the
/// Grünwald-Letnikov derivative into the Caputo one. For `ν = 1` every
/// `c_k` with `k ≥ 1` vanishes and the recursion is forward Euler.
pub fn gl_simulate<F>(nu: f64, f: F, x0: &[f64], h: f64, t_end: f64) -> Result<GlTrajectory, OracleError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(OracleError::Domain(format!("order must lie in (0, 1], got {nu}")));
    }
    if !(h > 0.0) || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(OracleError::Domain(format!("need h > 0 and t_end >= 0, got h = {h}, t_end = {t_end}")));
    }
    let steps = (t_end / h - 1e-9).ceil().max(0.0) as usize;
    let n = x0.len();
    let w = gl_weights(nu, steps);
    // reversed weights: Σ_{j=1}^{k} w_j x_{k-j} = Σ_{i<k} rev[steps - k + i] x_i
    let rev: Vec<f64> = w[1..].iter().rev().copied().collect();
    let hnu = h.powf(nu);
    // per-component history, contiguous for the convolution
    let mut hist: Vec<Vec<f64>> = x0
        .iter()
        .map(|&v| {
            let mut c = Vec::with_capacity(steps + 1);
            c.push(v);
            c
        })
        .collect();
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    let mut c_k = w[0];
    let mut x = x0.to_vec();
    for k in 1..=steps {
        c_k += w[k];
        let fx = f(&x);
        let window = &rev[steps - k..];
        for i in 0..n {
            let memory = dot(&hist[i][..k], window);
            x[i] = (hnu * fx[i] - memory) + c_k * x0[i];
        }
        if x.iter().any(|v| !(v.abs() <= 1e9)) {
            return Err(OracleError::StepTooLarge { t: k as f64 * h });
        }
        for (col, &v) in hist.iter_mut().zip(&x) {
            col.push(v);
        }
        states.push(x.clone());
    }
    Ok(GlTrajectory { h, states })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}
