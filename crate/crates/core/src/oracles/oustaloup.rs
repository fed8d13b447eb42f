//! Integer-order comparison path: Oustaloup's recursive approximation of
//! `s^ν`, the exact constant-phase response and a printed 11th-order
//! realization of `1/(1 + s^{1/2})`.

use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;
use serde::Serialize;

use super::OracleError;

/// `H(s) = gain · Π (s - z_k) / Π (s - p_k)` with real zeros and poles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalTF {
    pub zeros: Vec<f64>,
    pub poles: Vec<f64>,
    pub gain: f64,
}

impl RationalTF {
    pub fn new(zeros: Vec<f64>, poles: Vec<f64>, gain: f64) -> Result<Self, OracleError> {
        if zeros.iter().chain(&poles).any(|v| !v.is_finite()) || !gain.is_finite() {
            return Err(OracleError::Domain("transfer function entries must be finite".into()));
        }
        for z in &zeros {
            if poles.iter().any(|p| (p - z).abs() <= 1e-12 * (1.0 + p.abs())) {
                return Err(OracleError::Domain(format!("zero {z} cancels a pole")));
            }
        }
        Ok(Self { zeros, poles, gain })
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let num: Complex64 = self.zeros.iter().map(|z| s - z).product();
        let den: Complex64 = self.poles.iter().map(|p| s - p).product();
        self.gain * num / den
    }

    pub fn freq(&self, omega: f64) -> Complex64 {
        self.eval(Complex64::new(0.0, omega))
    }
}

/// Oustaloup's approximation of `s^ν` over `[wb, wh]` with `2N+1`
/// zero/pole pairs
///
/// ```text
/// ω'_k = wb (wh/wb)^{(k+N+(1-ν)/2)/(2N+1)},  ω_k = wb (wh/wb)^{(k+N+(1+ν)/2)/(2N+1)}
/// ```
///
/// for `k = -N..=N`; the gain is set so that `|H(jω_c)| = ω_c^ν` at the
/// geometric band centre `ω_c = √(wb wh)`.
pub fn oustaloup(nu: f64, wb: f64, wh: f64, n: usize) -> Result<RationalTF, OracleError> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(OracleError::Domain(format!("order must lie in (0, 1), got {nu}")));
    }
    if !(wb > 0.0 && wb < wh && wh.is_finite()) {
        return Err(OracleError::Domain(format!("need 0 < wb < wh, got [{wb}, {wh}]")));
    }
    if n == 0 {
        return Err(OracleError::Domain("N must be at least 1".into()));
    }
    let ratio = wh / wb;
    let m = (2 * n + 1) as f64;
    let mut zeros = Vec::with_capacity(2 * n + 1);
    let mut poles = Vec::with_capacity(2 * n + 1);
    for k in 0..=2 * n {
        let k = k as f64; // k + N
        zeros.push(-wb * ratio.powf((k + 0.5 * (1.0 - nu)) / m));
        poles.push(-wb * ratio.powf((k + 0.5 * (1.0 + nu)) / m));
    }
    let unit = RationalTF::new(zeros, poles, 1.0)?;
    let wc = (wb * wh).sqrt();
    let gain = wc.powf(nu) / unit.freq(wc).norm();
    RationalTF::new(unit.zeros, unit.poles, gain)
}

/// Closed loop `1 / (1 + H(s))`, the approximation of `1/(1 + s^ν)`.
pub fn feedback_response(h: &RationalTF, omega: f64) -> Complex64 {
    1.0 / (1.0 + h.freq(omega))
}

/// Exact `F(jω) = 1 / (1 + (jω)^{1/2})` on the principal branch.
pub fn freq_exact(omega: f64) -> Result<Complex64, OracleError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(OracleError::Domain(format!("frequency must be positive, got {omega}")));
    }
    let root = Complex64::from_polar(omega.sqrt(), std::f64::consts::FRAC_PI_4);
    Ok(1.0 / (1.0 + root))
}

/// `ż = A z + b u`, `y = cᵀ z + d u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSpace {
    /// Row-major `n × n`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: f64) -> Result<Self, OracleError> {
        let n = b.len();
        if a.len() != n * n || c.len() != n {
            return Err(OracleError::Domain(format!(
                "non-conformable realization: {} matrix entries, {} inputs, {} outputs",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }
}

/// The printed 11th-order realization of the `1/(1 + s^{1/2})` approximation.
pub fn load_printed_ss() -> StateSpace {
    const FIRST_ROW: [f64; 11] =
        [-559.71, -277.1, -76.197, -24.835, -9.9316, -2.4829, -0.77609, -0.29764, -0.067652, -0.017081, -0.0039062];
    const SUBDIAGONAL: [f64; 10] = [256.0, 128.0, 32.0, 8.0, 4.0, 1.0, 0.25, 0.125, 0.03125, 0.0078125];
    const C: [f64; 11] =
        [1.7692, 2.3998, 1.3484, 0.77563, 0.48601, 0.16983, 0.066826, 0.029657, 0.0073522, 0.0019502, 0.00045835];
    let n = 11;
    let mut a = vec![0.0; n * n];
    a[..n].copy_from_slice(&FIRST_ROW);
    for (i, &v) in SUBDIAGONAL.iter().enumerate() {
        a[(i + 1) * n + i] = v;
    }
    let mut b = vec![0.0; n];
    b[0] = 8.0;
    StateSpace::new(a, b, C.to_vec(), 0.030653).expect("conformable literal realization")
}

/// `cᵀ (jωI - A)⁻¹ b + d` by Gaussian elimination with partial pivoting.
pub fn freq_ss(ss: &StateSpace, omega: f64) -> Result<Complex64, OracleError> {
    let n = ss.dim();
    let jw = Complex64::new(0.0, omega);
    let mut m: Vec<Complex64> = (0..n * n)
        .map(|k| {
            let diag = if k / n == k % n { jw } else { Complex64::new(0.0, 0.0) };
            diag - ss.a[k]
        })
        .collect();
    let mut x: Vec<Complex64> = ss.b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for col in 0..n {
        let piv =
            (col..n).max_by(|&i, &j| m[i * n + col].norm().total_cmp(&m[j * n + col].norm())).expect("non-empty range");
        if m[piv * n + col].norm() <= 1e-14 * scale {
            return Err(OracleError::SingularAtFrequency { omega });
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            x.swap(piv, col);
        }
        let p = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = m[col * n + k];
                m[r * n + k] -= f * v;
            }
            let v = x[col];
            x[r] -= f * v;
        }
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for k in r + 1..n {
            acc -= m[r * n + k] * x[k];
        }
        x[r] = acc / m[r * n + r];
    }
    Ok(ss.c.iter().zip(&x).map(|(c, v)| c * v).sum::<Complex64>() + ss.d)
}

/// `n` logarithmically spaced frequencies over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    i if i == n - 1 => hi,
                    i => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
                })
                .collect()
        }
    }
}

pub fn mag_db(v: Complex64) -> f64 {
    20.0 * v.norm().log10()
}

pub fn phase_deg(v: Complex64) -> f64 {
    v.arg().to_degrees()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub omega: f64,
    pub exact: Complex64,
    pub approx: Complex64,
}

impl SweepRow {
    pub fn mag_error_db(&self) -> f64 {
        (mag_db(self.approx) - mag_db(self.exact)).abs()
    }

    pub fn phase_error_deg(&self) -> f64 {
        (phase_deg(self.approx) - phase_deg(self.exact)).abs()
    }
}

/// Exact response against an approximation at every frequency.
pub fn sweep<F>(omegas: &[f64], approx: F) -> Result<Vec<SweepRow>, OracleError>
where
    F: Fn(f64) -> Result<Complex64, OracleError>,
{
    omegas.iter().map(|&omega| Ok(SweepRow { omega, exact: freq_exact(omega)?, approx: approx(omega)? })).collect()
}

/// Largest magnitude (dB) and phase (degrees) deviation of a sweep.
pub fn max_deviation(rows: &[SweepRow]) -> (f64, f64) {
    rows.iter().fold((0.0, 0.0), |(m, p), r| (f64::max(m, r.mag_error_db()), f64::max(p, r.phase_error_deg())))
}

pub const SWEEP_HEADER: &str =
    "omega,re_exact,im_exact,re_approx,im_approx,mag_db_exact,mag_db_approx,phase_deg_exact,phase_deg_approx";

pub fn write_sweep_csv<W: io::Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    let mut line = String::new();
    for r in rows {
        line.clear();
        let _ = write!(
            line,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.omega,
            r.exact.re,
            r.exact.im,
            r.approx.re,
            r.approx.im,
            mag_db(r.exact),
            mag_db(r.approx),
            phase_deg(r.exact),
            phase_deg(r.approx)
        );
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_follow_the_pair_count() {
        assert_eq!(oustaloup(0.5, 0.01, 100.0, 2).unwrap().order(), 5);
        assert_eq!(oustaloup(0.5, 0.01, 100.0, 5).unwrap().order(), 11);
    }

    #[test]
    fn band_centre_is_normalized() {
        let h = oustaloup(0.5, 1e-2, 1e2, 5).unwrap();
        assert!((h.freq(1.0).norm() - 1.0).abs() < 1e-6);
        let h = oustaloup(0.3, 1e-1, 1e3, 4).unwrap();
        let wc = 1e2f64.sqrt();
        assert!((h.freq(wc).norm() - wc.powf(0.3)).abs() < 1e-6 * wc.powf(0.3));
    }

    #[test]
    fn mid_band_slope_matches_the_order() {
        let h = oustaloup(0.5, 1e-2, 1e2, 5).unwrap();
        let slope = mag_db(h.freq(10f64.sqrt())) - mag_db(h.freq(1.0 / 10f64.sqrt()));
        assert!((slope - 10.0).abs() < 0.5, "{slope}");
    }

    #[test]
    fn exact_response_limits() {
        let lo = freq_exact(1e-10).unwrap();
        assert!((lo.norm() - 1.0).abs() < 1e-4 && lo.arg().abs() < 1e-4);
        let hi = freq_exact(1e12).unwrap();
        assert!((hi.arg() + std::f64::consts::FRAC_PI_4).abs() < 1e-5);
        assert!(freq_exact(0.0).is_err());
    }

    #[test]
    fn exact_response_at_unit_frequency() {
        // 1/(1 + e^{iπ/4}) = 1/2 - i(√2 - 1)/2
        let v = freq_exact(1.0).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15);
        assert!((v.im + 0.207_106_781_186_547_52).abs() < 1e-15);
    }

    #[test]
    fn first_order_realization() {
        let ss = StateSpace::new(vec![-2.0], vec![1.0], vec![3.0], 0.5).unwrap();
        let v = freq_ss(&ss, 2.0).unwrap();
        let expected = 3.0 / Complex64::new(2.0, 2.0) + 0.5;
        assert!((v - expected).norm() < 1e-15);
    }

    #[test]
    fn printed_realization_is_proper() {
        let ss = load_printed_ss();
        assert_eq!(ss.dim(), 11);
        assert_eq!(ss.d, 0.030653);
        let v = freq_ss(&ss, 1e6).unwrap();
        assert!(v.norm().is_finite() && (v - ss.d).norm() < 1e-3);
    }

    #[test]
    fn grid_hits_both_ends() {
        let g = log_grid(0.01, 100.0, 5);
        assert_eq!(g.first(), Some(&0.01));
        assert_eq!(g.last(), Some(&100.0));
        assert!((g[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cancelling_pairs_are_rejected() {
        assert!(RationalTF::new(vec![-1.0], vec![-1.0], 1.0).is_err());
    }
}
