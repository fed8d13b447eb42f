//! Extended-precision Mittag-Leffler series on fixed-point big integers.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::OracleError;
use crate::specfun::ln_gamma_point;

const MAX_ABS_Z: f64 = 50.0;
const MAX_DIGITS: u32 = 200;
const MAX_TERMS: usize = 400_000;
const MAX_BITS: u64 = 12_000;
/// Cap on the number of Stirling correction terms.
const MAX_STIRLING: usize = 400;

/// `E_{ν,β}(z) = Σ z^k / Γ(νk + β)` to `digits` significant decimal digits.
///
/// The sum runs in binary fixed point with enough fraction bits to absorb
/// the cancellation between the largest term and the result, and stops
/// once the remaining terms are below `10^{-digits-10}` relative to the
/// result. The output is plain decimal (scientific outside `1e-7..1e21`)
/// with trailing zeros removed.
pub fn ml_highprec(nu: f64, beta: f64, z: f64, digits: u32) -> Result<String, OracleError> {
    if !(nu > 0.0 && nu.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
        return Err(OracleError::Domain(format!("need ν > 0 and β > 0, got ν = {nu}, β = {beta}")));
    }
    if !(z.abs() <= MAX_ABS_Z) {
        return Err(OracleError::Domain(format!("|z| must not exceed {MAX_ABS_Z}, got {z}")));
    }
    if digits == 0 || digits > MAX_DIGITS {
        return Err(OracleError::Domain(format!("digits must lie in 1..={MAX_DIGITS}, got {digits}")));
    }
    let mut extra = 0i64;
    loop {
        let v = sum_series(nu, beta, z, i64::from(digits) + 10 + extra)?;
        let (text, e10) = v.to_decimal(digits);
        // small results need more absolute precision for the same digits
        if e10 < 0 && -e10 > extra {
            extra = -e10 + 2;
            continue;
        }
        return Ok(text);
    }
}

/// [`ml_highprec`] rounded to the nearest double.
pub fn ml_highprec_f64(nu: f64, beta: f64, z: f64) -> Result<f64, OracleError> {
    let s = ml_highprec(nu, beta, z, 30)?;
    s.parse().map_err(|_| OracleError::Domain(format!("unparsable oracle output {s}")))
}

/// `Γ(x)` for `0 < x ≤ 170` to `digits` significant decimal digits.
pub fn gamma_highprec(x: f64, digits: u32) -> Result<String, OracleError> {
    if !(x > 0.0 && x <= 170.0) {
        return Err(OracleError::Domain(format!("argument must lie in (0, 170], got {x}")));
    }
    if digits == 0 || digits > MAX_DIGITS {
        return Err(OracleError::Domain(format!("digits must lie in 1..={MAX_DIGITS}, got {digits}")));
    }
    // relative accuracy of exp(lnΓ) is the absolute accuracy of lnΓ
    let bits = ((f64::from(digits) + 10.0) * std::f64::consts::LOG2_10) as u64 + 64;
    let ctx = Ctx::new(bits);
    let lg = ctx.ln_gamma(ctx.fixed_of(x), x);
    Ok(Fixed { v: ctx.exp(&lg), prec: bits }.to_decimal(digits).0)
}

struct Fixed {
    v: BigInt,
    prec: u64,
}

impl Fixed {
    fn to_decimal(&self, digits: u32) -> (String, i64) {
        if self.v.is_zero() {
            return ("0".into(), 0);
        }
        let neg = self.v.is_negative();
        let mag = self.v.abs();
        let scale = BigInt::one() << self.prec;
        let mut e10 = ((mag.bits() as f64 - 1.0 - self.prec as f64) * std::f64::consts::LOG10_2).floor() as i64;
        let lower = BigInt::from(10u32).pow(digits - 1);
        let upper = &lower * 10u32;
        let scaled = loop {
            let shift = i64::from(digits) - 1 - e10;
            let (num, den) = if shift >= 0 {
                (&mag * BigInt::from(10u32).pow(shift as u32), scale.clone())
            } else {
                (mag.clone(), &scale * BigInt::from(10u32).pow((-shift) as u32))
            };
            let (q, r) = num.div_rem(&den);
            let twice = &r * 2u32;
            let q = if twice > den || (twice == den && q.is_odd()) { q + 1u32 } else { q };
            if q >= upper {
                e10 += 1;
            } else if q < lower {
                e10 -= 1;
            } else {
                break q;
            }
        };
        let s = scaled.to_string();
        let s = s.trim_end_matches('0');
        let sign = if neg { "-" } else { "" };
        let body = if (-7..21).contains(&e10) {
            if e10 >= 0 {
                let int_len = e10 as usize + 1;
                if s.len() <= int_len {
                    format!("{s}{}", "0".repeat(int_len - s.len()))
                } else {
                    format!("{}.{}", &s[..int_len], &s[int_len..])
                }
            } else {
                format!("0.{}{s}", "0".repeat((-e10 - 1) as usize))
            }
        } else if s.len() == 1 {
            format!("{s}e{e10}")
        } else {
            format!("{}.{}e{e10}", &s[..1], &s[1..])
        };
        (format!("{sign}{body}"), e10)
    }
}

/// Fixed-point arithmetic with `prec` fraction bits.
struct Ctx {
    prec: u64,
    one: BigInt,
    ln2: BigInt,
    half_ln_2pi: BigInt,
    /// `B_{2k} / (2k (2k-1))`, `k = 1..=K`.
    stirling: Vec<BigInt>,
    /// Arguments below this are lifted before Stirling's series.
    lift_to: f64,
}

impl Ctx {
    fn new(prec: u64) -> Self {
        let one = BigInt::one() << prec;
        let ln2 = atanh_recip(&one, 3) * 2u32;
        let pi = atan_recip(&one, 5) * 16u32 - atan_recip(&one, 239) * 4u32;
        let mut c = Self { prec, one, ln2, half_ln_2pi: BigInt::zero(), stirling: Vec::new(), lift_to: 0.0 };
        c.half_ln_2pi = (&c.ln2 + c.ln(&pi)) >> 1u32;
        let (k, x) = stirling_plan(prec);
        c.lift_to = x;
        c.stirling = tangent_numbers(k)
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let k = (i + 1) as u32;
                // B_{2k}/(2k(2k-1)) = (-1)^{k-1} T_k / ((2k-1) 4^k (4^k - 1))
                let four_k = BigInt::one() << (2 * k);
                let den = BigInt::from(2 * k - 1) * &four_k * (&four_k - 1u32);
                let v = (t << prec) / den;
                if k % 2 == 1 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        c
    }

    fn fixed_of(&self, x: f64) -> BigInt {
        let (m, e, s) = num_traits::float::FloatCore::integer_decode(x);
        let m = BigInt::from(m) * BigInt::from(s);
        let shift = e as i64 + self.prec as i64;
        if shift >= 0 {
            m << shift as u64
        } else {
            m >> (-shift) as u64
        }
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.prec
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.prec) / b
    }

    fn exp(&self, x: &BigInt) -> BigInt {
        const HALVINGS: u64 = 16;
        let n = x.div_floor(&self.ln2);
        let r = (x - &n * &self.ln2) >> HALVINGS;
        let mut sum = self.one.clone();
        let mut term = self.one.clone();
        let mut k = 1u32;
        loop {
            term = self.mul(&term, &r) / k;
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 1;
        }
        for _ in 0..HALVINGS {
            sum = self.mul(&sum, &sum);
        }
        let n = n.to_i64().expect("exponent fits");
        if n >= 0 {
            sum << n as u64
        } else {
            sum >> (-n) as u64
        }
    }

    /// Natural logarithm of a positive fixed-point value.
    fn ln(&self, x: &BigInt) -> BigInt {
        debug_assert!(x.sign() == Sign::Plus);
        let e = x.bits() as i64 - 1 - self.prec as i64;
        let m = if e >= 0 { x >> e as u64 } else { x << (-e) as u64 };
        let u = self.div(&(&m - &self.one), &(&m + &self.one));
        let u2 = self.mul(&u, &u);
        let mut sum = BigInt::zero();
        let mut pw = u;
        let mut k = 1u32;
        while !pw.is_zero() {
            sum += &pw / k;
            pw = self.mul(&pw, &u2);
            k += 2;
        }
        sum * 2u32 + &self.ln2 * e
    }

    /// `ln Γ(x)` for fixed-point `x > 0`; `xf` approximates `x`.
    fn ln_gamma(&self, x: BigInt, xf: f64) -> BigInt {
        let shift = if xf < self.lift_to { (self.lift_to - xf).ceil() as u64 } else { 0 };
        let mut prod = self.one.clone();
        let mut y = x;
        for _ in 0..shift {
            prod = self.mul(&prod, &y);
            y += &self.one;
        }
        let half = &self.one >> 1u32;
        let lny = self.ln(&y);
        let mut s = self.mul(&(&y - &half), &lny) - &y + &self.half_ln_2pi;
        // the coefficients grow factorially, so divide by the growing
        // power y^{2k-1} rather than multiply by a tiny fixed-point one
        let y2 = self.mul(&y, &y);
        let mut pw = y.clone();
        for c in &self.stirling {
            let t = self.div(c, &pw);
            if t.is_zero() {
                break;
            }
            s += t;
            pw = self.mul(&pw, &y2);
        }
        if shift > 0 {
            s -= self.ln(&prod);
        }
        s
    }
}

/// `Σ_{i≥0} 1/((2i+1) q^{2i+1})` scaled by `one`.
fn atanh_recip(one: &BigInt, q: u32) -> BigInt {
    series_recip(one, q, false)
}

fn atan_recip(one: &BigInt, q: u32) -> BigInt {
    series_recip(one, q, true)
}

fn series_recip(one: &BigInt, q: u32, alternate: bool) -> BigInt {
    let q2 = BigInt::from(q) * q;
    let mut pw = one / q;
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    let mut neg = false;
    while !pw.is_zero() {
        let t = &pw / k;
        if neg {
            sum -= t
        } else {
            sum += t
        }
        pw /= &q2;
        k += 2;
        neg = alternate && !neg;
    }
    sum
}

/// Tangent numbers `T_1..=T_n` (1, 2, 16, 272, ...).
fn tangent_numbers(n: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); n + 1];
    if n == 0 {
        return Vec::new();
    }
    t[1] = BigInt::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    t.remove(0);
    t
}

/// Number of Stirling terms and lift threshold so that the remainder
/// `|B_{2K+2}| / ((2K+2)(2K+1) y^{2K+1}) ≤ 2^{-prec}` for `y ≥ X`.
fn stirling_plan(prec: u64) -> (usize, f64) {
    let target = prec as f64 * std::f64::consts::LN_2;
    let mut best = (1, f64::INFINITY);
    let mut ln_fact = 0.0; // ln (2K+2)!
    for i in 1..=4 {
        ln_fact += f64::from(i).ln();
    }
    for k in 1..=MAX_STIRLING {
        // |B_{2K+2}| ≤ 4 (2K+2)! / (2π)^{2K+2}
        let m = (2 * k + 2) as f64;
        let ln_b = 4f64.ln() + ln_fact - m * (2.0 * std::f64::consts::PI).ln();
        let ln_x = (target + ln_b - m.ln() - (m - 1.0).ln()) / (m - 1.0);
        let x = ln_x.exp().max(2.0).ceil();
        if x + k as f64 * 2.0 < best.1 + best.0 as f64 * 2.0 {
            best = (k, x);
        }
        ln_fact += ((2 * k + 3) as f64).ln() + ((2 * k + 4) as f64).ln();
    }
    best
}

/// Plans the term count and fixed-point precision from double-precision
/// magnitudes, then sums.
fn sum_series(nu: f64, beta: f64, z: f64, decimals: i64) -> Result<Fixed, OracleError> {
    let lg = |x: f64| ln_gamma_point(x).map(|v| v.midpoint()).map_err(|e| OracleError::Domain(e.to_string()));
    let target = decimals as f64 * std::f64::consts::LN_10;
    let ln_abs_z = if z == 0.0 { f64::NEG_INFINITY } else { z.abs().ln() };
    let mut max_log = f64::NEG_INFINITY;
    let mut terms = 0usize;
    let mut prev = f64::INFINITY;
    loop {
        let x = nu * terms as f64 + beta;
        let lt = if terms == 0 { -lg(beta)? } else { terms as f64 * ln_abs_z - lg(x)? };
        max_log = max_log.max(lt);
        terms += 1;
        // without cancellation the result is at least the largest term
        let floor = if z > 0.0 { max_log.max(0.0) } else { 0.0 };
        // stop in the geometric tail: tail ≤ current term
        if lt < floor - target - 5.0 && lt - prev < -std::f64::consts::LN_2 {
            break;
        }
        if z == 0.0 {
            break;
        }
        if terms > MAX_TERMS {
            return Err(OracleError::BudgetExceeded(format!("more than {MAX_TERMS} series terms")));
        }
        prev = lt;
    }
    let cancellation = if z < 0.0 { max_log.max(0.0) / std::f64::consts::LN_2 } else { 0.0 };
    let bits = (decimals as f64 * std::f64::consts::LOG2_10 + cancellation + (terms as f64).log2()) as u64 + 64;
    if bits > MAX_BITS {
        return Err(OracleError::BudgetExceeded(format!("{bits} fraction bits needed")));
    }
    let ctx = Ctx::new(bits);
    let ln_z = (z != 0.0).then(|| ctx.ln(&ctx.fixed_of(z.abs())));
    let nu_fixed = ctx.fixed_of(nu);
    let beta_fixed = ctx.fixed_of(beta);
    let mut sum = BigInt::zero();
    for k in 0..terms {
        let x = &nu_fixed * k + &beta_fixed;
        let lg = ctx.ln_gamma(x, nu * k as f64 + beta);
        let log_mag = match &ln_z {
            None => -lg,
            Some(l) => l * k - lg,
        };
        let t = ctx.exp(&log_mag);
        if z < 0.0 && k % 2 == 1 {
            sum -= t
        } else {
            sum += t
        }
    }
    Ok(Fixed { v: sum, prec: ctx.prec })
}
