//! Rigorous enclosures of Γ and ln Γ for positive real arguments.
//!
//! Certification: for `y >= STIRLING_MIN` the Stirling series
//!
//! ```text
//! ln Γ(y) = (y - 1/2) ln y - y + ln(2π)/2 + Σ_{k=1}^{K} B_{2k} / (2k (2k-1) y^{2k-1}) + R_K(y)
//! ```
//!
//! is used with `K = 8`. For real `y > 0` the remainder is bounded by the
//! first omitted term, `|R_K(y)| <= |B_{2K+2}| / ((2K+2)(2K+1) y^{2K+1})`,
//! which is below 2e-18 at `y = 10`. Smaller arguments are lifted with
//! `Γ(x) = Γ(x+k) / (x (x+1) … (x+k-1))`. Positive integers up to 171 use
//! the factorial directly.

use super::SpecFunError;
use crate::interval::round::{div_up, next_down, next_up};
use crate::interval::Interval;

const STIRLING_MIN: f64 = 10.0;

/// Numerators and denominators of B_{2k} / (2k (2k-1)), k = 1..=8.
const STIRLING_COEFFS: [(f64, f64); 8] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360360.0),
    (1.0, 156.0),
    (-3617.0, 122400.0),
];

/// |B_18| / (18 * 17) = (43867/798) / 306.
const STIRLING_REMAINDER: (f64, f64) = (43867.0, 244188.0);

/// ln(2π)/2 = 0.91893853320467274178032973640561763986...
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// Bracket of the positive minimizer of Γ, x* = 1.461632144968362341262659542...
const GAMMA_ARGMIN: (f64, f64) = (1.461_632_144_968_362, 1.461_632_144_968_363);

/// Lower bound of min Γ = Γ(x*) = 0.885603194410888700278815900582...
const GAMMA_MIN_LOWER: f64 = 0.885_603_194_410_888;

fn half_ln_2pi() -> Interval {
    Interval::raw(next_down(HALF_LN_2PI), next_up(HALF_LN_2PI))
}

fn ratio(num: f64, den: f64) -> Interval {
    (Interval::point(num) / Interval::point(den)).expect("nonzero constant denominator")
}

/// ln Γ(y) for a point `y >= STIRLING_MIN`.
fn ln_gamma_stirling(y: f64) -> Interval {
    debug_assert!(y >= STIRLING_MIN);
    let yi = Interval::point(y);
    let ln_y = yi.ln().expect("positive argument");
    let mut acc = (yi - Interval::point(0.5)) * ln_y - yi + half_ln_2pi();
    let inv = yi.recip().expect("positive argument");
    let inv2 = inv.sqr();
    let mut pow = inv;
    for &(n, d) in &STIRLING_COEFFS {
        acc = acc + ratio(n, d) * pow;
        pow = pow * inv2;
    }
    let rem = (ratio(STIRLING_REMAINDER.0, STIRLING_REMAINDER.1) * pow).hi();
    acc.inflate_sym(rem).expect("non-negative remainder")
}

/// `(x, k)` such that `x + k >= STIRLING_MIN`, with the lifted point
/// argument enclosed as an interval since `x + k` may round.
fn lift(x: f64) -> (Interval, u32) {
    let mut k = if x >= STIRLING_MIN { 0 } else { (STIRLING_MIN - x).ceil() as u32 };
    loop {
        let y = Interval::point(x) + Interval::point(k as f64);
        // `x + k` can round below the threshold when `x` is tiny
        if y.lo() >= STIRLING_MIN {
            return (y, k);
        }
        k += 1;
    }
}

/// Product x (x+1) … (x+k-1) as an interval.
fn rising(x: f64, k: u32) -> Interval {
    (0..k).fold(Interval::ONE, |acc, j| acc * (Interval::point(x) + Interval::point(j as f64)))
}

fn as_small_integer(x: f64) -> Option<u32> {
    (x.fract() == 0.0 && (1.0..=171.0).contains(&x)).then_some(x as u32)
}

fn factorial(n: u32) -> Interval {
    (2..=n).fold(Interval::ONE, |acc, j| acc * Interval::point(j as f64))
}

/// Enclosure of ln Γ over the lifted interval argument `y >= 10`, where
/// ln Γ is increasing.
fn ln_gamma_lifted(y: Interval) -> Interval {
    let lo = ln_gamma_stirling(y.lo());
    let hi = if y.is_point() { lo } else { ln_gamma_stirling(y.hi()) };
    Interval::raw(lo.lo(), hi.hi())
}

/// Rigorous ln Γ at a point `x > 0`.
pub fn ln_gamma_point(x: f64) -> Result<Interval, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain(format!("ln Γ needs x > 0, got {x}")));
    }
    if let Some(n) = as_small_integer(x) {
        if n <= 2 {
            return Ok(Interval::ZERO);
        }
        return Ok(factorial(n - 1).ln().expect("positive factorial"));
    }
    let (y, k) = lift(x);
    let lg = ln_gamma_lifted(y);
    if k == 0 {
        return Ok(lg);
    }
    Ok(lg - rising(x, k).ln().expect("positive product"))
}

/// Rigorous Γ at a point `x > 0`. Overflow yields an infinite upper bound.
pub fn gamma_point(x: f64) -> Result<Interval, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain(format!("Γ needs x > 0, got {x}")));
    }
    if let Some(n) = as_small_integer(x) {
        return Ok(factorial(n - 1));
    }
    let (y, k) = lift(x);
    let g = ln_gamma_lifted(y).exp();
    if k == 0 {
        return Ok(g);
    }
    Ok((g / rising(x, k)).expect("positive product"))
}

/// Combines point enclosures at the endpoints using the unimodal shape of
/// Γ on (0, ∞): decreasing up to x*, increasing afterwards.
fn unimodal<F>(x: &Interval, point: F, min_lower: f64) -> Result<Interval, SpecFunError>
where
    F: Fn(f64) -> Result<Interval, SpecFunError>,
{
    if x.lo() <= 0.0 {
        return Err(SpecFunError::Domain(format!("Γ needs x.lo > 0, got {x}")));
    }
    let a = point(x.lo())?;
    if x.is_point() {
        return Ok(a);
    }
    let b = point(x.hi())?;
    if x.hi() <= GAMMA_ARGMIN.0 {
        Ok(Interval::raw(b.lo(), a.hi()))
    } else if x.lo() >= GAMMA_ARGMIN.1 {
        Ok(Interval::raw(a.lo(), b.hi()))
    } else {
        let lo = min_lower.min(a.lo()).min(b.lo());
        Ok(Interval::raw(lo, a.hi().max(b.hi())))
    }
}

/// Enclosure of `{Γ(t) : t ∈ x}` for `x.lo > 0`.
pub fn gamma_enclosure(x: &Interval) -> Result<Interval, SpecFunError> {
    unimodal(x, gamma_point, GAMMA_MIN_LOWER)
}

/// Enclosure of `{ln Γ(t) : t ∈ x}` for `x.lo > 0`.
pub fn ln_gamma_enclosure(x: &Interval) -> Result<Interval, SpecFunError> {
    // ln of the certified lower bound of min Γ, rounded down
    let min_lower = next_down(GAMMA_MIN_LOWER.ln());
    unimodal(x, ln_gamma_point, next_down(min_lower))
}

/// B_{2k} / (2k), k = 1..=7, for the asymptotic digamma series.
const DIGAMMA_COEFFS: [(f64, f64); 7] =
    [(1.0, 12.0), (-1.0, 120.0), (1.0, 252.0), (-1.0, 240.0), (1.0, 132.0), (-691.0, 32760.0), (1.0, 12.0)];

/// |B_16| / 16.
const DIGAMMA_REMAINDER: (f64, f64) = (3617.0, 8160.0);

/// ψ(y) = ln y - 1/(2y) - Σ B_{2k} / (2k y^{2k}) + R for a point `y >= 10`,
/// with `|R|` below the first omitted term.
fn digamma_asymptotic(y: Interval) -> Interval {
    let ln_y = y.ln().expect("positive argument");
    let inv = y.recip().expect("positive argument");
    let inv2 = inv.sqr();
    let mut acc = ln_y - Interval::point(0.5) * inv;
    let mut pow = inv2;
    for &(n, d) in &DIGAMMA_COEFFS {
        acc = acc - ratio(n, d) * pow;
        pow = pow * inv2;
    }
    let rem = (ratio(DIGAMMA_REMAINDER.0, DIGAMMA_REMAINDER.1) * pow).hi();
    acc.inflate_sym(rem).expect("non-negative remainder")
}

/// Rigorous digamma `ψ = Γ'/Γ` at a point `x > 0`, lifted by
/// `ψ(x) = ψ(x+k) - Σ_{j<k} 1/(x+j)`.
pub fn digamma_point(x: f64) -> Result<Interval, SpecFunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain(format!("ψ needs x > 0, got {x}")));
    }
    let (y, k) = lift(x);
    let shift = (0..k).fold(Interval::ZERO, |acc, j| {
        acc + (Interval::point(x) + Interval::point(j as f64)).recip().expect("positive")
    });
    let lo = digamma_asymptotic(Interval::point(y.lo())).lo();
    let hi = digamma_asymptotic(Interval::point(y.hi())).hi();
    Ok(Interval::raw(lo, hi) - shift)
}

/// Enclosure of `{ψ(t) : t ∈ x}` for `x.lo > 0`; ψ is increasing.
pub fn digamma_enclosure(x: &Interval) -> Result<Interval, SpecFunError> {
    let a = digamma_point(x.lo())?;
    if x.is_point() {
        return Ok(a);
    }
    Ok(Interval::raw(a.lo(), digamma_point(x.hi())?.hi()))
}

/// Upper bound of `1 / Γ(s)` over `s ∈ (0, s_max]` with `s_max <= 1`,
/// where `1/Γ` is increasing.
pub(crate) fn recip_gamma_upper_small(s_max: f64) -> Result<f64, SpecFunError> {
    if !(s_max > 0.0 && s_max <= 1.0) {
        return Err(SpecFunError::Domain(format!("expected s in (0, 1], got {s_max}")));
    }
    let g = gamma_point(s_max)?;
    Ok(div_up(1.0, g.lo()))
}
