//! Closed real intervals with outward-rounded endpoints.
//!
//! Rounding policy: see [`round`]. All constructors reject NaN endpoints and
//! inverted bounds; the public constructors also reject infinite endpoints.

mod array;
pub mod round;

pub use array::{IntervalMatrix, IntervalVector};

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use round::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval [{lo}, {hi}]")]
    Invalid { lo: f64, hi: f64 },
    #[error("division by an interval containing zero: {0}")]
    DivisionByZeroInterval(Interval),
    #[error("empty intersection of {0} and {1}")]
    EmptyIntersection(Interval, Interval),
    #[error("negative inflation radius {0}")]
    NegativeInflation(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Builds `[lo, hi]`; both endpoints must be finite with `lo <= hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(IntervalError::Invalid { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    ///
    /// # Panics
    /// If `x` is not finite.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "point interval needs a finite value, got {x}");
        Self { lo: x, hi: x }
    }

    /// `[mid - rad, mid + rad]`, outward rounded.
    pub fn mid_rad(mid: f64, rad: f64) -> Result<Self, IntervalError> {
        if rad < 0.0 {
            return Err(IntervalError::NegativeInflation(rad));
        }
        Self::new(sub_down(mid, rad), add_up(mid, rad))
    }

    /// Unchecked constructor for internal use where the endpoints are known
    /// to be ordered. Infinite endpoints are tolerated here (special function
    /// tails); NaN is not.
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(!lo.is_nan() && !hi.is_nan(), "NaN endpoint");
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self` lies in the interior of `other`.
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    /// Midpoint rounded to nearest.
    pub fn midpoint(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Upper bound on the radius.
    pub fn radius(&self) -> f64 {
        let m = self.midpoint();
        sub_up(self.hi, m).max(sub_up(m, self.lo))
    }

    /// Magnitude `max |x|`.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Mignitude `min |x|`.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn intersect(&self, other: &Interval) -> Result<Interval, IntervalError> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            return Err(IntervalError::EmptyIntersection(*self, *other));
        }
        Ok(Self::raw(lo, hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Self::raw(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// `[lo - mu, hi + mu]`.
    pub fn inflate_sym(&self, mu: f64) -> Result<Interval, IntervalError> {
        if !(mu >= 0.0) {
            return Err(IntervalError::NegativeInflation(mu));
        }
        if mu == 0.0 {
            return Ok(*self);
        }
        Ok(Self::raw(sub_down(self.lo, mu), add_up(self.hi, mu)))
    }

    /// Relative-plus-absolute epsilon inflation used to seed verification
    /// iterations: `[lo - d, hi + d]` with `d = rel * mag + abs`.
    pub fn eps_inflate(&self, rel: f64, abs: f64) -> Interval {
        let d = add_up(mul_up(rel, self.mag()), abs);
        Self::raw(sub_down(self.lo, d), add_up(self.hi, d))
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Self::raw(0.0, self.mag())
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.abs();
        Self::raw(mul_down(a.lo, a.lo), mul_up(a.hi, a.hi))
    }

    /// Integer power with the even-power rule.
    pub fn powi(&self, n: u32) -> Interval {
        match n {
            0 => Interval::ONE,
            1 => *self,
            _ if n % 2 == 0 => {
                let a = self.abs();
                Self::raw(pow_down_nonneg(a.lo, n), pow_up_nonneg(a.hi, n))
            }
            _ => {
                // odd powers are monotone
                let lo = if self.lo >= 0.0 { pow_down_nonneg(self.lo, n) } else { -pow_up_nonneg(-self.lo, n) };
                let hi = if self.hi >= 0.0 { pow_up_nonneg(self.hi, n) } else { -pow_down_nonneg(-self.hi, n) };
                Self::raw(lo, hi)
            }
        }
    }

    pub fn recip(&self) -> Result<Interval, IntervalError> {
        Interval::ONE / *self
    }

    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain(format!("sqrt of {self}")));
        }
        Ok(Self::raw(sqrt_down(self.lo), sqrt_up(self.hi)))
    }

    pub fn exp(&self) -> Interval {
        Self::raw(exp_down(self.lo), exp_up(self.hi))
    }

    pub fn ln(&self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::Domain(format!("ln of {self}")));
        }
        Ok(Self::raw(ln_down(self.lo), ln_up(self.hi)))
    }

    /// Real power `t^nu` for `t >= 0` and exponent `nu ⊂ (0, 1]`.
    ///
    /// `x^y` is increasing in `x`; in `y` it decreases for `x < 1` and
    /// increases for `x > 1`, so the extremes sit at corners.
    pub fn pow_real(&self, nu: &Interval) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::Domain(format!("pow_real needs a non-negative base, got {self}")));
        }
        if !(nu.lo > 0.0 && nu.hi <= 1.0) {
            return Err(IntervalError::Domain(format!("pow_real exponent must lie in (0, 1], got {nu}")));
        }
        let lo = {
            let y = if self.lo >= 1.0 { nu.lo } else { nu.hi };
            powf_down(self.lo, y)
        };
        let hi = {
            let y = if self.hi >= 1.0 { nu.hi } else { nu.lo };
            powf_up(self.hi, y)
        };
        Ok(Self::raw(lo, hi))
    }

    /// `t^(-nu)` for `t > 0`, `nu ⊂ (0, 1]`.
    pub fn pow_neg_real(&self, nu: &Interval) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::Domain(format!("negative real power needs a positive base, got {self}")));
        }
        self.pow_real(nu)?.recip()
    }

    pub fn scale(&self, k: f64) -> Interval {
        *self * Interval::point(k)
    }
}

fn pow_down_nonneg(x: f64, n: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r = mul_down(r, x);
    }
    r
}

fn pow_up_nonneg(x: f64, n: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r = mul_up(r, x);
    }
    r
}

pub(crate) fn exp_down(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == 0.0 {
        return 1.0;
    }
    widen_down(x.exp(), LIBM_ULPS).max(0.0)
}

pub(crate) fn exp_up(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let e = x.exp();
    if e == 0.0 {
        return f64::MIN_POSITIVE;
    }
    widen_up(e, LIBM_ULPS)
}

pub(crate) fn ln_down(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    widen_down(x.ln(), LIBM_ULPS)
}

pub(crate) fn ln_up(x: f64) -> f64 {
    if x == 1.0 {
        return 0.0;
    }
    widen_up(x.ln(), LIBM_ULPS)
}

fn powf_down(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 || y == 1.0 {
        return x;
    }
    widen_down(x.powf(y), LIBM_ULPS).max(0.0)
}

fn powf_up(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 || y == 1.0 {
        return x;
    }
    widen_up(x.powf(y), LIBM_ULPS)
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::raw(add_down(self.lo, rhs.lo), add_up(self.hi, rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::raw(sub_down(self.lo, rhs.hi), sub_up(self.hi, rhs.lo))
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        if a >= 0.0 && c >= 0.0 {
            return Interval::raw(mul_down(a, c), mul_up(b, d));
        }
        let lo = mul_down(a, c).min(mul_down(a, d)).min(mul_down(b, c)).min(mul_down(b, d));
        let hi = mul_up(a, c).max(mul_up(a, d)).max(mul_up(b, c)).max(mul_up(b, d));
        Interval::raw(lo, hi)
    }
}

impl Div for Interval {
    type Output = Result<Interval, IntervalError>;
    fn div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval(rhs));
        }
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let lo = div_down(a, c).min(div_down(a, d)).min(div_down(b, c)).min(div_down(b, d));
        let hi = div_up(a, c).max(div_up(a, d)).max(div_up(b, c)).max(div_up(b, d));
        Ok(Interval::raw(lo, hi))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::raw(-self.hi, -self.lo)
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}
