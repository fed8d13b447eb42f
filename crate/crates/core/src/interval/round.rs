//! Directed rounding on top of round-to-nearest hardware arithmetic.
//!
//! Every basic operation is evaluated once in round-to-nearest. An
//! error-free transformation (TwoSum, or an FMA residual for products,
//! quotients and square roots) then tells us on which side of the exact
//! result the rounded value fell, and we step one ulp outward only when
//! needed. Exact results therefore stay exact, and no floating-point
//! environment state is touched, so the policy is thread-agnostic.
//!
//! Library transcendental functions (`exp`, `ln`, `powf`) have no residual
//! available; their results are assumed faithful to within one ulp and are
//! widened by [`LIBM_ULPS`] ulps in each direction.

/// Outward widening applied to results of libm transcendental calls.
pub const LIBM_ULPS: u32 = 2;

#[inline]
pub fn next_up(x: f64) -> f64 {
    x.next_up()
}

#[inline]
pub fn next_down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn resolve_down(r: f64, err: f64) -> f64 {
    if !r.is_finite() {
        return r;
    }
    if err < 0.0 {
        next_down(r)
    } else {
        r
    }
}

#[inline]
fn resolve_up(r: f64, err: f64) -> f64 {
    if !r.is_finite() {
        return r;
    }
    if err > 0.0 {
        next_up(r)
    } else {
        r
    }
}

// Residual-based products are exact only away from the underflow range;
// below it we widen unconditionally.
const TINY: f64 = 1e-290;

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    resolve_down(s, two_sum_err(a, b, s))
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    resolve_up(s, two_sum_err(a, b, s))
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p != 0.0 && p.abs() < TINY {
        return next_down(p);
    }
    if p == 0.0 && a != 0.0 && b != 0.0 {
        // underflowed to zero
        return if (a < 0.0) != (b < 0.0) { -f64::MIN_POSITIVE } else { 0.0 };
    }
    resolve_down(p, a.mul_add(b, -p))
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p != 0.0 && p.abs() < TINY {
        return next_up(p);
    }
    if p == 0.0 && a != 0.0 && b != 0.0 {
        return if (a < 0.0) != (b < 0.0) { 0.0 } else { f64::MIN_POSITIVE };
    }
    resolve_up(p, a.mul_add(b, -p))
}

/// Sign of `a/b - q` obtained from the exact residual `a - q*b`.
#[inline]
fn div_err(a: f64, b: f64, q: f64) -> f64 {
    let r = (-q).mul_add(b, a);
    if b < 0.0 {
        -r
    } else {
        r
    }
}

#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q != 0.0 && q.abs() < TINY {
        return next_down(q);
    }
    if q == 0.0 && a != 0.0 {
        return if (a < 0.0) != (b < 0.0) { -f64::MIN_POSITIVE } else { 0.0 };
    }
    resolve_down(q, div_err(a, b, q))
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if q != 0.0 && q.abs() < TINY {
        return next_up(q);
    }
    if q == 0.0 && a != 0.0 {
        return if (a < 0.0) != (b < 0.0) { 0.0 } else { f64::MIN_POSITIVE };
    }
    resolve_up(q, div_err(a, b, q))
}

#[inline]
pub fn sqrt_down(a: f64) -> f64 {
    let s = a.sqrt();
    if a < TINY {
        return next_down(s).max(0.0);
    }
    resolve_down(s, (-s).mul_add(s, a))
}

#[inline]
pub fn sqrt_up(a: f64) -> f64 {
    let s = a.sqrt();
    if a < TINY {
        return next_up(s);
    }
    resolve_up(s, (-s).mul_add(s, a))
}

/// Steps `n` ulps toward minus infinity.
#[inline]
pub fn widen_down(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = next_down(x);
    }
    x
}

/// Steps `n` ulps toward plus infinity.
#[inline]
pub fn widen_up(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = next_up(x);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sums_are_not_widened() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(2.0, 4.0), 6.0);
        assert_eq!(mul_down(-3.0, 2.0), -6.0);
        assert_eq!(div_up(1.0, 4.0), 0.25);
        assert_eq!(sqrt_down(4.0), 2.0);
        assert_eq!(sqrt_up(4.0), 2.0);
    }

    #[test]
    fn inexact_sums_bracket_the_exact_value() {
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert!(lo < hi);
        assert_eq!(next_up(lo), hi);
    }

    #[test]
    fn division_direction_tracks_divisor_sign() {
        let lo = div_down(1.0, -3.0);
        let hi = div_up(1.0, -3.0);
        assert!(lo < hi);
        assert!(lo * 3.0 <= -1.0 + 1e-15);
    }
}
