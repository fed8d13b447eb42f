//! Rigorous Mittag-Leffler enclosures for real arguments.
//!
//! `E_{ν,β}(z) = Σ_{i>=0} z^i / Γ(νi + β)` is summed in interval arithmetic
//! with an interval order `ν`, so uncertainty in the order is carried by the
//! Γ enclosures rather than by any monotonicity assumption in `ν`.
//!
//! Tail bound. Wendel's inequality gives, for `x > 0` and `0 < s <= 1`,
//! `Γ(x+s)/Γ(x) >= x^{1+s}/(x+1)`. Hence the ratio of consecutive term
//! magnitudes satisfies
//!
//! ```text
//! |t_{j+1}| / |t_j| = |z| Γ(x_j) / Γ(x_j + ν) <= |z| (x_j + 1) / x_j^{1+ν},   x_j = νj + β.
//! ```
//!
//! The right-hand side decreases in `x_j`, and for `x_j >= 1` also in `ν`,
//! so with `X = ν_lo m + β >= 1` the value `q = |z| (X+1)/X^{1+ν_lo}`
//! bounds every ratio from index `m` on. Once `q < 1` the tail after term
//! `m` is at most `|t_m| q / (1 - q)`.

use super::coeffs::{with_table, Table};
use super::gamma::gamma_enclosure;
use super::SpecFunError;
use crate::interval::round::{add_down, add_up, div_down, div_up, mul_down, mul_up, sub_down, sub_up};
use crate::interval::{exp_down, exp_up, Interval};

/// Arguments beyond this magnitude are rejected rather than summed.
pub const MAX_ABS_ARGUMENT: f64 = 50.0;

/// Upper limit on the number of series terms.
pub const MAX_TERMS: usize = 4000;

/// Terms stop once the certified tail drops below this share of `tol`.
const TAIL_SHARE: f64 = 1e-3;

/// Largest order-piece width in the mean-value evaluation.
pub const ORDER_PIECE: f64 = 5e-3;

/// Cap on the number of order pieces.
const MAX_ORDER_PIECES: usize = 16;

/// Beyond this magnitude direct powers switch to log-space evaluation.
const POW_LIMIT: f64 = 1e280;

/// A Mittag-Leffler query: order `ν`, second parameter `β`, real argument
/// `z` and the target enclosure width `tol`.
#[derive(Debug, Clone, Copy)]
pub struct MlQuery {
    pub nu: Interval,
    pub beta: f64,
    pub z: Interval,
    pub tol: f64,
}

impl MlQuery {
    pub fn new(nu: Interval, beta: f64, z: Interval, tol: f64) -> Result<Self, SpecFunError> {
        check_order(&nu)?;
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(SpecFunError::Domain(format!("β must be positive, got {beta}")));
        }
        if !(tol > 0.0) {
            return Err(SpecFunError::Domain(format!("tolerance must be positive, got {tol}")));
        }
        Ok(Self { nu, beta, z, tol })
    }
}

/// Certified enclosure together with the diagnostics of its computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlValue {
    pub enclosure: Interval,
    /// Series terms summed (largest over the evaluated endpoints).
    pub terms: usize,
    /// Bound on the discarded tail (largest over the evaluated endpoints).
    pub tail_bound: f64,
    /// `false` when rounding left the enclosure wider than the tolerance.
    pub tol_reached: bool,
    /// The Gaussian/Lorentzian envelope contributed a bound.
    pub envelope_used: bool,
}

fn check_order(nu: &Interval) -> Result<(), SpecFunError> {
    if !(nu.lo() > 0.0 && nu.hi() <= 1.0) {
        return Err(SpecFunError::Domain(format!("order ν must lie in (0, 1], got {nu}")));
    }
    Ok(())
}

/// Upper bound on the term ratio from index `m` on, or `None` while
/// `ν_lo m + β < 1`.
fn ratio_bound(abs_z: f64, nu_lo: f64, beta: f64, m: usize) -> Option<f64> {
    let x = add_down(mul_down(nu_lo, m as f64), beta);
    if x < 1.0 {
        return None;
    }
    let x_pow = Interval::point(x).pow_real(&Interval::point(nu_lo)).ok()?;
    let denom = mul_down(x_pow.lo(), x);
    Some(div_up(mul_up(abs_z, add_up(x, 1.0)), denom))
}

/// `|z|^i / Γ(ν i + β)` as an enclosure, switching to `exp(i ln|z| - ln Γ)`
/// once direct evaluation would overflow.
fn term_magnitude(
    abs_z: f64,
    i: usize,
    pow: &mut Option<Interval>,
    table: &mut Table,
) -> Result<Interval, SpecFunError> {
    if let Some(p) = pow {
        if i > 0 {
            *p = *p * Interval::point(abs_z);
        }
        if p.hi() < POW_LIMIT {
            if let Some(r) = table.recip_gamma(i)? {
                return Ok(*p * r);
            }
        }
        *pow = None;
    }
    let ln_abs = Interval::point(abs_z).ln().expect("nonzero argument");
    let log_mag = ln_abs * Interval::point(i as f64) - table.ln_gamma(i)?;
    Ok(Interval::raw(exp_down(log_mag.lo()), exp_up(log_mag.hi())))
}

/// Rigorous enclosure of `{E_{n,β}(z) : n ∈ ν}` at a real point `z`.
///
/// A non-degenerate order interval is split into pieces of width at most
/// [`ORDER_PIECE`]; on each piece the mean-value form
/// `E(c) + ∂_ν E(piece) · [-r, r]` around the centre `c` is used. Summing the series with an interval
/// order alone overestimates badly, since every term takes its own `ν`.
///
/// Returns [`SpecFunError::BudgetExceeded`] when `|z|` exceeds
/// [`MAX_ABS_ARGUMENT`] or when the tail cannot be certified below the
/// tolerance within [`MAX_TERMS`] terms.
pub fn ml_point(nu: Interval, beta: f64, z: f64, tol: f64) -> Result<MlValue, SpecFunError> {
    check_order(&nu)?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(SpecFunError::Domain(format!("β must be positive, got {beta}")));
    }
    if !z.is_finite() {
        return Err(SpecFunError::Domain(format!("argument must be finite, got {z}")));
    }
    if !(tol > 0.0) {
        return Err(SpecFunError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if z.abs() > MAX_ABS_ARGUMENT {
        return Err(SpecFunError::BudgetExceeded(format!(
            "|z| = {} exceeds the series guard {MAX_ABS_ARGUMENT}",
            z.abs()
        )));
    }
    if nu.is_point() || z == 0.0 {
        return series(nu, beta, z, tol);
    }
    let pieces = ((nu.width() / ORDER_PIECE).ceil() as usize).clamp(1, MAX_ORDER_PIECES);
    let edge = |j: usize| match j {
        0 => nu.lo(),
        j if j == pieces => nu.hi(),
        j => (nu.lo() + nu.width() * (j as f64 / pieces as f64)).clamp(nu.lo(), nu.hi()),
    };
    let mut out: Option<MlValue> = None;
    for j in 0..pieces {
        let piece = Interval::new(edge(j), edge(j + 1))?;
        let v = mean_value(piece, beta, z, tol)?;
        out = Some(match out {
            None => v,
            Some(acc) => MlValue {
                enclosure: acc.enclosure.hull(&v.enclosure),
                terms: acc.terms.max(v.terms),
                tail_bound: acc.tail_bound.max(v.tail_bound),
                tol_reached: false,
                envelope_used: false,
            },
        });
    }
    let v = out.expect("at least one piece");
    Ok(MlValue { tol_reached: v.enclosure.width() <= tol, ..v })
}

/// Mean-value enclosure over one order piece; the plain interval series
/// is the fallback when the derivative series is not certified.
fn mean_value(piece: Interval, beta: f64, z: f64, tol: f64) -> Result<MlValue, SpecFunError> {
    let c = piece.midpoint();
    let r = sub_up(piece.hi(), c).max(sub_up(c, piece.lo()));
    let centre = series(Interval::point(c), beta, z, tol)?;
    let deriv = match order_derivative(piece, beta, z, tol / r.max(f64::MIN_POSITIVE)) {
        Ok(d) => d,
        Err(SpecFunError::BudgetExceeded(_)) => return series(piece, beta, z, tol),
        Err(e) => return Err(e),
    };
    let enclosure = centre.enclosure + deriv * Interval::new(-r, r)?;
    Ok(MlValue { enclosure, ..centre })
}

/// Enclosure of `{∂_ν E_{ν,β}(z) : ν ∈ nu}`, the series
/// `Σ_{i>=1} z^i (-i ψ(νi+β)) / Γ(νi+β)`.
///
/// Tail: once `x_i = ν_lo i + β >= 2`, `0 < ψ(x) <= ln x < x` bounds the
/// terms by `u_i = i x_i^hi |z|^i / Γ(ν i + β)`, whose ratios are at most
/// `q (1 + 1/m)^2` from index `m` on.
fn order_derivative(nu: Interval, beta: f64, z: f64, tol: f64) -> Result<Interval, SpecFunError> {
    with_table(nu, beta, |table| order_derivative_with(table, nu, beta, z, tol))
}

fn order_derivative_with(
    table: &mut Table,
    nu: Interval,
    beta: f64,
    z: f64,
    tol: f64,
) -> Result<Interval, SpecFunError> {
    let abs_z = z.abs();
    let negative = z < 0.0;
    let mut sum = Interval::ZERO;
    let mut pow = Some(Interval::ONE);
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        let mag = term_magnitude(abs_z, i, &mut pow, table)?;
        let arg = table.arg(i);
        let psi = table.digamma(i)?;
        let term = -(mag * psi * Interval::point(fi));
        sum = sum + if negative && i % 2 == 1 { -term } else { term };
        if arg.lo() < 2.0 {
            continue;
        }
        if let Some(q) = ratio_bound(abs_z, nu.lo(), beta, i) {
            let growth = add_up(1.0, div_up(1.0, fi));
            let q = mul_up(q, mul_up(growth, growth));
            if q < 1.0 {
                let u = mul_up(mul_up(mag.hi(), fi), arg.hi());
                let tail = div_up(mul_up(u, q), sub_down(1.0, q));
                if tail <= TAIL_SHARE * tol || tail == 0.0 {
                    let d = sum.inflate_sym(tail)?;
                    if d.is_finite() {
                        return Ok(d);
                    }
                    break;
                }
            }
        }
    }
    Err(SpecFunError::BudgetExceeded("order derivative series did not converge".into()))
}

/// Plain interval series; an interval order is carried term by term.
fn series(nu: Interval, beta: f64, z: f64, tol: f64) -> Result<MlValue, SpecFunError> {
    with_table(nu, beta, |table| series_with(table, nu, beta, z, tol))
}

fn series_with(table: &mut Table, nu: Interval, beta: f64, z: f64, tol: f64) -> Result<MlValue, SpecFunError> {
    let first = (Interval::ONE / gamma_enclosure(&Interval::point(beta))?).expect("Γ > 0");
    if z == 0.0 {
        return Ok(MlValue {
            enclosure: first,
            terms: 1,
            tail_bound: 0.0,
            tol_reached: first.width() <= tol,
            envelope_used: false,
        });
    }
    let abs_z = z.abs();
    let negative = z < 0.0;
    let mut sum = first;
    let mut pow = Some(Interval::ONE);
    for i in 1..MAX_TERMS {
        let mag = term_magnitude(abs_z, i, &mut pow, table)?;
        let term = if negative && i % 2 == 1 { -mag } else { mag };
        sum = sum + term;
        if let Some(q) = ratio_bound(abs_z, nu.lo(), beta, i) {
            if q < 1.0 {
                let tail = div_up(mul_up(mag.hi(), q), sub_down(1.0, q));
                if tail <= TAIL_SHARE * tol || tail == 0.0 {
                    let enclosure = sum.inflate_sym(tail).expect("non-negative tail");
                    if !enclosure.is_finite() {
                        break;
                    }
                    return Ok(MlValue {
                        enclosure,
                        terms: i + 1,
                        tail_bound: tail,
                        tol_reached: enclosure.width() <= tol,
                        envelope_used: false,
                    });
                }
            }
        }
    }
    Err(SpecFunError::BudgetExceeded(format!(
        "tail of E_(ν={nu}, β={beta})({z}) not certified within {MAX_TERMS} terms"
    )))
}

/// Coarse enclosure of `E_{ν,1}(-ζ)` for `ζ >= 0` over all `ν ∈ nu`:
///
/// ```text
/// 1 / (1 + Γ(1-ν) ζ) <= E_{ν,1}(-ζ) <= 1 / (1 + ζ / Γ(1+ν)) <= 1 / (1 + ζ)
/// ```
///
/// for `0 < ν < 1`, and `E_{1,1}(-ζ) = exp(-ζ)`. The often quoted lower
/// bound `exp(-ζ)` is not used: for `ν < 1` it fails near zero, where
/// `E_{ν,1}(-ζ) ≈ 1 - ζ/Γ(1+ν) < 1 - ζ`.
pub fn crude_envelope(nu: Interval, zeta: f64) -> Result<Interval, SpecFunError> {
    check_order(&nu)?;
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(SpecFunError::Domain(format!("envelope needs ζ >= 0, got {zeta}")));
    }
    if zeta == 0.0 {
        return Ok(Interval::ONE);
    }
    let lorentz = div_up(1.0, add_down(1.0, zeta));
    let g_up = gamma_enclosure(&Interval::raw(add_down(1.0, nu.lo()), add_up(1.0, nu.hi())))?.hi();
    let upper = div_up(1.0, add_down(1.0, div_down(zeta, g_up))).min(lorentz);
    let lower = if nu.lo() == 1.0 {
        exp_down(-zeta)
    } else if nu.hi() == 1.0 {
        0.0
    } else {
        let s = Interval::raw(sub_down(1.0, nu.hi()), sub_up(1.0, nu.lo()));
        let g = gamma_enclosure(&s)?.hi();
        div_down(1.0, add_up(1.0, mul_up(g, zeta)))
    };
    Ok(Interval::raw(lower, upper.max(lower)))
}

/// One endpoint of [`ml_interval`]: the series enclosure, tightened by the
/// envelope for `β = 1` and non-positive arguments, or the envelope alone
/// when the series budget is exhausted there.
fn endpoint(nu: Interval, beta: f64, z: f64, tol: f64) -> Result<MlValue, SpecFunError> {
    let envelope = if beta == 1.0 && z <= 0.0 { Some(crude_envelope(nu, -z)?) } else { None };
    match (ml_point(nu, beta, z, tol), envelope) {
        (Ok(v), None) => Ok(v),
        (Ok(v), Some(env)) => {
            if v.enclosure.subset_of(&env) {
                return Ok(v);
            }
            let enclosure = v.enclosure.intersect(&env).map_err(|_| {
                SpecFunError::Inconsistent(format!(
                    "series enclosure {} misses the envelope {env} at z = {z}",
                    v.enclosure
                ))
            })?;
            Ok(MlValue { enclosure, tol_reached: enclosure.width() <= tol, envelope_used: true, ..v })
        }
        (Err(SpecFunError::BudgetExceeded(_)), Some(env)) => Ok(MlValue {
            enclosure: env,
            terms: 0,
            tail_bound: f64::INFINITY,
            tol_reached: env.width() <= tol,
            envelope_used: true,
        }),
        (Err(e), _) => Err(e),
    }
}

/// Enclosure of `{E_{n,β}(x) : n ∈ ν, x ∈ z}`.
///
/// For `0 < ν <= 1` and `β >= ν` the function is increasing on the real
/// line (complete monotonicity of `E_{ν,β}(-x)` on the negative axis, all
/// series terms positive on the positive axis), so the range is bracketed
/// by the endpoint enclosures.
pub fn ml_interval(q: &MlQuery) -> Result<MlValue, SpecFunError> {
    check_order(&q.nu)?;
    if q.beta < q.nu.hi() {
        return Err(SpecFunError::Domain(format!(
            "monotone evaluation needs β >= ν, got β = {} and ν = {}",
            q.beta, q.nu
        )));
    }
    let low = endpoint(q.nu, q.beta, q.z.lo(), q.tol)?;
    if q.z.is_point() {
        return Ok(low);
    }
    let high = endpoint(q.nu, q.beta, q.z.hi(), q.tol)?;
    let enclosure = Interval::raw(low.enclosure.lo(), high.enclosure.hi().max(low.enclosure.lo()));
    Ok(MlValue {
        enclosure,
        terms: low.terms.max(high.terms),
        tail_bound: low.tail_bound.max(high.tail_bound),
        tol_reached: low.tol_reached && high.tol_reached,
        envelope_used: low.envelope_used || high.envelope_used,
    })
}

/// Wraps a floating-point Mittag-Leffler evaluation with stated relative
/// tolerance `eps` into a guaranteed enclosure:
/// `[Ẽ] + eps/(1+eps) · (1 + |[Ẽ]|) · [-1, 1]`, where `approx` holds the
/// downward- and upward-rounded evaluations at the argument endpoints.
pub fn ml_interval_from_float(approx: Interval, eps: f64) -> Result<Interval, SpecFunError> {
    if !(eps > 0.0) {
        return Err(SpecFunError::Domain(format!("tolerance must be positive, got {eps}")));
    }
    let factor = (Interval::point(eps) / (Interval::ONE + Interval::point(eps))).expect("1 + ε > 0");
    let pad = factor * (Interval::ONE + Interval::point(approx.mag()));
    Ok(approx.inflate_sym(pad.hi()).expect("non-negative pad"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nu(x: f64) -> Interval {
        Interval::point(x)
    }

    #[test]
    fn exponential_special_case() {
        let v = ml_point(nu(1.0), 1.0, 1.0, 1e-12).unwrap();
        assert!(v.enclosure.contains(std::f64::consts::E));
        assert!(v.enclosure.width() < 1e-14);
    }

    #[test]
    fn zero_argument_is_exactly_one() {
        let v = ml_point(nu(0.8), 1.0, 0.0, 1e-12).unwrap();
        assert_eq!(v.enclosure, Interval::ONE);
    }

    #[test]
    fn half_order_at_minus_one() {
        // e * erfc(1) = 0.42758357615580700441...
        let v = ml_point(nu(0.5), 1.0, -1.0, 1e-10).unwrap();
        assert!(v.enclosure.contains(0.427_583_576_155_807));
        assert!(v.tol_reached);
        assert!(v.enclosure.lo() > (-1.0f64).exp() && v.enclosure.hi() <= 0.5);
    }

    #[test]
    fn guard_rejects_large_arguments() {
        assert!(matches!(ml_point(nu(0.5), 1.0, -60.0, 1e-10), Err(SpecFunError::BudgetExceeded(_))));
    }

    #[test]
    fn envelope_values() {
        assert_eq!(crude_envelope(nu(0.5), 0.0).unwrap(), Interval::ONE);
        // [1/(1+√π), 1/(1+1/Γ(1.5))]
        let e1 = crude_envelope(nu(0.5), 1.0).unwrap();
        assert!((e1.lo() - 1.0 / (1.0 + std::f64::consts::PI.sqrt())).abs() < 1e-12);
        assert!(e1.contains(0.469_841_095_7) && e1.hi() < 0.469_842);
        assert!(e1.contains(0.427_583_576_155_807));
        let exp1 = crude_envelope(nu(1.0), 1.0).unwrap();
        assert!(exp1.contains((-1.0f64).exp()) && exp1.hi() - 0.5 < 1e-15);
        assert!(crude_envelope(nu(0.5), -1.0).is_err());
    }

    #[test]
    fn envelope_holds_below_the_exponential() {
        // E_{0.8}(-0.2) = 0.81075... lies below exp(-0.2) = 0.81873...
        let env = crude_envelope(nu(0.8), 0.2).unwrap();
        assert!(env.contains(0.810_755_293_8) && env.lo() < (-0.2f64).exp());
        let q = MlQuery::new(nu(0.8), 1.0, Interval::point(-0.2), 1e-12).unwrap();
        assert!(ml_interval(&q).is_ok());
    }

    #[test]
    fn interval_of_exponential() {
        let q = MlQuery::new(nu(1.0), 1.0, Interval::new(0.0, 1.0).unwrap(), 1e-12).unwrap();
        let v = ml_interval(&q).unwrap();
        assert!(v.enclosure.contains(1.0) && v.enclosure.contains(std::f64::consts::E));
        assert!(v.enclosure.width() < 1.72 + 1e-12);
    }

    #[test]
    fn far_negative_arguments_fall_back_to_the_envelope() {
        let q = MlQuery::new(nu(0.5), 1.0, Interval::point(-80.0), 1e-10).unwrap();
        let v = ml_interval(&q).unwrap();
        assert!(v.envelope_used);
        // E_{0.5}(-80) = exp(6400) erfc(80) ≈ 0.0070519
        assert!(v.enclosure.contains(0.007_051_9) && v.enclosure.hi() < 1.0 / 81.0);
    }

    #[test]
    fn float_wrapper_pads_symmetrically() {
        let w = ml_interval_from_float(Interval::point(0.5), 1e-8).unwrap();
        assert!(w.contains(0.5 + 1.4e-8) && w.contains(0.5 - 1.4e-8));
        assert!(!w.contains(0.5 + 2e-8));
    }

    #[test]
    fn order_outside_unit_interval_is_rejected() {
        assert!(ml_point(Interval::new(0.5, 1.2).unwrap(), 1.0, 0.1, 1e-10).is_err());
        assert!(ml_point(Interval::new(0.0, 0.5).unwrap(), 1.0, 0.1, 1e-10).is_err());
    }
}
