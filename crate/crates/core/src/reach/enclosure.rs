//! Mittag-Leffler-type enclosures `z(t) ∈ E_{ν,1}([Λ] t^ν) [z](0)` and the
//! iteration that determines `[Λ]`.

use serde::Serialize;

use super::ReachError;
use crate::interval::{Interval, IntervalVector};
use crate::model::DiagDominantSystem;
use crate::specfun::{ml_interval, MlQuery, SpecFunError};

/// Target width passed to the Mittag-Leffler evaluations.
pub const ML_TOL: f64 = 1e-13;

/// Controls for [`iterate_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterOptions {
    pub max_iter: usize,
    /// Refinement after acceptance stops once the largest width shrinks by
    /// less than this fraction.
    pub stall_tol: f64,
    /// Relative part of the seed inflation before acceptance.
    pub eps_rel: f64,
    /// Absolute part of the seed inflation before acceptance.
    pub eps_abs: f64,
}

impl Default for IterOptions {
    fn default() -> Self {
        Self { max_iter: 100, stall_tol: 1e-9, eps_rel: 1e-6, eps_abs: 1e-12 }
    }
}

/// Parameters `[Λ]` with the data needed to evaluate the enclosure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MlEnclosure {
    pub lambdas: IntervalVector,
    pub z0: IntervalVector,
    pub nu: Interval,
    /// Length `T` of the local validity horizon `[0, T]`.
    pub horizon: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// `{E_{ν,1}(λ s^ν) : λ ∈ [λ], s ∈ t, ν ∈ [ν]}`.
pub fn ml_factor(lambda: Interval, nu: Interval, t: Interval) -> Result<Interval, ReachError> {
    let arg = lambda * t.pow_real(&nu)?;
    let q = MlQuery::new(nu, 1.0, arg, ML_TOL)?;
    Ok(ml_interval(&q)?.enclosure)
}

/// Enclosure over local times `t ⊆ [0, T]`:
/// `z_i(t) ∈ E_{ν,1}([λ_i] t^ν) [z_i](0)`.
pub fn evaluate_enclosure(e: &MlEnclosure, t: Interval) -> Result<IntervalVector, ReachError> {
    if !e.converged {
        return Err(ReachError::NotConvergedEnclosure);
    }
    if t.lo() < 0.0 || t.hi() > e.horizon {
        return Err(ReachError::HorizonExceeded { t: t.hi(), horizon: e.horizon });
    }
    e.lambdas
        .iter()
        .zip(e.z0.iter())
        .map(|(&l, &z)| Ok(ml_factor(l, e.nu, t)? * z))
        .collect::<Result<Vec<_>, ReachError>>()
        .map(IntervalVector::new)
}

/// One application of the simplified iteration
///
/// ```text
/// λ_i ← a_ii(z_e) + Σ_{j≠i} a_ij(z_e) · E_j / E_i · z_{0,j} / z_{0,i} + [-μ_i, μ_i] / (E_i z_{0,i})
/// ```
///
/// with `E_j = E_{ν,1}([λ_j] [0,T]^ν)` and `z_e = E z_0`.
fn step(
    sys: &DiagDominantSystem,
    z0: &IntervalVector,
    lambdas: &IntervalVector,
    horizon: Interval,
) -> Result<IntervalVector, ReachError> {
    let nu = sys.nu();
    let e: Vec<Interval> = lambdas.iter().map(|&l| ml_factor(l, nu, horizon)).collect::<Result<_, _>>()?;
    let ze: IntervalVector = e.iter().zip(z0.iter()).map(|(&ei, &zi)| ei * zi).collect();
    let a = sys.eval_a(&ze)?;
    let n = sys.dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut li = a[(i, i)];
        for j in (0..n).filter(|&j| j != i) {
            let ratio = ((e[j] / e[i])? * z0[j] / z0[i])?;
            li = li + a[(i, j)] * ratio;
        }
        let mu = sys.mu()[i];
        if mu > 0.0 {
            li = li + (Interval::ZERO.inflate_sym(mu)? / ze[i])?;
        }
        out.push(li);
    }
    Ok(IntervalVector::new(out))
}

/// Determines `[Λ]` for the horizon `[0, T]` starting from `[z](0) = z0`.
///
/// The seed is `λ_i = a_ii(A_z([z](0)))`. Until the first inclusion
/// `F([λ]) ⊆ [λ]` is observed, each candidate is ε-inflated before the
/// step; once it holds, further steps are accepted only while they keep
/// the inclusion, and stop when the widths stall. Iterates that grow past
/// the range of the series evaluation count as divergence.
pub fn iterate_lambda(
    sys: &DiagDominantSystem,
    z0: &IntervalVector,
    horizon: f64,
    opts: &IterOptions,
) -> Result<MlEnclosure, ReachError> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(ReachError::Domain(format!("horizon must be positive, got {horizon}")));
    }
    if z0.len() != sys.dim() {
        return Err(ReachError::Domain("initial box dimension differs from the system".into()));
    }
    if let Some(i) = z0.iter().position(Interval::contains_zero) {
        return Err(ReachError::ZeroCrossingInitialState { component: i, value: z0[i] });
    }
    let t = Interval::new(0.0, horizon)?;
    let a0 = sys.eval_a(z0)?;
    let mut lambdas = a0.diagonal();
    let mut iterations = 0;
    let mut accepted = false;
    while iterations < opts.max_iter {
        iterations += 1;
        if !accepted {
            let cand: IntervalVector = lambdas.iter().map(|l| l.eps_inflate(opts.eps_rel, opts.eps_abs)).collect();
            let next = match step(sys, z0, &cand, t) {
                Err(ReachError::SpecFun(SpecFunError::BudgetExceeded(_))) => break,
                r => r?,
            };
            if next.subset_of(&cand) {
                accepted = true;
            }
            lambdas = next;
        } else {
            let next = match step(sys, z0, &lambdas, t) {
                Err(ReachError::SpecFun(SpecFunError::BudgetExceeded(_))) => break,
                r => r?,
            };
            if !next.subset_of(&lambdas) {
                break;
            }
            let before = lambdas.max_width();
            let after = next.max_width();
            lambdas = next;
            if before - after <= opts.stall_tol * before.max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }
    if !accepted {
        return Err(ReachError::NotConverged { slice: 0, iterations });
    }
    Ok(MlEnclosure { lambdas, z0: z0.clone(), nu: sys.nu(), horizon, converged: true, iterations })
}
