//! Verified reachability: Mittag-Leffler-type enclosure iteration,
//! time slicing with truncation-error inflation, the λ contractor and the
//! end-to-end driver.

mod enclosure;
mod simulate;
pub mod soundness;

pub use enclosure::{evaluate_enclosure, iterate_lambda, ml_factor, IterOptions, MlEnclosure, ML_TOL};
pub use simulate::{simulate, SimOptions, SliceResult, Slicing, Tube, TubeRow};
pub use soundness::{check_tube, monte_carlo, sample_trajectories, SoundnessOptions, SoundnessReport, Violation};

use crate::interval::{round::sub_up, Interval, IntervalError, IntervalVector};
use crate::linalg::LinalgError;
use crate::model::{DiagDominantSystem, ModelError};
use crate::oracles::OracleError;
use crate::specfun::{recip_gamma_upper_small, SpecFunError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReachError {
    #[error(
        "initial component {component} = {value} contains zero; bisect the initial box at 0 \
         and simulate each part separately"
    )]
    ZeroCrossingInitialState { component: usize, value: Interval },
    #[error("iteration did not reach the subset condition on slice {slice} after {iterations} steps; shrink the slice length")]
    NotConverged { slice: usize, iterations: usize },
    #[error("time {t} lies outside the validity horizon [0, {horizon}]")]
    HorizonExceeded { t: f64, horizon: f64 },
    #[error("enclosure was not accepted by the iteration")]
    NotConvergedEnclosure,
    #[error("empty intersection of verified enclosures: {0}")]
    EmptyIntersection(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl From<LinalgError> for ReachError {
    fn from(e: LinalgError) -> Self {
        ReachError::Model(ModelError::Linalg(e))
    }
}

impl ReachError {
    pub(crate) fn at_slice(self, slice: usize) -> Self {
        match self {
            ReachError::NotConverged { iterations, .. } => ReachError::NotConverged { slice, iterations },
            other => other,
        }
    }
}

/// Upper bound on the right-hand-side inflation needed when the memory
/// start of a slice is moved forward by `T`:
/// `μ_i = Z_i · max(T^{-ν}, (t_k + T)^{-ν}) / |Γ(1 - ν)|`, maximised over `ν`.
pub fn truncation_mu(z_sup: &[f64], t_k: f64, t: f64, nu: Interval) -> Result<Vec<f64>, ReachError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(ReachError::Domain(format!("slice length must be positive, got {t}")));
    }
    if !(t_k >= 0.0) {
        return Err(ReachError::Domain(format!("slice start must be non-negative, got {t_k}")));
    }
    if z_sup.iter().any(|z| !(*z >= 0.0)) {
        return Err(ReachError::Domain("state suprema must be non-negative".into()));
    }
    let s_max = sub_up(1.0, nu.lo());
    if s_max <= 0.0 {
        return Ok(vec![0.0; z_sup.len()]);
    }
    let recip_gamma = recip_gamma_upper_small(s_max.min(1.0))?;
    let by_length = Interval::point(t).pow_neg_real(&nu)?;
    let by_time = (Interval::point(t_k) + Interval::point(t)).pow_neg_real(&nu)?;
    let factor = Interval::point(by_length.hi().max(by_time.hi())) * Interval::point(recip_gamma);
    Ok(z_sup.iter().map(|&z| (Interval::point(z) * factor).hi()).collect())
}

/// System for the next slice: the previous end box `prev.z_end` becomes the initial
/// state and each right-hand-side component is inflated by `[-μ_i, μ_i]`,
/// with `μ` from [`truncation_mu`] on the previous slice's start, length
/// and running supremum.
pub fn restart(sys: &DiagDominantSystem, prev: &SliceResult) -> Result<DiagDominantSystem, ReachError> {
    let mu = truncation_mu(&prev.z_sup, prev.t_start, prev.t_end - prev.t_start, sys.nu())?;
    Ok(sys.with_initial(prev.z_end.clone())?.with_mu(mu)?)
}

/// Tightens `[λ]` of `curr` with a second verified enclosure `reference`
/// of the same trajectories over `window` (local time of `curr`):
/// `[λ_i] ∩ f̃_i([z_e] ∩ [z_ref]) / ([z_{e,i}] ∩ [z_{ref,i}])`.
///
/// `reference_window` is the same absolute time span expressed in the local
/// time of `reference`. Components whose denominator contains zero keep
/// their `[λ_i]`.
pub fn contract_lambda(
    curr: &MlEnclosure,
    reference: &MlEnclosure,
    sys: &DiagDominantSystem,
    window: Interval,
    reference_window: Interval,
) -> Result<MlEnclosure, ReachError> {
    let ze = evaluate_enclosure(curr, window)?;
    let zr = evaluate_enclosure(reference, reference_window)?;
    let both = ze.intersect(&zr).map_err(|_| ReachError::EmptyIntersection(format!("states {ze} and {zr}")))?;
    let f = sys.eval_f_tilde(&both)?;
    let lambdas = contract_components(&curr.lambdas, &f, &both)?;
    Ok(MlEnclosure { lambdas, ..curr.clone() })
}

fn contract_components(
    lambdas: &IntervalVector,
    f: &IntervalVector,
    z: &IntervalVector,
) -> Result<IntervalVector, ReachError> {
    lambdas
        .iter()
        .zip(f.iter().zip(z.iter()))
        .map(|(l, (fi, zi))| {
            if zi.contains_zero() {
                return Ok(*l);
            }
            let tilde = (*fi / *zi)?;
            l.intersect(&tilde).map_err(|_| ReachError::EmptyIntersection(format!("lambda {l} and {tilde}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(IntervalVector::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_cubic, CubicCase};

    #[test]
    fn mu_vanishes_without_states() {
        let mu = truncation_mu(&[0.0, 0.0], 0.0, 0.5, Interval::point(0.5)).unwrap();
        assert_eq!(mu, vec![0.0, 0.0]);
    }

    #[test]
    fn mu_for_half_order_is_reciprocal_root_pi() {
        let mu = truncation_mu(&[1.0], 0.0, 1.0, Interval::point(0.5)).unwrap()[0];
        let expected = 1.0 / std::f64::consts::PI.sqrt();
        assert!(mu >= expected && mu - expected < 1e-13, "{mu}");
    }

    #[test]
    fn mu_is_linear_in_the_supremum() {
        let nu = Interval::new(0.8, 0.81).unwrap();
        let one = truncation_mu(&[1.5], 0.25, 0.25, nu).unwrap()[0];
        let two = truncation_mu(&[3.0], 0.25, 0.25, nu).unwrap()[0];
        assert!((two - 2.0 * one).abs() <= 1e-14 * two);
    }

    #[test]
    fn mu_vanishes_for_integer_order() {
        assert_eq!(truncation_mu(&[2.0], 0.0, 0.1, Interval::ONE).unwrap(), vec![0.0]);
    }

    #[test]
    fn mu_rejects_non_positive_length() {
        assert!(truncation_mu(&[1.0], 0.0, 0.0, Interval::point(0.5)).is_err());
    }

    #[test]
    fn inflated_rhs_contains_plain_rhs() {
        let sys = build_cubic(CubicCase::A).untransformed();
        let plain = sys.eval_f_tilde(sys.z0()).unwrap();
        let inflated = sys.with_mu(vec![0.1]).unwrap().eval_f_tilde(sys.z0()).unwrap();
        assert!(plain[0].interior_of(&inflated[0]));
    }

    #[test]
    fn contraction_against_itself_is_idempotent() {
        let sys = build_cubic(CubicCase::A).untransformed();
        let e = iterate_lambda(&sys, sys.z0(), 0.25, &IterOptions::default()).unwrap();
        let w = Interval::new(0.0, 0.25).unwrap();
        let c = contract_lambda(&e, &e, &sys, w, w).unwrap();
        assert!(c.lambdas.subset_of(&e.lambdas));
        let again = contract_lambda(&c, &c, &sys, w, w).unwrap();
        assert!(again.lambdas.subset_of(&c.lambdas));
    }
}
