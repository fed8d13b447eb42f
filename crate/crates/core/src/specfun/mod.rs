//! Special functions with rigorous enclosures: Γ, ln Γ and the
//! two-parameter Mittag-Leffler function on the real line.

mod coeffs;
mod gamma;
mod mittag_leffler;

pub(crate) use gamma::recip_gamma_upper_small;
pub use gamma::{digamma_enclosure, digamma_point, gamma_enclosure, gamma_point, ln_gamma_enclosure, ln_gamma_point};
pub use mittag_leffler::{
    crude_envelope, ml_interval, ml_interval_from_float, ml_point, MlQuery, MlValue, MAX_ABS_ARGUMENT, MAX_TERMS,
};

use crate::interval::IntervalError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("inconsistent enclosures: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}
