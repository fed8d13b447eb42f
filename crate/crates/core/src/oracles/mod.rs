//! Non-verified references: a Grünwald-Letnikov simulator, an
//! extended-precision Mittag-Leffler series and the Oustaloup
//! integer-order approximation with its frequency-response comparison.
//!
//! Nothing here is rigorous; these exist to test the verified layers.

mod gl;
mod highprec;
mod oustaloup;

pub use gl::{gl_simulate, gl_weights, GlTrajectory};
pub use highprec::{gamma_highprec, ml_highprec, ml_highprec_f64};
pub use oustaloup::{
    feedback_response, freq_exact, freq_ss, load_printed_ss, log_grid, mag_db, max_deviation, oustaloup, phase_deg,
    sweep, write_sweep_csv, RationalTF, StateSpace, SweepRow, SWEEP_HEADER,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("trajectory left |x| <= 1e9 at t = {t}")]
    StepTooLarge { t: f64 },
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("jωI - A is singular at ω = {omega}")]
    SingularAtFrequency { omega: f64 },
}
