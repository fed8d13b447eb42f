//! Verified reachability for commensurate fractional-order systems of
//! Caputo type using Mittag-Leffler-type state enclosures.
//!
//! Layers, bottom up:
//!
//! * [`interval`]: outward-rounded interval arithmetic,
//! * [`specfun`]: certified Γ and Mittag-Leffler enclosures,
//! * [`linalg`]: eigenvector transforms and verified inverses,
//! * [`model`]: quasi-linear system descriptions and the stock scenarios,
//! * [`reach`]: the enclosure iteration, restarts, contractor and driver,
//! * [`oracles`]: non-verified references used for testing.

pub mod interval;
pub mod linalg;
pub mod model;
pub mod oracles;
pub mod reach;
pub mod specfun;

pub use interval::{Interval, IntervalError, IntervalMatrix, IntervalVector};
