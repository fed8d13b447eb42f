use std::sync::Arc;

use rand::RngCore;

use super::{sample, ModelError, PointRhs, QuasiLinearSystem, Rule};
use crate::interval::{Interval, IntervalMatrix, IntervalVector};

/// Scalar cubic system `z^(ν) = p z³ = (p z²) z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRule {
    pub p: Interval,
}

impl Rule for CubicRule {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &IntervalVector) -> Result<IntervalMatrix, ModelError> {
        Ok(IntervalMatrix::new(1, 1, vec![self.p * x[0].sqr()])?)
    }

    fn realize(&self, rng: &mut dyn RngCore) -> PointRhs {
        let p = sample(&self.p, rng);
        Arc::new(move |x: &[f64]| vec![p * x[0] * x[0] * x[0]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicCase {
    A,
    B,
}

pub fn build_cubic(case: CubicCase) -> QuasiLinearSystem {
    let (z0, p, nu) = match case {
        CubicCase::A => ((0.99, 1.0), (-2.0, -1.99), (0.8, 0.81)),
        CubicCase::B => ((0.5, 1.0), (-2.0, -1.0), (0.8, 0.9)),
    };
    let iv = |(lo, hi): (f64, f64)| Interval::new(lo, hi).expect("literal bounds");
    let rule = CubicRule { p: iv(p) };
    QuasiLinearSystem::new(iv(nu), Arc::new(rule), IntervalVector::new(vec![iv(z0)]))
        .expect("valid literal system")
        .with_param("p", iv(p))
}
