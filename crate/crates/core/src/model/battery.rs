//! Closed-loop fractional-order battery model with state
//! `x = (σ, D^0.5 σ, v1)` and state feedback `i = -kᵀ x`.

use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{pole_placement, sample, ModelError, PointRhs, QuasiLinearSystem, Rule};
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::linalg::{ColumnLayout, Matrix};

/// Closed-loop eigenvalues assigned by the controller.
pub const BATTERY_EIGENVALUES: [f64; 3] = [-0.0001, -0.0002, -0.4832];

/// Column arrangement of the eigenvector transform that reproduces the
/// reference transformed initial boxes.
pub fn battery_reference_layout() -> ColumnLayout {
    ColumnLayout { order: vec![-0.4832, -0.0001, -0.0002], negate: vec![false, true, true] }
}

/// Equivalent-circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryParams {
    pub r0: f64,
    pub q: f64,
    pub r: f64,
    pub eta0: f64,
    pub eta1: f64,
    pub cn: f64,
    pub c: [f64; 5],
    pub d0: f64,
    pub d1: f64,
}

impl Default for BatteryParams {
    fn default() -> Self {
        Self {
            r0: 1.7e-5,
            q: 20.591,
            r: 0.1005,
            eta0: 1.0,
            eta1: 0.1,
            cn: 3.1,
            c: [3.0607, 3.2965, -8.3942, 11.088, -4.8992],
            d0: -0.2477,
            d1: -14.302,
        }
    }
}

impl BatteryParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [self.r0, self.q, self.r, self.eta0, self.eta1, self.cn, self.d0, self.d1];
        if all.iter().chain(&self.c).any(|x| !x.is_finite()) {
            return Err(ModelError::Invalid("battery parameters must be finite".into()));
        }
        if !(self.cn > 0.0 && self.q > 0.0 && self.r > 0.0) {
            return Err(ModelError::Invalid("C_N, Q and R must be positive".into()));
        }
        Ok(())
    }

    /// Open-loop `(A, b)`; `sign` is the sign of the terminal current.
    pub fn open_loop(&self, sign: f64) -> (Matrix, [f64; 3]) {
        let s = 3600.0 * self.cn;
        let a = Matrix::from_rows(&[
            &[0.0, 1.0, 0.0],
            &[self.eta1 * sign / s, 0.0, 0.0],
            &[0.0, 0.0, -1.0 / (self.r * self.q)],
        ])
        .expect("3x3 literal");
        (a, [0.0, -self.eta0 / s, 1.0 / self.q])
    }
}

/// Constant interval system matrix.
#[derive(Debug, Clone)]
pub struct ConstantRule {
    a: IntervalMatrix,
}

impl ConstantRule {
    pub fn new(a: IntervalMatrix) -> Self {
        Self { a }
    }
}

impl Rule for ConstantRule {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn eval(&self, _x: &IntervalVector) -> Result<IntervalMatrix, ModelError> {
        Ok(self.a.clone())
    }

    fn realize(&self, rng: &mut dyn RngCore) -> PointRhs {
        let n = self.a.rows();
        let m: Vec<f64> = self.a.iter().map(|iv| sample(iv, rng)).collect();
        Arc::new(move |x: &[f64]| (0..n).map(|i| (0..n).map(|j| m[i * n + j] * x[j]).sum()).collect())
    }
}

/// Assembled battery scenario.
#[derive(Debug, Clone)]
pub struct BatteryModel {
    pub params: BatteryParams,
    pub a_open: Matrix,
    pub b: [f64; 3],
    pub k: Vec<f64>,
    /// Nominal closed-loop matrix `A - b kᵀ`.
    pub a_closed: Matrix,
    /// Closed-loop matrix with the interval inflation applied.
    pub a_interval: IntervalMatrix,
    pub system: QuasiLinearSystem,
}

/// Builds the closed-loop model. Entries (2,1), (2,2), (2,3) of the
/// closed-loop matrix get a symmetric relative radius `infl_row2`, entry
/// (3,3) gets `infl_33`. `discharge` fixes the sign of the current to +1.
pub fn build_battery(
    p: &BatteryParams,
    desired: &[f64; 3],
    infl_row2: f64,
    infl_33: f64,
    discharge: bool,
    x0: IntervalVector,
) -> Result<BatteryModel, ModelError> {
    p.validate()?;
    if !(infl_row2 >= 0.0 && infl_33 >= 0.0) {
        return Err(ModelError::Invalid("inflation fractions must be non-negative".into()));
    }
    let sign = if discharge { 1.0 } else { -1.0 };
    let (a_open, b) = p.open_loop(sign);
    let k = pole_placement(&a_open, &b, desired)?;
    let mut a_closed = a_open.clone();
    for i in 0..3 {
        for j in 0..3 {
            a_closed[(i, j)] -= b[i] * k[j];
        }
    }
    let mut a_interval = a_closed.to_interval();
    let inflate = |v: f64, frac: f64| Interval::mid_rad(v, (v * frac).abs());
    for j in 0..3 {
        a_interval[(1, j)] = inflate(a_closed[(1, j)], infl_row2)?;
    }
    a_interval[(2, 2)] = inflate(a_closed[(2, 2)], infl_33)?;
    let nu = Interval::point(0.5);
    let rule = ConstantRule::new(a_interval.clone());
    let system = QuasiLinearSystem::new(nu, Arc::new(rule), x0)?
        .with_param("A_C21", a_interval[(1, 0)])
        .with_param("A_C22", a_interval[(1, 1)])
        .with_param("A_C23", a_interval[(1, 2)])
        .with_param("A_C33", a_interval[(2, 2)]);
    Ok(BatteryModel { params: *p, a_open, b, k, a_closed, a_interval, system })
}

/// `Σ c_k σ^k + (-R0 + d0 e^{d1 σ}) i` over a σ slab, by Horner's scheme.
fn slab_terms(sigma: Interval, current: Interval, p: &BatteryParams) -> Interval {
    let poly = p.c.iter().rev().fold(Interval::ZERO, |acc, &ck| acc * sigma + Interval::point(ck));
    let resistance = Interval::point(-p.r0) + Interval::point(p.d0) * (Interval::point(p.d1) * sigma).exp();
    poly + resistance * current
}

fn slabs(sigma: Interval, subdivisions: usize) -> impl Iterator<Item = Interval> {
    let n = subdivisions.max(1);
    let (lo, w) = (sigma.lo(), sigma.hi() - sigma.lo());
    let edge = move |j: usize| {
        if j == 0 {
            lo
        } else if j == n {
            sigma.hi()
        } else {
            (lo + w * (j as f64 / n as f64)).clamp(lo, sigma.hi())
        }
    };
    (0..n).map(move |j| Interval::new(edge(j), edge(j + 1)).expect("ordered slab edges"))
}

/// Terminal voltage enclosure `v = Σ c_k σ^k - v1 + (-R0 + d0 e^{d1 σ}) i`
/// for a fixed current, with the σ component split into `subdivisions`
/// slabs to curb the dependency effect.
pub fn battery_output(
    x_box: &IntervalVector,
    current: f64,
    p: &BatteryParams,
    subdivisions: usize,
) -> Result<Interval, ModelError> {
    if subdivisions == 0 || x_box.len() != 3 {
        return Err(ModelError::Invalid("output needs a 3-state box and at least one slab".into()));
    }
    let i = Interval::point(current);
    let hull = slabs(x_box[0], subdivisions)
        .map(|s| slab_terms(s, i, p))
        .reduce(|a, b| a.hull(&b))
        .expect("at least one slab");
    Ok(hull - x_box[2])
}

/// Terminal voltage under state feedback `i = -kᵀ x`; the current is
/// re-evaluated on every σ slab.
pub fn battery_output_feedback(
    x_box: &IntervalVector,
    k: &[f64],
    p: &BatteryParams,
    subdivisions: usize,
) -> Result<Interval, ModelError> {
    if subdivisions == 0 || x_box.len() != 3 || k.len() != 3 {
        return Err(ModelError::Invalid("output needs a 3-state box and at least one slab".into()));
    }
    let rest = -(Interval::point(k[1]) * x_box[1] + Interval::point(k[2]) * x_box[2]);
    let v = slabs(x_box[0], subdivisions)
        .map(|s| {
            let i = rest - Interval::point(k[0]) * s;
            slab_terms(s, i, p)
        })
        .reduce(|a, b| a.hull(&b))
        .expect("at least one slab");
    Ok(v - x_box[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{char_poly, poly_from_roots, Scenario};

    fn nominal(infl2: f64, infl3: f64) -> BatteryModel {
        build_battery(
            &BatteryParams::default(),
            &BATTERY_EIGENVALUES,
            infl2,
            infl3,
            true,
            Scenario::BatterySmall.battery_x0().unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn open_loop_entries() {
        let m = nominal(0.01, 0.1);
        assert_eq!(m.a_open[(1, 0)], 0.1 / (3600.0 * 3.1));
        assert!((m.a_open[(2, 2)] + 0.483_233).abs() < 1e-6);
    }

    #[test]
    fn inflated_entry_33() {
        let m = nominal(0.01, 0.1);
        let a33 = m.a_interval[(2, 2)];
        assert!((a33.lo() + 0.53152).abs() < 1e-4 && (a33.hi() + 0.43488).abs() < 1e-4, "{a33}");
        assert!(m.a_interval[(0, 1)].is_point());
    }

    #[test]
    fn closed_loop_spectrum_without_inflation() {
        let m = nominal(0.0, 0.0);
        assert!(m.a_interval.is_point());
        let cp = char_poly(&m.a_closed);
        for (x, y) in cp.iter().zip(poly_from_roots(&BATTERY_EIGENVALUES)) {
            assert!((x - y).abs() <= 1e-6 * y.abs(), "{x} vs {y}");
        }
    }

    #[test]
    fn output_at_full_charge() {
        let p = BatteryParams::default();
        let x = IntervalVector::from_points(&[1.0, 0.0, 0.0]);
        let v = battery_output(&x, 0.0, &p, 8).unwrap();
        let expected = 3.0607 + 3.2965 - 8.3942 + 11.088 - 4.8992;
        assert!(v.contains(expected) && v.width() < 1e-14, "{v}");
        assert_eq!(v, battery_output(&x, 0.0, &p, 1).unwrap());
    }

    #[test]
    fn finer_slabs_refine_the_output() {
        let p = BatteryParams::default();
        let x = IntervalVector::from_bounds(&[(0.2, 1.0), (-0.01, 0.01), (0.05, 0.1)]).unwrap();
        let mut prev = battery_output(&x, 0.1, &p, 1).unwrap();
        for n in [2, 4, 8, 16, 32, 64] {
            let v = battery_output(&x, 0.1, &p, n).unwrap();
            assert!(v.subset_of(&prev), "n = {n}");
            prev = v;
        }
    }
}
