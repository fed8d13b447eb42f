//! Quasi-linear fractional-order systems `x^(ν) = A(x) x` and the stock
//! scenarios: a scalar cubic system and a closed-loop battery model.

mod battery;
mod cubic;
mod placement;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

pub use battery::{
    battery_output, battery_output_feedback, battery_reference_layout, build_battery, BatteryModel, BatteryParams,
    ConstantRule, BATTERY_EIGENVALUES,
};
pub use cubic::{build_cubic, CubicCase, CubicRule};
pub use placement::{char_poly, pole_placement, poly_from_roots};

use crate::interval::{Interval, IntervalError, IntervalMatrix, IntervalVector};
use crate::linalg::{ColumnLayout, LinalgError, Matrix, TransformPair};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("evaluation domain error: {0}")]
    EvaluationDomain(String),
    #[error("pair (A, b) is not controllable (controllability measure {measure:e})")]
    Uncontrollable { measure: f64 },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Point right-hand side `x ↦ f(x)` with every parameter fixed.
pub type PointRhs = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Interval evaluation rule for the quasi-linear factor `A(x)`.
pub trait Rule: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// Enclosure of `{A(x) : x ∈ box}` over all admissible parameters.
    /// Must be inclusion isotone in `box`.
    fn eval(&self, x: &IntervalVector) -> Result<IntervalMatrix, ModelError>;

    /// Draws constant parameters uniformly from their boxes and returns the
    /// resulting point right-hand side `f(x) = A(x) x`.
    fn realize(&self, rng: &mut dyn RngCore) -> PointRhs;
}

/// Uniform sample from `[lo, hi]`.
pub(crate) fn sample(iv: &Interval, rng: &mut dyn RngCore) -> f64 {
    let u: f64 = rng.random();
    (iv.lo() + (iv.hi() - iv.lo()) * u).clamp(iv.lo(), iv.hi())
}

/// A commensurate-order quasi-linear system with uncertain initial state.
#[derive(Debug, Clone)]
pub struct QuasiLinearSystem {
    nu: Interval,
    rule: Arc<dyn Rule>,
    x0: IntervalVector,
    params: BTreeMap<String, Interval>,
}

impl QuasiLinearSystem {
    /// `ν` must satisfy `0 < ν.lo <= ν.hi <= 1`; the closed upper end admits
    /// the integer-order limit.
    pub fn new(nu: Interval, rule: Arc<dyn Rule>, x0: IntervalVector) -> Result<Self, ModelError> {
        if !(nu.lo() > 0.0 && nu.hi() <= 1.0) {
            return Err(ModelError::Invalid(format!("order must lie in (0, 1], got {nu}")));
        }
        if x0.len() != rule.dim() {
            return Err(ModelError::Invalid(format!(
                "initial box has {} components, system has {}",
                x0.len(),
                rule.dim()
            )));
        }
        Ok(Self { nu, rule, x0, params: BTreeMap::new() })
    }

    pub fn with_param(mut self, name: &str, value: Interval) -> Self {
        self.params.insert(name.to_owned(), value);
        self
    }

    pub fn with_x0(&self, x0: IntervalVector) -> Result<Self, ModelError> {
        Self::new(self.nu, self.rule.clone(), x0).map(|s| Self { params: self.params.clone(), ..s })
    }

    pub fn dim(&self) -> usize {
        self.rule.dim()
    }

    pub fn nu(&self) -> Interval {
        self.nu
    }

    pub fn x0(&self) -> &IntervalVector {
        &self.x0
    }

    pub fn rule(&self) -> &Arc<dyn Rule> {
        &self.rule
    }

    pub fn params(&self) -> &BTreeMap<String, Interval> {
        &self.params
    }

    pub fn eval_a(&self, x: &IntervalVector) -> Result<IntervalMatrix, ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::Interval(IntervalError::DimensionMismatch { expected: self.dim(), got: x.len() }));
        }
        self.rule.eval(x)
    }

    /// `f([x]) = A([x]) [x]`.
    pub fn eval_f(&self, x: &IntervalVector) -> Result<IntervalVector, ModelError> {
        Ok(self.eval_a(x)?.mul_vec(x)?)
    }

    /// Midpoint matrix of `A` at the midpoint of the initial box.
    pub fn midpoint_matrix(&self) -> Result<Matrix, ModelError> {
        let xm = IntervalVector::from_points(&self.x0.midpoint());
        let a = self.eval_a(&xm)?;
        Ok(Matrix::new(a.rows(), a.cols(), a.midpoint())?)
    }

    /// Transforms into eigenvector coordinates of the midpoint matrix.
    pub fn diag_dominant(&self, layout: Option<&ColumnLayout>) -> Result<DiagDominantSystem, ModelError> {
        let eig = crate::linalg::midpoint_eigvectors(&self.midpoint_matrix()?)?;
        let eig = match layout {
            Some(l) => eig.with_layout(l)?,
            None => eig,
        };
        DiagDominantSystem::new(self.clone(), TransformPair::new(eig.vectors)?)
    }

    /// The system in its own coordinates (`T = I`).
    pub fn untransformed(&self) -> DiagDominantSystem {
        DiagDominantSystem::new(self.clone(), TransformPair::identity(self.dim())).expect("identity transform")
    }
}

/// A quasi-linear system expressed in transformed coordinates `x = T z`,
/// `A_z(z) = T⁻¹ A(T z) T`.
#[derive(Debug, Clone)]
pub struct DiagDominantSystem {
    base: QuasiLinearSystem,
    tp: TransformPair,
    z0: IntervalVector,
    mu: Vec<f64>,
}

impl DiagDominantSystem {
    pub fn new(base: QuasiLinearSystem, tp: TransformPair) -> Result<Self, ModelError> {
        if tp.dim() != base.dim() {
            return Err(ModelError::Invalid("transform dimension differs from the system".into()));
        }
        let z0 = crate::linalg::transform_state(&tp, base.x0())?;
        let mu = vec![0.0; base.dim()];
        Ok(Self { base, tp, z0, mu })
    }

    /// Same dynamics with a new initial box (in transformed coordinates).
    pub fn with_initial(&self, z0: IntervalVector) -> Result<Self, ModelError> {
        if z0.len() != self.dim() {
            return Err(ModelError::Invalid("initial box dimension differs from the system".into()));
        }
        Ok(Self { z0, ..self.clone() })
    }

    /// Same dynamics with the right-hand side inflated by `[-μ_i, μ_i]`.
    pub fn with_mu(&self, mu: Vec<f64>) -> Result<Self, ModelError> {
        if mu.len() != self.dim() || mu.iter().any(|m| !(*m >= 0.0)) {
            return Err(ModelError::Invalid("inflation must be a non-negative vector".into()));
        }
        Ok(Self { mu, ..self.clone() })
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn base(&self) -> &QuasiLinearSystem {
        &self.base
    }

    pub fn transform(&self) -> &TransformPair {
        &self.tp
    }

    pub fn z0(&self) -> &IntervalVector {
        &self.z0
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn nu(&self) -> Interval {
        self.base.nu()
    }

    /// `A_z([z])`.
    pub fn eval_a(&self, z: &IntervalVector) -> Result<IntervalMatrix, ModelError> {
        let x = self.tp.to_x(z)?;
        let a = self.base.eval_a(&x)?;
        Ok(self.tp.conjugate(&a)?)
    }

    /// Inflated right-hand side `f̃([z]) = A_z([z]) [z] + [-μ, μ]`.
    pub fn eval_f_tilde(&self, z: &IntervalVector) -> Result<IntervalVector, ModelError> {
        let mut f = self.eval_a(z)?.mul_vec(z)?;
        for (i, &m) in self.mu.iter().enumerate() {
            f[i] = f[i].inflate_sym(m)?;
        }
        Ok(f)
    }

    /// Sum of off-diagonal magnitudes of `A_z([z](0))` per row.
    pub fn off_diagonal_mass(&self) -> Result<Vec<f64>, ModelError> {
        let a = self.eval_a(&self.z0)?;
        Ok((0..a.rows()).map(|i| (0..a.cols()).filter(|&j| j != i).map(|j| a[(i, j)].mag()).sum()).collect())
    }
}

/// Named stock scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    CubicA,
    CubicB,
    BatterySmall,
    BatteryLarge,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::CubicA, Scenario::CubicB, Scenario::BatterySmall, Scenario::BatteryLarge];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::CubicA => "cubic_a",
            Scenario::CubicB => "cubic_b",
            Scenario::BatterySmall => "battery_small",
            Scenario::BatteryLarge => "battery_large",
        }
    }

    pub fn is_battery(&self) -> bool {
        matches!(self, Scenario::BatterySmall | Scenario::BatteryLarge)
    }

    /// Relative inflation of the battery's second closed-loop row and of
    /// entry (3,3).
    pub const BATTERY_INFLATION: (f64, f64) = (0.01, 0.1);

    /// The closed-loop battery model, for battery scenarios.
    pub fn battery_model(&self) -> Option<Result<BatteryModel, ModelError>> {
        let x0 = self.battery_x0()?;
        let (row2, a33) = Self::BATTERY_INFLATION;
        Some(build_battery(&BatteryParams::default(), &BATTERY_EIGENVALUES, row2, a33, true, x0))
    }

    /// System and eigenvector layout used for this scenario.
    pub fn setup(&self) -> Result<(QuasiLinearSystem, Option<ColumnLayout>), ModelError> {
        match self {
            Scenario::CubicA => Ok((build_cubic(CubicCase::A), None)),
            Scenario::CubicB => Ok((build_cubic(CubicCase::B), None)),
            _ => {
                let m = self.battery_model().expect("battery scenario")?;
                Ok((m.system, Some(battery_reference_layout())))
            }
        }
    }

    /// Initial box of the battery scenarios.
    pub fn battery_x0(&self) -> Option<IntervalVector> {
        let b: &[(f64, f64)] = match self {
            Scenario::BatterySmall => &[(0.99, 1.01), (-0.00101, -0.00099), (0.099, 0.101)],
            Scenario::BatteryLarge => &[(0.9, 1.1), (-0.0011, -0.0009), (0.09, 0.11)],
            _ => return None,
        };
        Some(IntervalVector::from_bounds(b).expect("valid literal bounds"))
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
