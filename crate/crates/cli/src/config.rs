//! Scenario configuration: a TOML file merged with command-line flags.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fracreach::model::{ConstantRule, QuasiLinearSystem, Scenario};
use fracreach::reach::Slicing;
use fracreach::{Interval, IntervalMatrix, IntervalVector};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    CubicA,
    CubicB,
    BatterySmall,
    BatteryLarge,
    Custom,
}

impl std::str::FromStr for ScenarioName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "custom" {
            return Ok(ScenarioName::Custom);
        }
        s.parse::<Scenario>().map(ScenarioName::from).map_err(|_| {
            format!("unknown scenario '{s}' (expected cubic_a, cubic_b, battery_small, battery_large or custom)")
        })
    }
}

impl From<Scenario> for ScenarioName {
    fn from(s: Scenario) -> Self {
        match s {
            Scenario::CubicA => ScenarioName::CubicA,
            Scenario::CubicB => ScenarioName::CubicB,
            Scenario::BatterySmall => ScenarioName::BatterySmall,
            Scenario::BatteryLarge => ScenarioName::BatteryLarge,
        }
    }
}

impl ScenarioName {
    pub fn stock(self) -> Option<Scenario> {
        match self {
            ScenarioName::CubicA => Some(Scenario::CubicA),
            ScenarioName::CubicB => Some(Scenario::CubicB),
            ScenarioName::BatterySmall => Some(Scenario::BatterySmall),
            ScenarioName::BatteryLarge => Some(Scenario::BatteryLarge),
            ScenarioName::Custom => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.stock().map_or("custom", |s| s.name())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SlicingSpec {
    Uniform(f64),
    MultiHorizon(Vec<f64>),
    Grid(Vec<f64>),
}

impl SlicingSpec {
    pub fn to_slicing(&self) -> Slicing {
        match self {
            SlicingSpec::Uniform(t) => Slicing::Uniform(*t),
            SlicingSpec::MultiHorizon(h) => Slicing::MultiHorizon(h.clone()),
            SlicingSpec::Grid(g) => Slicing::Grid(g.clone()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SlicingSpec::Uniform(t) => format!("uniform T = {t}"),
            SlicingSpec::MultiHorizon(h) => format!("multi-horizon {h:?}"),
            SlicingSpec::Grid(g) => format!("grid {g:?}"),
        }
    }
}

/// A linear system `x^(ν) = [A] x` with interval entries.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSystem {
    pub nu: [f64; 2],
    /// Rows of `[lo, hi]` pairs.
    pub a: Vec<Vec<[f64; 2]>>,
    pub x0: Vec<[f64; 2]>,
}

impl CustomSystem {
    pub fn build(&self) -> Result<QuasiLinearSystem, ConfigError> {
        let iv =
            |field: &'static str, [lo, hi]: [f64; 2]| Interval::new(lo, hi).map_err(|e| invalid(field, e.to_string()));
        let n = self.x0.len();
        if n == 0 || self.a.len() != n || self.a.iter().any(|r| r.len() != n) {
            return Err(invalid("custom.a", format!("must be {n}x{n} to match custom.x0")));
        }
        let entries = self.a.iter().flatten().map(|&e| iv("custom.a", e)).collect::<Result<Vec<_>, _>>()?;
        let a = IntervalMatrix::new(n, n, entries).map_err(|e| invalid("custom.a", e.to_string()))?;
        let x0 = IntervalVector::new(self.x0.iter().map(|&e| iv("custom.x0", e)).collect::<Result<_, _>>()?);
        QuasiLinearSystem::new(iv("custom.nu", self.nu)?, Arc::new(ConstantRule::new(a)), x0)
            .map_err(|e| invalid("custom", e.to_string()))
    }
}

/// File form; every field optional so that flags can complete it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<ScenarioName>,
    pub slicing: Option<SlicingSpec>,
    pub t_end: Option<f64>,
    pub samples_per_slice: Option<usize>,
    pub mc_runs: Option<usize>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub custom: Option<CustomSystem>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse { path: path.to_owned(), message: e.to_string() })
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<ScenarioName>,
    pub slicing: Option<SlicingSpec>,
    pub t_end: Option<f64>,
    pub samples_per_slice: Option<usize>,
    pub mc_runs: Option<usize>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    pub slicing: SlicingSpec,
    pub t_end: f64,
    pub samples_per_slice: usize,
    /// Monte-Carlo containment runs; `simulate` checks only when set.
    pub mc_runs: Option<usize>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub custom: Option<CustomSystem>,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

/// Horizon and slicing each stock scenario is usually run with.
pub fn default_run(s: ScenarioName) -> (f64, SlicingSpec) {
    match s {
        ScenarioName::BatterySmall | ScenarioName::BatteryLarge => {
            (10.0, SlicingSpec::MultiHorizon((1..=10).map(f64::from).collect()))
        }
        _ => (1.0, SlicingSpec::Uniform(0.25)),
    }
}

impl ScenarioConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self, ConfigError> {
        let scenario = flags.scenario.or(file.scenario).ok_or_else(|| invalid("scenario", "is required"))?;
        let (t_default, slicing_default) = default_run(scenario);
        let cfg = ScenarioConfig {
            scenario,
            slicing: flags.slicing.or(file.slicing).unwrap_or(slicing_default),
            t_end: flags.t_end.or(file.t_end).unwrap_or(t_default),
            samples_per_slice: flags.samples_per_slice.or(file.samples_per_slice).unwrap_or(16),
            mc_runs: flags.mc_runs.or(file.mc_runs),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            output_path: flags.output_path.or(file.output_path),
            custom: file.custom,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(invalid("t_end", format!("must be positive, got {}", self.t_end)));
        }
        if self.samples_per_slice < 2 {
            return Err(invalid("samples_per_slice", format!("must be at least 2, got {}", self.samples_per_slice)));
        }
        let values: &[f64] = match &self.slicing {
            SlicingSpec::Uniform(t) => std::slice::from_ref(t),
            SlicingSpec::MultiHorizon(v) | SlicingSpec::Grid(v) => v,
        };
        if values.is_empty() || values.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(invalid("slicing", "slice lengths and horizons must be positive"));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("slicing", "horizons and breakpoints must increase"));
        }
        if self.scenario == ScenarioName::Custom && self.custom.is_none() {
            return Err(invalid("custom", "scenario `custom` needs a [custom] table"));
        }
        Ok(())
    }

    /// The system together with the eigenvector layout to use.
    pub fn system(&self) -> Result<(QuasiLinearSystem, Option<fracreach::linalg::ColumnLayout>), ConfigError> {
        match self.scenario.stock() {
            Some(s) => s.setup().map_err(|e| invalid("scenario", e.to_string())),
            None => Ok((self.custom.as_ref().expect("validated").build()?, None)),
        }
    }
}

/// Comma-separated positive numbers, e.g. `"1,2,3"`.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| format!("not a number: '{}'", p.trim()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<FileConfig, toml::de::Error> {
        toml::from_str(text)
    }

    #[test]
    fn file_fields_and_slicing_forms() {
        let f = parse("scenario = \"cubic_b\"\nt_end = 2.0\n[slicing]\nmulti_horizon = [0.5, 1.0]\n").unwrap();
        assert_eq!(f.scenario, Some(ScenarioName::CubicB));
        assert_eq!(f.slicing, Some(SlicingSpec::MultiHorizon(vec![0.5, 1.0])));
        let f = parse("[slicing]\nuniform = 0.125").unwrap();
        assert_eq!(f.slicing, Some(SlicingSpec::Uniform(0.125)));
    }

    #[test]
    fn unknown_fields_are_rejected_with_their_line() {
        let err = parse("scenario = \"cubic_a\"\nt_ned = 1.0\n").unwrap_err().to_string();
        assert!(err.contains("t_ned") && err.contains("line 2"), "{err}");
    }

    #[test]
    fn flags_override_the_file() {
        let file = FileConfig { scenario: Some(ScenarioName::CubicA), t_end: Some(3.0), ..FileConfig::default() };
        let flags = Overrides { t_end: Some(0.5), ..Overrides::default() };
        let cfg = ScenarioConfig::resolve(file, flags).unwrap();
        assert_eq!(cfg.t_end, 0.5);
        assert_eq!(cfg.slicing, SlicingSpec::Uniform(0.25));
    }

    #[test]
    fn invalid_values_name_their_field() {
        let base = || FileConfig { scenario: Some(ScenarioName::CubicA), ..FileConfig::default() };
        let cases = [
            (Overrides { t_end: Some(-1.0), ..Overrides::default() }, "t_end"),
            (Overrides { samples_per_slice: Some(1), ..Overrides::default() }, "samples_per_slice"),
            (Overrides { slicing: Some(SlicingSpec::Uniform(0.0)), ..Overrides::default() }, "slicing"),
            (Overrides { slicing: Some(SlicingSpec::Grid(vec![0.5, 0.2])), ..Overrides::default() }, "slicing"),
        ];
        for (flags, field) in cases {
            match ScenarioConfig::resolve(base(), flags) {
                Err(ConfigError::Invalid { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected error on {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn custom_system_is_built_from_the_table() {
        let f = parse(
            "scenario = \"custom\"\n[custom]\nnu = [0.7, 0.7]\na = [[[-1.0, -0.9], [0.0, 0.0]], [[0.1, 0.1], [-2.0, -2.0]]]\nx0 = [[1.0, 1.1], [0.5, 0.6]]\n",
        )
        .unwrap();
        let cfg = ScenarioConfig::resolve(f, Overrides::default()).unwrap();
        let (sys, layout) = cfg.system().unwrap();
        assert_eq!(sys.dim(), 2);
        assert!(layout.is_none());
    }

    #[test]
    fn lists_parse() {
        assert_eq!(parse_list("1, 2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        assert!(parse_list("1,x").is_err());
    }
}
