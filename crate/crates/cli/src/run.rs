//! Scenario execution shared by `simulate` and `verify`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use fracreach::model::BatteryModel;
use fracreach::reach::{monte_carlo, simulate, ReachError, SimOptions, SoundnessOptions, SoundnessReport, Tube};

use crate::config::{ConfigError, ScenarioConfig};
use crate::output::{write_manifest, write_tube_csv, Manifest, SliceSummary};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    NotConverged(ReachError),
    #[error("{0}")]
    Reach(ReachError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("soundness violated: {contained}/{runs} trajectories contained")]
    Soundness { contained: usize, runs: usize },
}

impl From<ReachError> for RunError {
    fn from(e: ReachError) -> Self {
        match e {
            ReachError::NotConverged { .. } | ReachError::NotConvergedEnclosure => RunError::NotConverged(e),
            ReachError::ZeroCrossingInitialState { .. } | ReachError::Domain(_) => {
                RunError::Config(ConfigError::Invalid { field: "scenario", message: e.to_string() })
            }
            other => RunError::Reach(other),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::NotConverged(_) => 3,
            RunError::Soundness { .. } => 4,
            RunError::Reach(_) | RunError::Io { .. } => 1,
        }
    }
}

pub struct Outcome {
    pub tube: Tube,
    pub battery: Option<BatteryModel>,
    pub report: Option<SoundnessReport>,
    pub manifest: Manifest,
}

/// Simulates the configured scenario and, if `mc_runs` is set, checks
/// sampled trajectories against the tube.
pub fn execute(cfg: &ScenarioConfig) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let (sys, layout) = cfg.system()?;
    let battery = match cfg.scenario.stock().and_then(|s| s.battery_model()) {
        Some(m) => Some(m.map_err(|e| ConfigError::Invalid { field: "scenario", message: e.to_string() })?),
        None => None,
    };
    let opts = SimOptions { samples_per_slice: cfg.samples_per_slice, layout, ..SimOptions::default() };
    let tube = simulate(&sys, cfg.t_end, &cfg.slicing.to_slicing(), &opts)?;
    let report = match cfg.mc_runs {
        Some(runs) => {
            let mc = SoundnessOptions { runs, seed: cfg.seed, ..SoundnessOptions::default() };
            Some(monte_carlo(&sys, &tube, &mc)?)
        }
        None => None,
    };
    let manifest = Manifest {
        scenario: cfg.scenario.as_str().to_owned(),
        nu: sys.nu(),
        x0: sys.x0().clone(),
        z0: tube.slices.first().map_or_else(|| sys.x0().clone(), |s| s.enclosure.z0.clone()),
        t_end: cfg.t_end,
        slicing: cfg.slicing.describe(),
        samples_per_slice: cfg.samples_per_slice,
        slices: tube.slices.iter().map(SliceSummary::from).collect(),
        original_frame_slices: tube.x_slices.iter().map(SliceSummary::from).collect(),
        frames_intersected: tube.frames_intersected,
        iterations: tube.iterations(),
        rows: tube.rows.len(),
        seed: cfg.seed,
        soundness: report.as_ref().map(Into::into),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(Outcome { tube, battery, report, manifest })
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(|source| RunError::Io { path: path.to_owned(), source })
}

/// Writes the CSV to `output_path` (standard output when unset) and the
/// manifest next to it.
pub fn emit(cfg: &ScenarioConfig, out: &Outcome, manifest_path: Option<&Path>) -> Result<(), RunError> {
    let io_err = |path: &Path| {
        let path = path.to_owned();
        move |source| RunError::Io { path, source }
    };
    match &cfg.output_path {
        Some(p) => {
            let mut w = create(p)?;
            write_tube_csv(&mut w, &out.tube, out.battery.as_ref()).and_then(|_| w.flush()).map_err(io_err(p))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_tube_csv(&mut w, &out.tube, out.battery.as_ref())
                .and_then(|_| w.flush())
                .map_err(io_err(Path::new("<stdout>")))?;
        }
    }
    let derived = cfg.output_path.as_ref().map(|p| p.with_extension("json"));
    if let Some(p) = manifest_path.map(Path::to_path_buf).or(derived) {
        let mut w = create(&p)?;
        write_manifest(&mut w, &out.manifest).and_then(|_| w.flush()).map_err(io_err(&p))?;
    }
    Ok(())
}
