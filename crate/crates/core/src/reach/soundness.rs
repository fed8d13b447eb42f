//! Monte-Carlo containment check against the Grünwald-Letnikov oracle.
//!
//! Point trajectories with random initial state, random constant
//! parameters and a random constant order are simulated with full memory
//! and compared against the tube at every step. The oracle's
//! discretization error is absorbed by a relative allowance, not bounded.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ReachError, Tube};
use crate::interval::Interval;
use crate::model::{sample, QuasiLinearSystem};
use crate::oracles::{gl_simulate, GlTrajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundnessOptions {
    pub runs: usize,
    pub h: f64,
    /// Run `i` draws from a ChaCha8 stream seeded with `seed + i`.
    pub seed: u64,
    /// A sample `x` may leave its box by `allowance · (1 + |x|)`.
    pub allowance: f64,
}

impl Default for SoundnessOptions {
    fn default() -> Self {
        Self { runs: 200, h: 1e-3, seed: 0x5eed, allowance: 5e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub run: usize,
    pub t: f64,
    pub component: usize,
    pub value: f64,
    pub enclosure: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub runs: usize,
    /// Runs without any violation.
    pub contained: usize,
    pub samples: usize,
    pub violations: Vec<Violation>,
    /// Largest distance outside a box relative to `1 + |x|`, over all samples.
    pub worst_excess: f64,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// GL trajectories of randomly realized point systems over `[0, t_end]`.
pub fn sample_trajectories(
    sys: &QuasiLinearSystem,
    t_end: f64,
    opts: &SoundnessOptions,
) -> Result<Vec<GlTrajectory>, ReachError> {
    (0..opts.runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let x0: Vec<f64> = sys.x0().iter().map(|iv| sample(iv, &mut rng)).collect();
            let nu = sample(&sys.nu(), &mut rng);
            let f = sys.rule().realize(&mut rng);
            Ok(gl_simulate(nu, |x| f(x), &x0, opts.h, t_end)?)
        })
        .collect()
}

/// Checks every trajectory sample up to the tube's end against the
/// intersection of all rows covering its time.
pub fn check_tube(tube: &Tube, trajectories: &[GlTrajectory], opts: &SoundnessOptions) -> SoundnessReport {
    let t_end = tube.t_end();
    let mut violations = Vec::new();
    let mut contained = 0;
    let mut samples = 0;
    let mut worst = f64::NEG_INFINITY;
    for (run, tr) in trajectories.iter().enumerate() {
        let mut first = 0;
        let mut clean = true;
        for (k, x) in tr.states.iter().enumerate() {
            let t = tr.time(k);
            if t > t_end {
                break;
            }
            while first < tube.rows.len() && tube.rows[first].t.hi() < t {
                first += 1;
            }
            let Some(row) = covering_box(tube, first, t) else { continue };
            samples += 1;
            for (c, (&v, iv)) in x.iter().zip(row.iter()).enumerate() {
                let excess = (iv.lo() - v).max(v - iv.hi()) / (1.0 + v.abs());
                worst = worst.max(excess);
                if excess > opts.allowance {
                    clean = false;
                    violations.push(Violation { run, t, component: c, value: v, enclosure: *iv });
                }
            }
        }
        contained += usize::from(clean);
    }
    SoundnessReport { runs: trajectories.len(), contained, samples, violations, worst_excess: worst }
}

fn covering_box(tube: &Tube, first: usize, t: f64) -> Option<Vec<Interval>> {
    let mut acc: Option<Vec<Interval>> = None;
    for row in tube.rows[first..].iter().take_while(|r| r.t.lo() <= t) {
        if !row.t.contains(t) {
            continue;
        }
        acc = Some(match acc {
            None => row.x.iter().copied().collect(),
            Some(prev) => prev.iter().zip(row.x.iter()).map(|(a, b)| a.intersect(b).unwrap_or(*a)).collect(),
        });
    }
    acc
}

/// [`sample_trajectories`] followed by [`check_tube`].
pub fn monte_carlo(
    sys: &QuasiLinearSystem,
    tube: &Tube,
    opts: &SoundnessOptions,
) -> Result<SoundnessReport, ReachError> {
    let trajectories = sample_trajectories(sys, tube.t_end(), opts)?;
    Ok(check_tube(tube, &trajectories, opts))
}
