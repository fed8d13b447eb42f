use serde::Serialize;

use super::{contract_lambda, evaluate_enclosure, iterate_lambda, restart, IterOptions, MlEnclosure, ReachError};
use crate::interval::{Interval, IntervalVector};
use crate::linalg::ColumnLayout;
use crate::model::{DiagDominantSystem, QuasiLinearSystem};

/// How the time axis `[0, t_end]` is covered.
#[derive(Debug, Clone, PartialEq)]
pub enum Slicing {
    /// Consecutive slices of equal length `T`, restarted with inflation.
    Uniform(f64),
    /// Consecutive slices ending at the given increasing breakpoints.
    Grid(Vec<f64>),
    /// Independent enclosures over `[0, T_m]` for each horizon, stitched
    /// step-wise without restarts.
    MultiHorizon(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SimOptions {
    pub iter: IterOptions,
    /// Sub-intervals per slice in the sampled tube.
    pub samples_per_slice: usize,
    pub contractor: bool,
    /// Also enclose every restarted slice from time zero without restart
    /// and intersect; a restarted slice that fails to converge is then
    /// replaced by the anchored enclosure alone.
    pub anchor: bool,
    /// Intersect the transformed run with a run in the original
    /// coordinates (skipped for scalar systems and zero-crossing boxes).
    pub intersect_frames: bool,
    pub layout: Option<ColumnLayout>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            iter: IterOptions::default(),
            samples_per_slice: 16,
            contractor: true,
            anchor: true,
            intersect_frames: true,
            layout: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceResult {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Absolute time of local time zero of `enclosure`.
    pub origin: f64,
    pub enclosure: MlEnclosure,
    /// Enclosure from time zero without restart, valid up to `t_end`;
    /// intersected with `enclosure` when present.
    pub anchor: Option<MlEnclosure>,
    /// Right-hand-side inflation applied on entry.
    pub mu: Vec<f64>,
    /// State box at `t_end`.
    pub z_end: IntervalVector,
    /// Running supremum of `|z_i|` up to `t_end`.
    pub z_sup: Vec<f64>,
}

impl SliceResult {
    /// Whether the enclosure was obtained by restarting at `t_start`.
    pub fn restarted(&self) -> bool {
        self.origin > 0.0
    }

    /// Transformed state box over absolute times `t ⊆ [t_start, t_end]`.
    pub fn evaluate(&self, t: Interval) -> Result<IntervalVector, ReachError> {
        let local = Interval::new(t.lo() - self.origin, t.hi() - self.origin)
            .map_err(|_| ReachError::Domain(format!("time {t} precedes the slice origin")))?;
        let local = Interval::new(local.lo().max(0.0), local.hi().min(self.enclosure.horizon))?;
        let z = evaluate_enclosure(&self.enclosure, local)?;
        match &self.anchor {
            None => Ok(z),
            Some(a) => {
                let za = evaluate_enclosure(a, t)?;
                z.intersect(&za)
                    .map_err(|_| ReachError::EmptyIntersection(format!("restarted {z} and anchored {za} at t = {t}")))
            }
        }
    }
}

/// Rigorous enclosure over the time interval `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeRow {
    pub t: Interval,
    pub z: IntervalVector,
    pub x: IntervalVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tube {
    /// Slices of the transformed run, up to its first failure.
    pub slices: Vec<SliceResult>,
    /// Slices of the run in the original coordinates, if it was attempted.
    pub x_slices: Vec<SliceResult>,
    pub rows: Vec<TubeRow>,
    /// Whether the original-coordinate run contributed to `rows[..].x`.
    pub frames_intersected: bool,
}

impl Tube {
    pub fn t_end(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.t.hi())
    }

    /// State box at time `t`: the intersection of every row covering `t`.
    pub fn point_enclosure(&self, t: f64) -> Option<IntervalVector> {
        self.rows.iter().filter(|r| r.t.contains(t)).map(|r| r.x.clone()).reduce(|a, b| a.intersect(&b).unwrap_or(a))
    }

    /// Transformed-coordinate box at time `t`.
    pub fn point_enclosure_z(&self, t: f64) -> Option<IntervalVector> {
        self.rows.iter().filter(|r| r.t.contains(t)).map(|r| r.z.clone()).reduce(|a, b| a.intersect(&b).unwrap_or(a))
    }

    /// Total Λ-iteration steps over both frames.
    pub fn iterations(&self) -> usize {
        self.slices.iter().chain(&self.x_slices).map(|s| s.enclosure.iterations).sum()
    }
}

/// Verified simulation over `[0, t_end]`.
///
/// The transformed run is intersected row by row with a run in the
/// original coordinates when that is admissible. Rows only one of the two
/// runs reached are taken from that run alone; the first failure is
/// returned when neither covers a row.
pub fn simulate(sys: &QuasiLinearSystem, t_end: f64, slicing: &Slicing, opts: &SimOptions) -> Result<Tube, ReachError> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(ReachError::Domain(format!("final time must be positive, got {t_end}")));
    }
    if opts.samples_per_slice == 0 {
        return Err(ReachError::Domain("at least one sample per slice is needed".into()));
    }
    let plan = Plan::new(t_end, slicing)?;
    let zsys = if sys.dim() == 1 { sys.untransformed() } else { sys.diag_dominant(opts.layout.as_ref())? };
    let zrun = run_frame(&zsys, &plan, opts);
    if zrun.rows.len() == plan.rows(opts) && !(opts.intersect_frames && sys.dim() > 1) {
        return finish(&zsys, zrun, None);
    }
    let try_x = opts.intersect_frames && sys.dim() > 1 && !sys.x0().iter().any(Interval::contains_zero);
    let xrun = try_x.then(|| run_frame(&sys.untransformed(), &plan, opts));
    finish(&zsys, zrun, xrun)
}

fn finish(zsys: &DiagDominantSystem, zrun: FrameRun, xrun: Option<FrameRun>) -> Result<Tube, ReachError> {
    let tp = zsys.transform();
    let empty = Vec::new();
    let xrows = xrun.as_ref().map_or(&empty, |r| &r.rows);
    let total = zrun.rows.len().max(xrows.len());
    let expected = zrun.expected;
    if total < expected {
        let err = zrun.failure.or_else(|| xrun.and_then(|r| r.failure));
        return Err(err.unwrap_or_else(|| ReachError::Domain("incomplete tube".into())));
    }
    let mut rows = Vec::with_capacity(total);
    for i in 0..total {
        let row = match (zrun.rows.get(i), xrows.get(i)) {
            (Some((t, z)), None) => TubeRow { t: *t, x: tp.to_x(z)?, z: z.clone() },
            (None, Some((t, x))) => TubeRow { t: *t, z: tp.to_z(x)?, x: x.clone() },
            (Some((t, z)), Some((tx, x))) => {
                debug_assert_eq!(t, tx);
                let x = tp
                    .to_x(z)?
                    .intersect(x)
                    .map_err(|_| ReachError::EmptyIntersection(format!("frames at t = {t}: {z} and {x}")))?;
                TubeRow { t: *t, z: z.clone(), x }
            }
            (None, None) => unreachable!("row index below both lengths"),
        };
        rows.push(row);
    }
    let frames_intersected = !xrows.is_empty();
    Ok(Tube { slices: zrun.slices, x_slices: xrun.map(|r| r.slices).unwrap_or_default(), rows, frames_intersected })
}

/// Slice boundaries and whether slices restart from their predecessor.
struct Plan {
    bounds: Vec<(f64, f64)>,
    restarting: bool,
}

impl Plan {
    fn new(t_end: f64, slicing: &Slicing) -> Result<Self, ReachError> {
        let chain = |ends: Vec<f64>| {
            let mut prev = 0.0;
            ends.into_iter()
                .map(|e| {
                    let b = (prev, e);
                    prev = e;
                    b
                })
                .collect::<Vec<_>>()
        };
        let ends = match slicing {
            Slicing::Uniform(t) => {
                if !(*t > 0.0) || !t.is_finite() {
                    return Err(ReachError::Domain(format!("slice length must be positive, got {t}")));
                }
                let n = ((t_end / t) - 1e-9).ceil().max(1.0) as usize;
                (1..=n).map(|k| if k == n { t_end } else { k as f64 * t }).collect()
            }
            Slicing::Grid(g) | Slicing::MultiHorizon(g) => {
                let mut ends: Vec<f64> = g.iter().copied().filter(|&e| e < t_end).collect();
                if ends.first().is_some_and(|&e| e <= 0.0) || ends.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(ReachError::Domain("breakpoints must be positive and increasing".into()));
                }
                ends.push(t_end);
                ends
            }
        };
        Ok(Self { bounds: chain(ends), restarting: !matches!(slicing, Slicing::MultiHorizon(_)) })
    }

    fn rows(&self, opts: &SimOptions) -> usize {
        self.bounds.len() * opts.samples_per_slice
    }
}

/// Outcome of one coordinate frame: the converged prefix of slices and
/// rows, and the error that ended it early.
struct FrameRun {
    slices: Vec<SliceResult>,
    rows: Vec<(Interval, IntervalVector)>,
    expected: usize,
    failure: Option<ReachError>,
}

fn run_frame(sys: &DiagDominantSystem, plan: &Plan, opts: &SimOptions) -> FrameRun {
    let mut run = FrameRun { slices: Vec::new(), rows: Vec::new(), expected: plan.rows(opts), failure: None };
    if let Err(e) = extend_frame(sys, plan, opts, &mut run) {
        run.failure = Some(e);
    }
    run
}

fn extend_frame(
    sys: &DiagDominantSystem,
    plan: &Plan,
    opts: &SimOptions,
    run: &mut FrameRun,
) -> Result<(), ReachError> {
    let n = sys.dim();
    let FrameRun { slices, rows, .. } = run;
    let mut z_sup = vec![0.0f64; n];
    // system the previous restarted enclosure was computed with
    let mut prev_sys: Option<DiagDominantSystem> = None;
    for (k, &(t0, t1)) in plan.bounds.iter().enumerate() {
        let anchored = || iterate_lambda(sys, sys.z0(), t1, &opts.iter).map_err(|e| e.at_slice(k));
        let (enclosure, origin, anchor, slice_sys) = match (plan.restarting, slices.last()) {
            (true, Some(prev)) => {
                let next_sys = restart(sys, prev)?;
                let restarted = match iterate_lambda(&next_sys, next_sys.z0(), t1 - t0, &opts.iter) {
                    Ok(e) => Some(e),
                    Err(ReachError::NotConverged { .. }) if opts.anchor => None,
                    Err(e) => return Err(e.at_slice(k)),
                };
                match restarted {
                    Some(mut e) => {
                        if opts.contractor && prev.origin == prev.t_start {
                            if let Some(psys) = &prev_sys {
                                e = contract_with_reference(&e, prev, psys, &next_sys, opts)?;
                            }
                        }
                        let anchor = if opts.anchor { anchored().ok() } else { None };
                        (e, t0, anchor, Some(next_sys))
                    }
                    None => (anchored()?, 0.0, None, None),
                }
            }
            _ => (anchored()?, 0.0, None, (t0 == 0.0).then(|| sys.clone())),
        };
        let slice = SliceResult {
            index: k,
            t_start: t0,
            t_end: t1,
            origin,
            mu: slice_sys.as_ref().map_or_else(|| vec![0.0; n], |s| s.mu().to_vec()),
            enclosure,
            anchor,
            z_end: IntervalVector::zeros(n),
            z_sup: Vec::new(),
        };
        let whole = slice.evaluate(Interval::new(t0, t1)?)?;
        for (s, w) in z_sup.iter_mut().zip(whole.iter()) {
            *s = s.max(w.mag());
        }
        let m = opts.samples_per_slice;
        let span = Interval::new(t0, t1)?;
        let mut slice_rows = Vec::with_capacity(m);
        for j in 0..m {
            let t = Interval::new(edge(span, j, m), edge(span, j + 1, m))?;
            slice_rows.push((t, slice.evaluate(t)?));
        }
        let z_end = slice.evaluate(Interval::point(t1))?;
        rows.extend(slice_rows);
        slices.push(SliceResult { z_end, z_sup: z_sup.clone(), ..slice });
        prev_sys = slice_sys;
    }
    Ok(())
}

fn edge(iv: Interval, j: usize, m: usize) -> f64 {
    if j == 0 {
        iv.lo()
    } else if j == m {
        iv.hi()
    } else {
        (iv.lo() + (iv.hi() - iv.lo()) * (j as f64 / m as f64)).clamp(iv.lo(), iv.hi())
    }
}

/// Re-runs the previous slice with a horizon that also covers the current
/// one and uses it as the reference enclosure of the contractor. A
/// reference that fails to converge leaves the enclosure unchanged.
fn contract_with_reference(
    curr: &MlEnclosure,
    prev: &SliceResult,
    prev_sys: &DiagDominantSystem,
    sys: &DiagDominantSystem,
    opts: &SimOptions,
) -> Result<MlEnclosure, ReachError> {
    let offset = prev.t_end - prev.origin;
    let reach = offset + curr.horizon;
    let reference = match iterate_lambda(prev_sys, &prev.enclosure.z0, reach, &opts.iter) {
        Ok(r) => r,
        Err(ReachError::NotConverged { .. } | ReachError::SpecFun(_)) => return Ok(curr.clone()),
        Err(e) => return Err(e),
    };
    let window = Interval::new(0.0, curr.horizon)?;
    let reference_window = Interval::new(offset, reach)?;
    contract_lambda(curr, &reference, sys, window, reference_window)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::interval::IntervalMatrix;
    use crate::model::{build_cubic, ConstantRule, CubicCase};

    #[test]
    fn uniform_plan_covers_the_horizon() {
        let p = Plan::new(1.0, &Slicing::Uniform(0.25)).unwrap();
        assert_eq!(p.bounds, vec![(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)]);
        let p = Plan::new(1.0, &Slicing::Uniform(0.3)).unwrap();
        assert_eq!(p.bounds.last(), Some(&(0.8999999999999999, 1.0)));
    }

    #[test]
    fn grid_plan_rejects_unsorted_breakpoints() {
        assert!(Plan::new(1.0, &Slicing::Grid(vec![0.5, 0.2])).is_err());
    }

    fn slow_linear(nu: f64) -> QuasiLinearSystem {
        let rule = ConstantRule::new(IntervalMatrix::from_points(1, 1, &[-0.1]).unwrap());
        let x0 = IntervalVector::from_bounds(&[(0.9, 1.0)]).unwrap();
        QuasiLinearSystem::new(Interval::point(nu), Arc::new(rule), x0).unwrap()
    }

    #[test]
    fn second_slice_starts_at_the_first_end_box() {
        let opts = SimOptions { contractor: false, anchor: false, ..SimOptions::default() };
        let tube = simulate(&slow_linear(0.99), 2.0, &Slicing::Uniform(1.0), &opts).unwrap();
        let (first, second) = (&tube.slices[0], &tube.slices[1]);
        let end = evaluate_enclosure(&first.enclosure, Interval::point(1.0)).unwrap();
        assert_eq!(first.z_end, end);
        assert_eq!(second.enclosure.z0, end);
        assert!(second.restarted() && second.origin == 1.0);
        assert!(second.mu[0] > 0.0 && first.mu[0] == 0.0);
        assert!(second.z_sup[0] >= first.z_sup[0]);
    }

    #[test]
    fn divergent_restart_falls_back_to_the_anchor() {
        let sys = build_cubic(CubicCase::A);
        let strict = SimOptions { anchor: false, ..SimOptions::default() };
        assert!(matches!(
            simulate(&sys, 0.5, &Slicing::Uniform(0.25), &strict),
            Err(ReachError::NotConverged { slice: 1, .. })
        ));
        let tube = simulate(&sys, 0.5, &Slicing::Uniform(0.25), &SimOptions::default()).unwrap();
        assert!(!tube.slices[1].restarted());
        assert_eq!(tube.slices[1].enclosure.horizon, 0.5);
    }

    #[test]
    fn anchored_and_restarted_enclosures_are_intersected() {
        let tube = simulate(&slow_linear(0.99), 2.0, &Slicing::Uniform(1.0), &SimOptions::default()).unwrap();
        let s = &tube.slices[1];
        assert!(s.restarted() && s.anchor.is_some());
        let t = Interval::new(1.5, 1.5).unwrap();
        let restarted = evaluate_enclosure(&s.enclosure, Interval::point(0.5)).unwrap();
        let anchored = evaluate_enclosure(s.anchor.as_ref().unwrap(), t).unwrap();
        let both = s.evaluate(t).unwrap();
        assert!(both.subset_of(&restarted) && both.subset_of(&anchored));
    }

    #[test]
    fn rows_tile_the_time_axis() {
        let sys = build_cubic(CubicCase::B);
        let tube = simulate(&sys, 1.0, &Slicing::Uniform(0.5), &SimOptions::default()).unwrap();
        assert_eq!(tube.rows.len(), 32);
        assert_eq!(tube.rows[0].t.lo(), 0.0);
        for w in tube.rows.windows(2) {
            assert_eq!(w[0].t.hi(), w[1].t.lo());
        }
        assert_eq!(tube.t_end(), 1.0);
    }

    #[test]
    fn original_frame_covers_horizons_the_transformed_run_misses() {
        use crate::model::{battery_reference_layout, build_battery, BatteryParams, Scenario, BATTERY_EIGENVALUES};
        let x0 = Scenario::BatteryLarge.battery_x0().unwrap();
        let m = build_battery(&BatteryParams::default(), &BATTERY_EIGENVALUES, 0.01, 0.1, true, x0).unwrap();
        let opts = SimOptions { layout: Some(battery_reference_layout()), ..SimOptions::default() };
        let horizons = Slicing::MultiHorizon((1..10).map(f64::from).collect());
        let tube = simulate(&m.system, 10.0, &horizons, &opts).unwrap();
        assert!(tube.slices.len() < 10 && tube.x_slices.len() == 10);
        assert_eq!(tube.t_end(), 10.0);
        let strict = SimOptions { intersect_frames: false, ..opts };
        assert!(matches!(simulate(&m.system, 10.0, &horizons, &strict), Err(ReachError::NotConverged { .. })));
    }
}
