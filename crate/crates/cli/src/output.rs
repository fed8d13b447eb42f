//! Tube CSV and run manifest.

use std::io::{self, Write};

use fracreach::model::{battery_output_feedback, BatteryModel};
use fracreach::reach::{SliceResult, SoundnessReport, Tube};
use fracreach::{Interval, IntervalVector};
use serde::Serialize;

/// `σ` slabs used for the terminal voltage columns.
pub const OUTPUT_SUBDIVISIONS: usize = 64;

pub fn csv_header(dim: usize, voltage: bool) -> String {
    let mut h = String::from("t_lo,t_hi");
    for i in 1..=dim {
        h.push_str(&format!(",x{i}_lo,x{i}_hi"));
    }
    if voltage {
        h.push_str(",v_lo,v_hi");
    }
    h
}

/// One line per tube row; battery runs append the terminal voltage.
pub fn write_tube_csv<W: Write>(mut out: W, tube: &Tube, battery: Option<&BatteryModel>) -> io::Result<()> {
    let dim = tube.rows.first().map_or(0, |r| r.x.len());
    writeln!(out, "{}", csv_header(dim, battery.is_some()))?;
    for row in &tube.rows {
        let mut line = format!("{:e},{:e}", row.t.lo(), row.t.hi());
        for x in row.x.iter() {
            line.push_str(&format!(",{:e},{:e}", x.lo(), x.hi()));
        }
        if let Some(m) = battery {
            let v = battery_output_feedback(&row.x, &m.k, &m.params, OUTPUT_SUBDIVISIONS)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
            line.push_str(&format!(",{:e},{:e}", v.lo(), v.hi()));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SliceSummary {
    pub index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub iterations: usize,
    pub restarted: bool,
    pub lambdas: IntervalVector,
    pub mu: Vec<f64>,
}

impl From<&SliceResult> for SliceSummary {
    fn from(s: &SliceResult) -> Self {
        Self {
            index: s.index,
            t_start: s.t_start,
            t_end: s.t_end,
            iterations: s.enclosure.iterations,
            restarted: s.restarted(),
            lambdas: s.enclosure.lambdas.clone(),
            mu: s.mu.clone(),
        }
    }
}

/// Violations kept in the manifest.
const LISTED_VIOLATIONS: usize = 20;

#[derive(Debug, Serialize)]
pub struct SoundnessSummary {
    pub runs: usize,
    pub contained: usize,
    pub samples: usize,
    pub worst_excess: f64,
    pub violation_count: usize,
    pub violations: Vec<fracreach::reach::Violation>,
}

impl From<&SoundnessReport> for SoundnessSummary {
    fn from(r: &SoundnessReport) -> Self {
        Self {
            runs: r.runs,
            contained: r.contained,
            samples: r.samples,
            worst_excess: r.worst_excess,
            violation_count: r.violations.len(),
            violations: r.violations.iter().take(LISTED_VIOLATIONS).cloned().collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub scenario: String,
    pub nu: Interval,
    pub x0: IntervalVector,
    pub z0: IntervalVector,
    pub t_end: f64,
    pub slicing: String,
    pub samples_per_slice: usize,
    pub slices: Vec<SliceSummary>,
    pub original_frame_slices: Vec<SliceSummary>,
    pub frames_intersected: bool,
    pub iterations: usize,
    pub rows: usize,
    pub seed: u64,
    pub soundness: Option<SoundnessSummary>,
    pub wall_time_s: f64,
}

pub fn write_manifest<W: Write>(out: W, m: &Manifest) -> io::Result<()> {
    serde_json::to_writer_pretty(out, m).map_err(io::Error::other)
}
