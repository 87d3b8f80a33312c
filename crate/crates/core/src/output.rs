//! Plot-ready serialization: trajectories and reports as CSV (header row,
//! '.' decimal separator), local-time events as JSON lines. All numbers go
//! through f64's default `Display`, which prints the shortest string that
//! parses back to the same value — so identical runs serialize to identical
//! bytes.

use std::io::Write;

use serde::Serialize;

use crate::diagnostics::BoundReport;
use crate::sampler::{LocalTimeEvent, Trajectory};
use crate::Result;

pub const TRAJECTORY_HEADER_PREFIX: &str = "step";

/// `step,x0,x1,…` — one row per state, steps_n + 1 data rows.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, w: &mut W) -> Result<()> {
    let dim = traj.states.first().map_or(0, |s| s.len());
    write!(w, "{TRAJECTORY_HEADER_PREFIX}")?;
    for d in 0..dim {
        write!(w, ",x{d}")?;
    }
    writeln!(w)?;
    for (k, s) in traj.states.iter().enumerate() {
        write!(w, "{k}")?;
        for v in s {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EventRow<'a> {
    k: usize,
    t: f64,
    mass: f64,
    nu: &'a [f64],
}

/// One JSON object per boundary event: `{"k":…,"t":…,"mass":…,"nu":[…]}`.
pub fn write_events_jsonl<W: Write>(events: &[LocalTimeEvent], w: &mut W) -> Result<()> {
    for e in events {
        let row = EventRow { k: e.step_index, t: e.time, mass: e.mass, nu: &e.normal };
        serde_json::to_writer(&mut *w, &row)
            .map_err(|err| crate::Error::Numeric(format!("event serialization: {err}")))?;
        writeln!(w)?;
    }
    Ok(())
}

/// `bound_name,theoretical,empirical,stderr,pass` with a header row.
pub fn write_bound_reports_csv<W: Write>(reports: &[BoundReport], w: &mut W) -> Result<()> {
    writeln!(w, "{}", BoundReport::CSV_HEADER)?;
    for r in reports {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// One volume-experiment result row.
#[derive(Debug, Clone)]
pub struct VolumeRow {
    pub body: String,
    pub n: usize,
    pub sampler: &'static str,
    pub phases: usize,
    pub samples: usize,
    pub volume: f64,
    pub normalized: f64,
    /// Wall-clock seconds: the only nondeterministic field; byte-level
    /// output comparisons must exclude it.
    pub seconds: f64,
    pub seed: u64,
}

impl VolumeRow {
    pub const CSV_HEADER: &'static str = "body,n,sampler,phases,samples,volume,normalized,seconds,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3},{}",
            self.body,
            self.n,
            self.sampler,
            self.phases,
            self.samples,
            self.volume,
            self.normalized,
            self.seconds,
            self.seed
        )
    }
}

pub fn write_volume_rows_csv<W: Write>(rows: &[VolumeRow], w: &mut W) -> Result<()> {
    writeln!(w, "{}", VolumeRow::CSV_HEADER)?;
    for r in rows {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}
