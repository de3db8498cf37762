//! CSV and JSON renderings. CSV floats carry 17 significant digits,
//! use `.` as the decimal point and rows end in `\n`.

use std::io::Write;

use crossing_core::montecarlo::TraceRow;
use serde::Serialize;

use crate::error::CliError;

pub const TRACE_HEADER: [&str; 3] = ["trials", "running_mean", "running_stderr"];
pub const COMPARE_HEADER: [&str; 8] = ["t", "analytic", "branch", "oracle", "mc_mean", "mc_stderr", "abs_diff", "z"];
pub const CURVE_HEADER: [&str; 3] = ["t", "f", "branch"];
pub const EVAL_HEADER: [&str; 8] = [
    "t",
    "value",
    "branch",
    "error_bound",
    "subsets_evaluated",
    "subsets_pruned",
    "series_terms",
    "head_corrected",
];
pub const ORACLE_HEADER: [&str; 4] = ["t", "value", "tail_bound", "dims_used"];
pub const VOLUME_HEADER: [&str; 5] = ["m", "t", "value", "cancellation", "reflected"];

pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Writes a header and rows of preformatted fields.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = csv_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn trace_rows(rows: &[TraceRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| vec![r.trials.to_string(), real(r.running_mean), real(r.running_stderr)])
        .collect()
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct EvalJson {
    pub seq: String,
    pub t: f64,
    pub value: f64,
    pub branch: String,
    pub error_bound: f64,
    pub subsets_evaluated: u64,
    pub subsets_pruned: u64,
    pub series_terms: usize,
    pub head_corrected: bool,
}

#[derive(Debug, Serialize)]
pub struct StatsJson {
    pub seq: String,
    pub t: f64,
    pub seed: u64,
    pub block: u64,
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub min_n: u64,
    pub max_n: u64,
}

#[derive(Debug, Serialize)]
pub struct OracleJson {
    pub seq: String,
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
    pub dims_used: usize,
}

#[derive(Debug, Serialize)]
pub struct VolumeJson {
    pub seq: String,
    pub m: usize,
    pub t: f64,
    pub value: f64,
    pub cancellation: f64,
    pub reflected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub t: f64,
    pub analytic: f64,
    pub branch: String,
    pub oracle: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub abs_diff: f64,
    pub z: f64,
}

impl CompareRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            real(self.t),
            real(self.analytic),
            self.branch.clone(),
            real(self.oracle),
            real(self.mc_mean),
            real(self.mc_stderr),
            real(self.abs_diff),
            real(self.z),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub f: f64,
    pub branch: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TracePoint {
    pub trials: u64,
    pub running_mean: f64,
    pub running_stderr: f64,
}

impl From<&TraceRow> for TracePoint {
    fn from(r: &TraceRow) -> Self {
        Self {
            trials: r.trials,
            running_mean: r.running_mean,
            running_stderr: r.running_stderr,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CurveJson {
    pub seq: String,
    pub curve: Vec<CurvePoint>,
    pub trace_t: f64,
    pub trace: Vec<TracePoint>,
}
