//! Per-frame report tables (CSV) and their JSON mirror with aggregates.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use regar_core::{metrics::difference_db, sdr, segment, FrameLayout};
use serde_json::{json, Map, Value};

pub const COLUMNS: [&str; 8] = [
    "frame_index",
    "sdr_db",
    "delta_sdr_db",
    "consistency_sq",
    "outer_iter",
    "objective",
    "inner_iters",
    "wall_ms",
];

/// One table row. Empty cells are quantities that do not apply (for example
/// SDR without a reference).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameRow {
    pub frame_index: usize,
    pub sdr_db: Option<f64>,
    pub delta_sdr_db: Option<f64>,
    pub consistency_sq: Option<f64>,
    pub outer_iter: Option<usize>,
    pub objective: Option<f64>,
    pub inner_iters: Option<usize>,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Aggregate {
    pub channels: usize,
    pub frames: usize,
    /// Full-signal SDR averaged over channels.
    pub sdr_db: Option<f64>,
    pub delta_sdr_db: Option<f64>,
    pub mean_frame_sdr_db: Option<f64>,
    pub mean_frame_delta_sdr_db: Option<f64>,
    /// `½d_Γ²` summed over frames.
    pub consistency_sq: Option<f64>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<FrameRow>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("csv") => Ok(Self::Csv),
            Some("json") => Ok(Self::Json),
            _ => bail!("report path {} must end in .csv or .json", path.display()),
        }
    }
}

/// Shortest round-trip decimal, with `inf`, `-inf` and `nan` for the
/// non-finite values.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn real_json(v: Option<f64>) -> Value {
    match v {
        None => Value::Null,
        Some(x) if x.is_finite() => json!(x),
        Some(x) => Value::String(format_real(x)),
    }
}

/// Mean of the values that are present; `None` when there are none.
pub fn mean_db(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.into_iter().flatten().collect();
    if present.is_empty() {
        return None;
    }
    if present.iter().all(|v| *v == f64::INFINITY) {
        return Some(f64::INFINITY);
    }
    Some(present.iter().sum::<f64>() / present.len() as f64)
}

/// SDR of every frame over its real samples; frames with a silent reference
/// get `None`.
pub fn frame_sdr(reference: &[f64], estimate: &[f64], layout: &FrameLayout) -> Result<Vec<Option<f64>>> {
    let refs = segment(reference, layout)?;
    let ests = segment(estimate, layout)?;
    Ok((0..layout.n_frames)
        .map(|k| {
            let n = layout.valid_len(k);
            sdr(&refs[k][..n], &ests[k][..n]).ok()
        })
        .collect())
}

/// Per-frame `sdr(estimate) − sdr(degraded)`.
pub fn frame_delta_sdr(
    reference: &[f64],
    degraded: &[f64],
    estimate: &[f64],
    layout: &FrameLayout,
) -> Result<Vec<Option<f64>>> {
    let out = frame_sdr(reference, estimate, layout)?;
    let input = frame_sdr(reference, degraded, layout)?;
    Ok(out.into_iter().zip(input).map(|(o, i)| Some(difference_db(o?, i?))).collect())
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn real_cell(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[FrameRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record([
            r.frame_index.to_string(),
            real_cell(r.sdr_db),
            real_cell(r.delta_sdr_db),
            real_cell(r.consistency_sq),
            cell(r.outer_iter),
            real_cell(r.objective),
            cell(r.inner_iters),
            real_cell(r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_json(report: &Report) -> Value {
    let frames: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            m.insert("frame_index".into(), json!(r.frame_index));
            m.insert("sdr_db".into(), real_json(r.sdr_db));
            m.insert("delta_sdr_db".into(), real_json(r.delta_sdr_db));
            m.insert("consistency_sq".into(), real_json(r.consistency_sq));
            m.insert("outer_iter".into(), json!(r.outer_iter));
            m.insert("objective".into(), real_json(r.objective));
            m.insert("inner_iters".into(), json!(r.inner_iters));
            m.insert("wall_ms".into(), real_json(r.wall_ms));
            Value::Object(m)
        })
        .collect();
    let a = &report.aggregate;
    json!({
        "columns": COLUMNS,
        "frames": frames,
        "aggregate": {
            "channels": a.channels,
            "frames": a.frames,
            "sdr_db": real_json(a.sdr_db),
            "delta_sdr_db": real_json(a.delta_sdr_db),
            "mean_frame_sdr_db": real_json(a.mean_frame_sdr_db),
            "mean_frame_delta_sdr_db": real_json(a.mean_frame_delta_sdr_db),
            "consistency_sq": real_json(a.consistency_sq),
            "wall_seconds": real_json(Some(a.wall_seconds)),
        }
    })
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    let format = ReportFormat::from_path(path)?;
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut out = BufWriter::new(file);
    match format {
        ReportFormat::Csv => write_csv(&report.rows, &mut out)?,
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &to_json(report))?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()?;
    Ok(())
}
