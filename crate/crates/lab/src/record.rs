//! Run records and the CSV files they index.

use std::io::Write;
use std::path::Path;

use comic_core::estimation::{SweepCurve, SweepPoint};
use comic_core::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{hex, ExperimentId, ResolvedConfig, SeriesKind};
use crate::error::{LabError, Result};

pub const RECORD_VERSION: u32 = 1;
pub const RECORD_FILE: &str = "record.json";
pub const SUMMARY_FILE: &str = "summary.txt";

pub const POINT_HEADER: [&str; 9] = ["n", "realization", "aic", "aicc", "comic", "comicc", "entropy_term", "criterion_kind", "seed"];
pub const CURVE_HEADER: [&str; 8] = ["n", "successes", "failures", "aic", "aicc", "comic", "comicc", "entropy_term"];
pub const ESTIMATE_HEADER: [&str; 9] =
    ["realization", "velocity", "diffusion", "value", "iterations", "evaluations", "converged", "criterion_kind", "seed"];
pub const QUARTILE_HEADER: [&str; 7] = ["parameter", "count", "min", "q1", "median", "q3", "max"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Software {
    pub name: String,
    pub version: String,
}

impl Software {
    pub fn current() -> Self {
        Self { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Complete,
    /// Some points or series failed; their outputs are incomplete.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the record's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub n: usize,
    pub realization: usize,
    pub model_seed: u64,
    pub data_seed: u64,
    pub report: Option<FitnessReport>,
    pub estimate: Option<EstimationResult>,
    pub error: Option<String>,
}

impl From<&SweepPoint> for PointRecord {
    fn from(p: &SweepPoint) -> Self {
        let (report, estimate, error) = match &p.result {
            Ok(r) => (Some(r.report), r.estimate.clone(), None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        Self { n: p.n, realization: p.realization, model_seed: p.model_seed, data_seed: p.data_seed, report, estimate, error }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Argmin {
    pub n: usize,
    pub index: usize,
    pub comic: f64,
    /// Grid neighbours of the minimum.
    pub bracket: (usize, usize),
}

impl Argmin {
    pub fn of(curve: &SweepCurve) -> Option<Self> {
        let index = curve.argmin_index_by(|p| p.comic)?;
        Some(Self { n: curve.points[index].n, index, comic: curve.points[index].comic, bracket: curve.bracket()? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub points: Vec<PointRecord>,
    pub curve: SweepCurve,
    pub argmin: Option<Argmin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub realization: usize,
    pub model_seed: u64,
    pub data_seed: u64,
    pub result: Option<EstimationResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub parameter: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl Quartiles {
    /// Linear interpolation between order statistics.
    pub fn of(parameter: &str, values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(v.len() - 1);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Self { parameter: parameter.into(), count: v.len(), min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub n: usize,
    pub fits: Vec<FitRecord>,
    pub quartiles: Vec<Quartiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub name: String,
    pub kind: SeriesKind,
    pub deterministic: bool,
    pub files: Vec<String>,
    pub sweep: Option<SweepRecord>,
    pub estimate: Option<EstimateRecord>,
    /// Set when the whole series failed.
    pub error: Option<String>,
}

impl SeriesRecord {
    pub fn failures(&self) -> usize {
        let sweep = self.sweep.as_ref().map_or(0, |s| s.points.iter().filter(|p| p.error.is_some()).count());
        let fits = self.estimate.as_ref().map_or(0, |e| e.fits.iter().filter(|f| f.error.is_some()).count());
        sweep + fits + usize::from(self.error.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub record_version: u32,
    pub software: Software,
    pub experiment: ExperimentId,
    pub config_hash: String,
    pub config: ResolvedConfig,
    pub started_at: String,
    pub finished_at: String,
    pub wall_seconds: f64,
    pub status: RunStatus,
    pub series: Vec<SeriesRecord>,
    pub files: Vec<FileEntry>,
}

impl RunRecord {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
        serde_json::from_str(&text).map_err(|e| LabError::BadRecord { path: path.into(), reason: e.to_string() })
    }

    pub fn series(&self, name: &str) -> Option<&SeriesRecord> {
        self.series.iter().find(|s| s.name == name)
    }
}

pub fn file_entry(dir: &Path, name: &str) -> Result<FileEntry> {
    let path = dir.join(name);
    let bytes = std::fs::read(&path).map_err(LabError::io(&path))?;
    Ok(FileEntry { path: name.into(), sha256: hex(&Sha256::digest(&bytes)), bytes: bytes.len() as u64 })
}

/// Full-precision decimal: 17 significant digits, so the value round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(LabError::io(path))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

/// One row per `(n, realization)`; failed points keep their keys and leave
/// the values empty.
pub fn write_points(path: &Path, points: &[PointRecord], criterion: CriterionKind) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(POINT_HEADER)?;
    for p in points {
        let r = p.report.as_ref();
        w.write_record([
            p.n.to_string(),
            p.realization.to_string(),
            fmt_opt(r.map(|r| r.aic)),
            fmt_opt(r.and_then(|r| r.aicc)),
            fmt_opt(r.map(|r| r.comic)),
            fmt_opt(r.and_then(|r| r.comicc)),
            fmt_opt(r.map(|r| r.entropy_term)),
            criterion.to_string(),
            p.model_seed.to_string(),
        ])?;
    }
    w.flush().map_err(LabError::io(path))
}

pub fn write_curve(path: &Path, curve: &SweepCurve) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(CURVE_HEADER)?;
    for p in &curve.points {
        let has = p.successes > 0;
        w.write_record([
            p.n.to_string(),
            p.successes.to_string(),
            p.failures.to_string(),
            fmt_opt(has.then_some(p.aic)),
            fmt_opt(p.aicc.filter(|_| has)),
            fmt_opt(has.then_some(p.comic)),
            fmt_opt(p.comicc.filter(|_| has)),
            fmt_opt(has.then_some(p.entropy_term)),
        ])?;
    }
    w.flush().map_err(LabError::io(path))
}

pub fn write_fits(path: &Path, fits: &[FitRecord], criterion: CriterionKind) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(ESTIMATE_HEADER)?;
    for f in fits {
        let r = f.result.as_ref();
        w.write_record([
            f.realization.to_string(),
            fmt_opt(r.map(|r| r.velocity)),
            fmt_opt(r.map(|r| r.diffusion)),
            fmt_opt(r.map(|r| r.value)),
            r.map(|r| r.iterations.to_string()).unwrap_or_default(),
            r.map(|r| r.evaluations.to_string()).unwrap_or_default(),
            r.map(|r| r.converged.to_string()).unwrap_or_default(),
            criterion.to_string(),
            f.model_seed.to_string(),
        ])?;
    }
    w.flush().map_err(LabError::io(path))
}

pub fn write_quartiles(path: &Path, rows: &[Quartiles]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(QUARTILE_HEADER)?;
    for q in rows {
        w.write_record([
            q.parameter.clone(),
            q.count.to_string(),
            fmt_f64(q.min),
            fmt_f64(q.q1),
            fmt_f64(q.median),
            fmt_f64(q.q3),
            fmt_f64(q.max),
        ])?;
    }
    w.flush().map_err(LabError::io(path))
}

/// A parsed row of a point file.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub line: u64,
    pub n: usize,
    pub realization: usize,
    /// `aic, aicc, comic, comicc, entropy_term`, empty cells as `None`.
    pub values: [Option<f64>; 5],
    pub criterion_kind: String,
    pub seed: u64,
}

pub const VALUE_COLUMNS: [&str; 5] = ["aic", "aicc", "comic", "comicc", "entropy_term"];

pub fn report_values(r: Option<&FitnessReport>) -> [Option<f64>; 5] {
    match r {
        Some(r) => [Some(r.aic), r.aicc, Some(r.comic), r.comicc, Some(r.entropy_term)],
        None => [None; 5],
    }
}

pub fn read_points(path: &Path) -> std::result::Result<Vec<PointRow>, String> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let header: Vec<String> = rdr.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
    if header != POINT_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |col: &str| format!("line {line}: cannot parse column {col}");
        let num = |i: usize| -> std::result::Result<Option<f64>, String> {
            match &rec[i] {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(POINT_HEADER[i])),
            }
        };
        rows.push(PointRow {
            line,
            n: rec[0].parse().map_err(|_| bad("n"))?,
            realization: rec[1].parse().map_err(|_| bad("realization"))?,
            values: [num(2)?, num(3)?, num(4)?, num(5)?, num(6)?],
            criterion_kind: rec[7].to_string(),
            seed: rec[8].parse().map_err(|_| bad("seed"))?,
        });
    }
    Ok(rows)
}

/// Writes `bytes` to a new file, refusing to replace an existing one.
pub fn create_new(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::OpenOptions::new().write(true).create_new(true).open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AlreadyExists {
            LabError::RecordExists(path.into())
        } else {
            LabError::Io { path: path.into(), source: e }
        }
    })?;
    f.write_all(bytes).map_err(LabError::io(path))
}
