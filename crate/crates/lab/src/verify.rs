//! Checks a run record against its files and against fresh recomputation.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use comic_core::estimation::evaluate_point;
use comic_core::prelude::*;

use crate::config::{Series, SeriesKind};
use crate::error::{LabError, Result};
use crate::record::*;
use crate::runner::fit;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub record: PathBuf,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        write!(f, "{}", if self.passed() { "record verified" } else { "record FAILED verification" })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Share of points recomputed from their seeds.
    pub fraction: f64,
    /// Relative tolerance for seeded stochastic series; deterministic series
    /// must match exactly.
    pub rel_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { fraction: 0.1, rel_tol: 1e-12 }
    }
}

fn check(name: impl Into<String>, problem: Option<String>, ok: impl Into<String>) -> Check {
    let name = name.into();
    match problem {
        Some(detail) => Check { name, passed: false, detail },
        None => Check { name, passed: true, detail: ok.into() },
    }
}

pub fn verify_record(path: &Path, options: VerifyOptions) -> Result<VerifyReport> {
    let record = RunRecord::load(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut checks = vec![manifest(&record, &dir)];

    let hash = record.config.hash();
    checks.push(check(
        "config hash",
        (hash != record.config_hash).then(|| format!("record says {}, config hashes to {hash}", record.config_hash)),
        "matches",
    ));

    if record.series.len() != record.config.series.len() {
        return Err(LabError::BadRecord { path: path.into(), reason: "series do not match the config".into() });
    }
    for (rec, cfg) in record.series.iter().zip(&record.config.series) {
        if rec.name != cfg.name || rec.kind != cfg.kind {
            return Err(LabError::BadRecord { path: path.into(), reason: format!("series {:?} does not match the config", rec.name) });
        }
        if let Some(sw) = &rec.sweep {
            checks.push(csv_matches(rec, sw, &dir));
            checks.push(recompute_sweep(cfg, sw, record.config.master_seed, options));
        }
        if let Some(est) = &rec.estimate {
            checks.push(recompute_fits(cfg, est, record.config.master_seed, options));
        }
    }
    Ok(VerifyReport { record: path.into(), checks })
}

fn manifest(record: &RunRecord, dir: &Path) -> Check {
    let mut missing = Vec::new();
    let mut changed = Vec::new();
    for f in &record.files {
        match file_entry(dir, &f.path) {
            Ok(now) if now.sha256 == f.sha256 => {}
            Ok(_) => changed.push(f.path.clone()),
            Err(_) => missing.push(f.path.clone()),
        }
    }
    let listed: BTreeSet<&str> = record.files.iter().map(|f| f.path.as_str()).collect();
    let unlisted: Vec<String> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok()?.file_name().into_string().ok())
                .filter(|n| n.ends_with(".csv") && !listed.contains(n.as_str()))
                .collect()
        })
        .unwrap_or_default();
    let mut diff = Vec::new();
    if !missing.is_empty() {
        diff.push(format!("missing: {}", missing.join(", ")));
    }
    if !changed.is_empty() {
        diff.push(format!("modified: {}", changed.join(", ")));
    }
    if !unlisted.is_empty() {
        diff.push(format!("not in manifest: {}", unlisted.join(", ")));
    }
    check("manifest", (!diff.is_empty()).then(|| diff.join("; ")), format!("{} files intact", record.files.len()))
}

fn same(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x == y || (x.is_nan() && y.is_nan()),
        (None, None) => true,
        _ => false,
    }
}

fn show(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "empty".into())
}

fn csv_matches(rec: &SeriesRecord, sw: &SweepRecord, dir: &Path) -> Check {
    let name = format!("{} csv", rec.name);
    let file = format!("{}.csv", rec.name);
    let rows = match read_points(&dir.join(&file)) {
        Ok(r) => r,
        Err(e) => return check(name, Some(format!("{file}: {e}")), ""),
    };
    let by_key: HashMap<(usize, usize), &PointRecord> = sw.points.iter().map(|p| ((p.n, p.realization), p)).collect();
    let problem = (|| {
        if rows.len() != sw.points.len() {
            return Some(format!("{file} has {} rows, record has {} points", rows.len(), sw.points.len()));
        }
        for row in &rows {
            let Some(p) = by_key.get(&(row.n, row.realization)) else {
                return Some(format!("{file} line {}: n={}, realization {} is not in the record", row.line, row.n, row.realization));
            };
            let expected = report_values(p.report.as_ref());
            for (col, (got, want)) in VALUE_COLUMNS.iter().zip(row.values.iter().zip(&expected)) {
                if !same(*got, *want) {
                    return Some(format!(
                        "n={}, realization {}, column {col}: csv {} vs record {}",
                        row.n,
                        row.realization,
                        show(*got),
                        show(*want)
                    ));
                }
            }
            if row.seed != p.model_seed {
                return Some(format!("n={}, realization {}, column seed: csv {} vs record {}", row.n, row.realization, row.seed, p.model_seed));
            }
        }
        None
    })();
    check(name, problem, format!("{} rows agree with the record", rows.len()))
}

/// Evenly spread picks over the `(n, realization)` list, at least one per
/// series and covering the grid before repeating an `n`.
fn stratified(points: &[PointRecord], fraction: f64) -> Vec<&PointRecord> {
    let mut grid: Vec<usize> = points.iter().map(|p| p.n).collect();
    grid.dedup();
    let want = ((points.len() as f64 * fraction).ceil() as usize).clamp(1, points.len());
    (0..want)
        .map(|j| {
            let (g, round) = if want <= grid.len() { (j * grid.len() / want, j) } else { (j % grid.len(), j / grid.len()) };
            let at_n: Vec<&PointRecord> = points.iter().filter(|p| p.n == grid[g]).collect();
            at_n[round % at_n.len()]
        })
        .collect()
}

fn close(a: f64, b: f64, exact: bool, rel: f64) -> bool {
    if exact {
        a == b
    } else {
        a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
    }
}

fn recompute_sweep(cfg: &Series, sw: &SweepRecord, master_seed: u64, options: VerifyOptions) -> Check {
    let spec = cfg.sweep_spec(master_seed);
    let exact = spec.is_deterministic();
    let picks = stratified(&sw.points, options.fraction);
    let name = format!("{} recompute", cfg.name);
    for p in &picks {
        let fresh = evaluate_point(Execution::default(), &spec, p.n, p.realization);
        let problem = match (&fresh, &p.report) {
            (Ok(f), Some(r)) => report_values(Some(r))
                .iter()
                .zip(report_values(Some(&f.report)))
                .zip(VALUE_COLUMNS)
                .find(|((a, b), _)| match (a, b) {
                    (Some(a), Some(b)) => !close(*a, *b, exact, options.rel_tol),
                    (a, b) => a.is_some() != b.is_some(),
                })
                .map(|((a, b), col)| format!("column {col}: record {} vs recomputed {}", show(*a), show(b))),
            (Err(e), None) => (Some(e.to_string()) != p.error).then(|| format!("error changed: {e}")),
            (Ok(_), None) => Some("record holds an error, recomputation succeeded".into()),
            (Err(e), Some(_)) => Some(format!("recomputation failed: {e}")),
        };
        if let Some(detail) = problem {
            return check(name, Some(format!("n={}, realization {}: {detail}", p.n, p.realization)), "");
        }
    }
    let how = if exact { "exactly" } else { "within tolerance" };
    check(name, None, format!("{} of {} points reproduced {how}", picks.len(), sw.points.len()))
}

fn recompute_fits(cfg: &Series, est: &EstimateRecord, master_seed: u64, options: VerifyOptions) -> Check {
    let name = format!("{} recompute", cfg.name);
    if cfg.kind != SeriesKind::Estimate || est.fits.is_empty() {
        return check(name, Some("no fits recorded".into()), "");
    }
    let want = ((est.fits.len() as f64 * options.fraction).ceil() as usize).clamp(1, est.fits.len());
    let exact = cfg.is_deterministic(master_seed);
    for j in 0..want {
        let stored = &est.fits[j * est.fits.len() / want];
        let fresh = fit(cfg, master_seed, stored.realization);
        let problem = match (&fresh.result, &stored.result) {
            (Some(a), Some(b)) => [("velocity", a.velocity, b.velocity), ("diffusion", a.diffusion, b.diffusion), ("value", a.value, b.value)]
                .into_iter()
                .find(|(_, x, y)| !close(*x, *y, exact, options.rel_tol))
                .map(|(col, x, y)| format!("column {col}: record {} vs recomputed {}", fmt_f64(y), fmt_f64(x))),
            (None, None) => None,
            _ => Some("success and failure disagree".into()),
        };
        if let Some(detail) = problem {
            return check(name, Some(format!("realization {}: {detail}", stored.realization)), "");
        }
    }
    check(name, None, format!("{want} of {} fits reproduced", est.fits.len()))
}
