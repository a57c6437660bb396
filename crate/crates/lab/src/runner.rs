//! Runs an experiment and writes its outputs.
//!
//! Each run goes to `<out>/<experiment>-<hash prefix>/`: one point CSV and
//! one curve CSV per sweep, a fit CSV and a quartile table per batch of
//! estimates, `summary.txt`, and finally `record.json`, which lists every file
//! with its digest. A directory that already holds a record is left alone.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use comic_core::estimation::{sweep_particle_numbers, SweepCurve};
use comic_core::prelude::*;

use crate::config::{ExperimentConfig, ResolvedConfig, Series, SeriesKind};
use crate::error::{LabError, Result};
use crate::record::*;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output root; falls back to the config's `output_dir`, then `runs`.
    pub out: Option<PathBuf>,
    /// Worker threads; all cores when unset.
    pub jobs: Option<usize>,
    /// Overrides the config's master seed.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub record_path: PathBuf,
    pub record: RunRecord,
}

/// Runs `f` on a pool of `jobs` threads (or the global pool).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().map_err(|e| LabError::Pool(e.to_string()))?;
        return Ok(pool.install(f));
    }
    let _ = jobs;
    Ok(f())
}

pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<RunOutcome> {
    let resolved = config.resolve(options.seed)?;
    let root = options.out.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("runs"));
    with_jobs(options.jobs, || run_resolved(&resolved, &root))?
}

pub fn run_resolved(config: &ResolvedConfig, root: &Path) -> Result<RunOutcome> {
    let hash = config.hash();
    let dir = root.join(format!("{}-{}", config.experiment, &hash[..12]));
    let record_path = dir.join(RECORD_FILE);
    if record_path.exists() {
        return Err(LabError::RecordExists(record_path));
    }
    std::fs::create_dir_all(&dir).map_err(LabError::io(&dir))?;

    let started_at = chrono::Utc::now().to_rfc3339();
    let clock = Instant::now();
    let mut series = Vec::with_capacity(config.series.len());
    for s in &config.series {
        series.push(run_series(s, config.master_seed, &dir)?);
    }
    let status = if series.iter().any(|s| s.failures() > 0) { RunStatus::Partial } else { RunStatus::Complete };

    let mut record = RunRecord {
        record_version: RECORD_VERSION,
        software: Software::current(),
        experiment: config.experiment,
        config_hash: hash,
        config: config.clone(),
        started_at,
        finished_at: String::new(),
        wall_seconds: 0.0,
        status,
        series,
        files: Vec::new(),
    };
    std::fs::write(dir.join(SUMMARY_FILE), summary(&record)).map_err(LabError::io(dir.join(SUMMARY_FILE)))?;
    let mut names: Vec<&str> = record.series.iter().flat_map(|s| s.files.iter().map(String::as_str)).collect();
    names.push(SUMMARY_FILE);
    record.files = names.into_iter().map(|n| file_entry(&dir, n)).collect::<Result<_>>()?;
    record.finished_at = chrono::Utc::now().to_rfc3339();
    record.wall_seconds = clock.elapsed().as_secs_f64();
    create_new(&record_path, &serde_json::to_vec_pretty(&record)?)?;
    Ok(RunOutcome { dir, record_path, record })
}

fn run_series(s: &Series, master_seed: u64, dir: &Path) -> Result<SeriesRecord> {
    let mut rec = SeriesRecord {
        name: s.name.clone(),
        kind: s.kind,
        deterministic: s.is_deterministic(master_seed),
        files: Vec::new(),
        sweep: None,
        estimate: None,
        error: None,
    };
    match s.kind {
        SeriesKind::Sweep => match sweep_particle_numbers(Execution::default(), &s.sweep_spec(master_seed)) {
            Ok((points, curve)) => {
                let points: Vec<PointRecord> = points.iter().map(PointRecord::from).collect();
                let (pf, cf) = (format!("{}.csv", s.name), format!("{}_curve.csv", s.name));
                write_points(&dir.join(&pf), &points, s.criterion)?;
                write_curve(&dir.join(&cf), &curve)?;
                rec.files = vec![pf, cf];
                rec.sweep = Some(SweepRecord { argmin: Argmin::of(&curve), points, curve });
            }
            Err(e) => rec.error = Some(e.to_string()),
        },
        SeriesKind::Estimate => {
            let fits = Execution::default().map(s.realizations, |r| fit(s, master_seed, r));
            let ok: Vec<&EstimationResult> = fits.iter().filter_map(|f| f.result.as_ref()).collect();
            let v: Vec<f64> = ok.iter().map(|r| r.velocity).collect();
            let d: Vec<f64> = ok.iter().map(|r| r.diffusion).collect();
            let quartiles: Vec<Quartiles> = [("velocity", v), ("diffusion", d)].iter().filter_map(|(p, x)| Quartiles::of(p, x)).collect();
            let (ff, qf) = (format!("{}.csv", s.name), format!("{}_quartiles.csv", s.name));
            write_fits(&dir.join(&ff), &fits, s.criterion)?;
            write_quartiles(&dir.join(&qf), &quartiles)?;
            rec.files = vec![ff, qf];
            rec.estimate = Some(EstimateRecord { n: s.n.unwrap_or(0), fits, quartiles });
        }
    }
    Ok(rec)
}

/// Fit number `realization` of an estimate series.
pub fn fit(s: &Series, master_seed: u64, realization: usize) -> FitRecord {
    let (spec, data_seed) = s.estimation_spec(master_seed, realization);
    let result = s
        .sweep_spec(master_seed)
        .observations(realization)
        .and_then(|obs| estimate_parameters(Execution::Sequential, &obs, &s.params, &s.domain, &spec));
    let (result, error) = match result {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    FitRecord { realization, model_seed: spec.seed, data_seed, result, error }
}

fn curve_table(out: &mut String, curve: &SweepCurve) {
    let _ = writeln!(out, "  {:>8} {:>14} {:>14} {:>12} {:>6}", "n", "aic", "comic", "entropy", "ok");
    for p in &curve.points {
        let _ = writeln!(out, "  {:>8} {:>14.6} {:>14.6} {:>12.6} {:>3}/{}", p.n, p.aic, p.comic, p.entropy_term, p.successes, p.successes + p.failures);
    }
}

pub fn summary(record: &RunRecord) -> String {
    let mut out = String::new();
    let c = &record.config;
    let _ = writeln!(out, "experiment {}  master seed {}  config {}", c.experiment, c.master_seed, &record.config_hash[..12]);
    let _ = writeln!(out, "status {:?}", record.status);
    for (s, cfg) in record.series.iter().zip(&c.series) {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "[{}] {:?} {:?} criterion={} k={} alpha={} R={}",
            s.name, cfg.kind, cfg.method, cfg.criterion, cfg.k, cfg.alpha, cfg.realizations
        );
        if let Some(e) = &s.error {
            let _ = writeln!(out, "  FAILED: {e}");
        }
        if let Some(sw) = &s.sweep {
            match &sw.argmin {
                Some(a) => {
                    let _ = writeln!(out, "  argmin n = {} (bracket {}..{}), comic = {:.6}", a.n, a.bracket.0, a.bracket.1, a.comic);
                }
                None => {
                    let _ = writeln!(out, "  no successful points");
                }
            }
            curve_table(&mut out, &sw.curve);
        }
        if let Some(est) = &s.estimate {
            let failed = est.fits.iter().filter(|f| f.error.is_some()).count();
            let _ = writeln!(out, "  n = {}, {} fits, {} failed", est.n, est.fits.len(), failed);
            for q in &est.quartiles {
                let _ = writeln!(
                    out,
                    "  {:<9} min {:.6}  q1 {:.6}  median {:.6}  q3 {:.6}  max {:.6}",
                    q.parameter, q.min, q.q1, q.median, q.q3, q.max
                );
            }
        }
    }
    out
}
