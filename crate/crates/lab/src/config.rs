//! Experiment configuration files.
//!
//! A config names an experiment and, optionally, the series to run. Canonical
//! experiments (`E1`..`E6`) supply their own series; `custom` needs an explicit
//! list. Unknown keys are rejected.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use comic_core::estimation::{Reestimate, Solver};
use comic_core::mtpt::{KernelOptions, NormalizationRule, Readout};
use comic_core::optimize::NelderMeadOptions;
use comic_core::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::experiments;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    #[serde(rename = "custom")]
    Custom,
}

impl ExperimentId {
    pub const CANONICAL: [ExperimentId; 6] =
        [ExperimentId::E1, ExperimentId::E2, ExperimentId::E3, ExperimentId::E4, ExperimentId::E5, ExperimentId::E6];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::E1 => "E1",
            ExperimentId::E2 => "E2",
            ExperimentId::E3 => "E3",
            ExperimentId::E4 => "E4",
            ExperimentId::E5 => "E5",
            ExperimentId::E6 => "E6",
            ExperimentId::Custom => "custom",
        }
    }
}

impl std::fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Criterion values over a grid of particle counts.
    Sweep,
    /// Repeated `(v, D)` fits at one particle count.
    Estimate,
}

fn default_params() -> AdeParams {
    AdeParams { velocity: 0.0, diffusion: 1.0, release: 0.0, final_time: 1.0 }
}

fn default_k() -> usize {
    30
}

fn default_spacing() -> SpacingMode {
    SpacingMode::Uniform
}

fn default_dt() -> f64 {
    0.1
}

fn default_criterion() -> CriterionKind {
    CriterionKind::IidGaussian
}

fn one() -> usize {
    1
}

fn default_theta0() -> [f64; 2] {
    [0.5, 0.5]
}

/// One sweep or batch of estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    /// Used in output file names: letters, digits, `_` and `-`.
    pub name: String,
    pub kind: SeriesKind,
    #[serde(default = "default_params")]
    pub params: AdeParams,
    #[serde(default)]
    pub domain: Domain,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_spacing")]
    pub spacing: SpacingMode,
    #[serde(default)]
    pub alpha: f64,
    pub method: Method,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default)]
    pub normalization: NormalizationRule,
    #[serde(default)]
    pub readout: Readout,
    #[serde(default)]
    pub kernel: KernelOptions,
    #[serde(default = "default_criterion")]
    pub criterion: CriterionKind,
    /// Sweep only.
    #[serde(default)]
    pub entropy: EntropyRule,
    /// Sweep only; defaults to twelve log-spaced counts from 100 to 10^4.6.
    #[serde(default)]
    pub grid: Option<Vec<usize>>,
    /// Estimate only: particle count of every fit.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub realizations: usize,
    /// Draw new observations for every realization.
    #[serde(default)]
    pub resample_data: bool,
    /// Sweep only: fit `(v, D)` at each point before scoring.
    #[serde(default)]
    pub reestimate: bool,
    #[serde(default = "default_theta0")]
    pub theta0: [f64; 2],
    #[serde(default)]
    pub optimizer: NelderMeadOptions,
}

impl Series {
    /// A series with every optional field at its default.
    pub fn new(name: impl Into<String>, kind: SeriesKind, method: Method) -> Self {
        Self {
            name: name.into(),
            kind,
            params: default_params(),
            domain: Domain::default(),
            k: default_k(),
            spacing: default_spacing(),
            alpha: 0.0,
            method,
            dt: default_dt(),
            placement: Placement::Uniform,
            normalization: NormalizationRule::default(),
            readout: Readout::default(),
            kernel: KernelOptions::default(),
            criterion: default_criterion(),
            entropy: EntropyRule::Uniform,
            grid: None,
            n: None,
            realizations: 1,
            resample_data: false,
            reestimate: false,
            theta0: default_theta0(),
            optimizer: NelderMeadOptions::default(),
        }
    }

    pub fn solver(&self) -> Solver {
        Solver {
            method: self.method,
            dt: self.dt,
            placement: self.placement,
            normalization: self.normalization,
            readout: self.readout,
            kernel: self.kernel,
            align_release: true,
        }
    }

    pub fn sweep_spec(&self, master_seed: u64) -> SweepSpec {
        SweepSpec {
            params: self.params,
            domain: self.domain,
            k: self.k,
            spacing: self.spacing,
            alpha: self.alpha,
            solver: self.solver(),
            criterion: self.criterion,
            entropy: self.entropy,
            grid: self.grid.clone().unwrap_or_else(comic_core::estimation::default_sweep_grid),
            realizations: self.realizations,
            master_seed,
            resample_data: self.resample_data,
            estimate: self.reestimate.then_some(Reestimate { theta0: self.theta0, options: self.optimizer }),
        }
    }

    /// Settings for fit `realization`, with its seeds from the same scheme as
    /// sweeps.
    pub fn estimation_spec(&self, master_seed: u64, realization: usize) -> (EstimationSpec, u64) {
        let seeds = self.sweep_spec(master_seed).seeds(realization);
        let mut spec = EstimationSpec::new(self.solver(), self.n.unwrap_or(0), self.criterion, seeds.0);
        spec.theta0 = self.theta0;
        spec.options = self.optimizer;
        (spec, seeds.1)
    }

    /// Same numbers for every realization.
    pub fn is_deterministic(&self, master_seed: u64) -> bool {
        self.sweep_spec(master_seed).is_deterministic()
    }

    fn problems(&self, out: &mut Vec<String>) {
        let at = |msg: String| format!("series {:?}: {msg}", self.name);
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            out.push(at("name must be non-empty and use only letters, digits, '_' or '-'".into()));
        }
        match self.kind {
            SeriesKind::Sweep => {
                if self.n.is_some() {
                    out.push(at("'n' applies to estimate series; sweeps use 'grid'".into()));
                }
                if let Err(e) = self.sweep_spec(0).validate() {
                    out.push(at(e.to_string()));
                }
            }
            SeriesKind::Estimate => {
                if self.grid.is_some() || self.reestimate || self.entropy != EntropyRule::Uniform {
                    out.push(at("'grid', 'reestimate' and 'entropy' apply to sweep series only".into()));
                }
                let min_n = if self.method == Method::Mtpt { 2 } else { 1 };
                match self.n {
                    None => out.push(at("estimate series need 'n'".into())),
                    Some(n) if n < min_n => out.push(at(format!("n must be at least {min_n}"))),
                    _ => {}
                }
                let mut probe = self.sweep_spec(0);
                probe.grid = vec![self.n.unwrap_or(min_n).max(min_n)];
                if let Err(e) = probe.validate() {
                    out.push(at(e.to_string()));
                }
                if !(self.theta0[1] > 0.0) {
                    out.push(at("initial diffusion must be positive".into()));
                }
            }
        }
        if !self.domain.contains(self.params.release) {
            out.push(at("release point lies outside the domain".into()));
        }
    }
}

/// The file as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentId,
    #[serde(default)]
    pub master_seed: u64,
    /// Root directory for run outputs; `--out` takes precedence.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Replaces the canonical series of the experiment.
    #[serde(default)]
    pub series: Option<Vec<Series>>,
    /// Overrides the realization count of every series that has more than one.
    #[serde(default)]
    pub realizations: Option<usize>,
}

impl ExperimentConfig {
    pub fn canonical(experiment: ExperimentId) -> Self {
        Self { schema_version: SCHEMA_VERSION, experiment, master_seed: 0, output_dir: None, series: None, realizations: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(LabError::ConfigParse)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
        Self::from_json(&text)
    }

    /// Expands the series and applies the seed; `seed` overrides the file.
    pub fn resolve(&self, seed: Option<u64>) -> Result<ResolvedConfig> {
        let mut problems = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            problems.push(format!("schema_version must be {SCHEMA_VERSION}, got {}", self.schema_version));
        }
        let mut series = match (&self.series, self.experiment) {
            (Some(s), _) => s.clone(),
            (None, ExperimentId::Custom) => {
                problems.push("custom experiments need a 'series' list".into());
                Vec::new()
            }
            (None, id) => experiments::canonical_series(id),
        };
        if let Some(r) = self.realizations {
            if r == 0 {
                problems.push("realizations must be at least 1".into());
            }
            series.iter_mut().filter(|s| s.realizations > 1).for_each(|s| s.realizations = r.max(1));
        }
        if series.is_empty() && self.experiment != ExperimentId::Custom || self.series.as_ref().is_some_and(|s| s.is_empty()) {
            problems.push("'series' must not be empty".into());
        }
        let mut names = HashSet::new();
        for s in &series {
            if !names.insert(s.name.as_str()) {
                problems.push(format!("duplicate series name {:?}", s.name));
            }
            s.problems(&mut problems);
        }
        if !problems.is_empty() {
            return Err(LabError::InvalidConfig(problems));
        }
        Ok(ResolvedConfig {
            schema_version: SCHEMA_VERSION,
            experiment: self.experiment,
            master_seed: seed.unwrap_or(self.master_seed),
            series,
        })
    }
}

/// Everything that determines a run's numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub schema_version: u32,
    pub experiment: ExperimentId,
    pub master_seed: u64,
    pub series: Vec<Series>,
}

impl ResolvedConfig {
    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex(&Sha256::digest(&bytes))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        let err = ExperimentConfig::from_json(r#"{"schema_version": 1, "experiment": "E1", "seed": 3}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("unknown field `seed`"), "{err}");
        let err = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "experiment": "custom",
                "series": [{"name": "a", "kind": "sweep", "method": "mtpt", "bins": 3}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("unknown field `bins`"));
    }

    #[test]
    fn reports_every_problem() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 2, "experiment": "custom", "series": [
                {"name": "a b", "kind": "sweep", "method": "mtpt", "grid": [10, 5]},
                {"name": "c", "kind": "estimate", "method": "rwpt"},
                {"name": "c", "kind": "sweep", "method": "rwpt", "entropy": "integral", "grid": [100]}
            ]}"#,
        )
        .unwrap();
        let LabError::InvalidConfig(problems) = cfg.resolve(None).unwrap_err() else { panic!() };
        assert_eq!(problems.len(), 6, "{problems:#?}");
    }

    #[test]
    fn seed_override_changes_the_hash() {
        let cfg = ExperimentConfig::canonical(ExperimentId::E1);
        let a = cfg.resolve(None).unwrap();
        let b = cfg.resolve(Some(9)).unwrap();
        assert_eq!(b.master_seed, 9);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), cfg.resolve(Some(0)).unwrap().hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn realization_override_skips_single_runs() {
        let mut cfg = ExperimentConfig::canonical(ExperimentId::E1);
        cfg.realizations = Some(4);
        let r = cfg.resolve(None).unwrap();
        for s in &r.series {
            assert_eq!(s.realizations, if s.method == Method::Rwpt { 4 } else { 1 }, "{}", s.name);
        }
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "experiment": "custom",
                "series": [{"name": "one", "kind": "sweep", "method": "mtpt", "grid": [500]}]}"#,
        )
        .unwrap();
        let r = cfg.resolve(None).unwrap();
        let s = &r.series[0];
        assert_eq!((s.k, s.dt, s.realizations), (30, 0.1, 1));
        assert_eq!(s.params, default_params());
        assert_eq!(s.sweep_spec(0).grid, vec![500]);
    }
}
