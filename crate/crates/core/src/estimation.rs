//! Parameter estimation and particle-number sweeps.
//!
//! A [`Solver`] turns transport parameters and a particle count into model
//! concentrations at the data locations. Scoring those against observations
//! gives a [`FitnessReport`]; minimising its AIC over `(v, ln D)` estimates
//! the parameters, and scoring across a grid of particle counts gives a
//! [`SweepCurve`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
pub use crate::fitness::CriterionKind;
use crate::fitness::{integral_entropy, FitnessReport};
use crate::model::{synthesize_observations, AdeParams, Domain, NoiseSpec, ObservationSet, SpacingMode};
use crate::mtpt::{simulate_mtpt_in, KernelOptions, MtptSolution, MtptConfig, NormalizationRule, Placement, PlacementSpec, Readout};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::rwpt::{bin_concentrations, default_grid, step_schedule, ParticleEnsemble, RandomIncrements};
use crate::seed::{SeedSequence, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rwpt,
    Mtpt,
}

/// Computational-entropy addend of COMIC.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyRule {
    /// `ln n`.
    #[default]
    Uniform,
    /// `-sum c_i ln(dV_i) dV_i` over the MTPT particles with their Voronoi
    /// volumes.
    Integral,
    /// The same sum with every `dV_i = |domain| / n`.
    IntegralMeanVolume,
    /// `-ln(|domain| / n)`.
    ConstantVolume,
}

/// A particle method with its numerical settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solver {
    pub method: Method,
    pub dt: f64,
    /// MTPT particle layout.
    #[serde(default)]
    pub placement: Placement,
    #[serde(default)]
    pub normalization: NormalizationRule,
    #[serde(default)]
    pub readout: Readout,
    #[serde(default)]
    pub kernel: KernelOptions,
    #[serde(default = "yes")]
    pub align_release: bool,
}

fn yes() -> bool {
    true
}

impl Solver {
    pub fn rwpt(dt: f64) -> Self {
        Self { method: Method::Rwpt, ..Self::mtpt(dt) }
    }

    pub fn mtpt(dt: f64) -> Self {
        Self {
            method: Method::Mtpt,
            dt,
            placement: Placement::Uniform,
            normalization: NormalizationRule::default(),
            readout: Readout::default(),
            kernel: KernelOptions::default(),
            align_release: true,
        }
    }

    pub fn with_placement(self, placement: Placement) -> Self {
        Self { placement, ..self }
    }

    /// True when the output does not depend on the model seed.
    pub fn is_deterministic(&self) -> bool {
        self.method == Method::Mtpt && self.placement == Placement::Uniform
    }

    pub fn mtpt_config(&self) -> MtptConfig {
        MtptConfig {
            dt: self.dt,
            normalization: self.normalization,
            readout: self.readout,
            kernel: self.kernel,
            align_release: self.align_release,
        }
    }
}

/// Model concentrations at the data locations, plus what the entropy terms need.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub at_data: Vec<f64>,
    pub m_total: f64,
    pub n: usize,
    /// MTPT particle concentrations and Voronoi volumes.
    pub particles: Option<(Vec<f64>, Vec<f64>)>,
}

/// Final state of one particle simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Simulation {
    Rwpt(ParticleEnsemble),
    Mtpt(MtptSolution),
}

impl Simulation {
    pub fn len(&self) -> usize {
        match self {
            Simulation::Rwpt(e) => e.len(),
            Simulation::Mtpt(s) => s.positions.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concentrations at the observation locations: binned for RWPT,
    /// interpolated for MTPT.
    pub fn predict(&self, observations: &ObservationSet) -> Result<Prediction> {
        let n = self.len();
        match self {
            Simulation::Rwpt(ensemble) => {
                let grid = default_grid(observations)?;
                Ok(Prediction { at_data: bin_concentrations(ensemble, &grid)?, m_total: ensemble.total_mass(), n, particles: None })
            }
            Simulation::Mtpt(sol) => Ok(Prediction {
                at_data: sol.concentration_at(&observations.locations),
                m_total: sol.total_mass(),
                n,
                particles: Some((sol.concentrations.clone(), sol.volumes.clone())),
            }),
        }
    }
}

pub fn simulate(exec: Execution, solver: &Solver, params: &AdeParams, domain: &Domain, n: usize, model_seed: u64) -> Result<Simulation> {
    match solver.method {
        Method::Rwpt => Ok(Simulation::Rwpt(crate::rwpt::simulate_rwpt_in(exec, params, n, solver.dt, model_seed)?)),
        Method::Mtpt => {
            let placement = PlacementSpec { mode: solver.placement, seed: model_seed };
            Ok(Simulation::Mtpt(simulate_mtpt_in(exec, params, domain, n, &solver.mtpt_config(), placement)?))
        }
    }
}

pub fn predict(
    exec: Execution,
    solver: &Solver,
    params: &AdeParams,
    domain: &Domain,
    n: usize,
    observations: &ObservationSet,
    model_seed: u64,
) -> Result<Prediction> {
    simulate(exec, solver, params, domain, n, model_seed)?.predict(observations)
}

pub fn entropy_term(rule: EntropyRule, prediction: &Prediction, domain: &Domain) -> Result<f64> {
    match rule {
        EntropyRule::Uniform => Ok((prediction.n as f64).ln()),
        EntropyRule::ConstantVolume => Ok(-(domain.length() / prediction.n as f64).ln()),
        EntropyRule::Integral => match &prediction.particles {
            Some((c, v)) => integral_entropy(c, v),
            None => Err(invalid("the integral entropy needs per-particle volumes (MTPT only)")),
        },
        EntropyRule::IntegralMeanVolume => match &prediction.particles {
            Some((c, _)) => integral_entropy(c, &vec![domain.length() / prediction.n as f64; c.len()]),
            None => Err(invalid("the integral entropy needs particle concentrations (MTPT only)")),
        },
    }
}

pub fn score(
    kind: CriterionKind,
    rule: EntropyRule,
    observations: &ObservationSet,
    prediction: &Prediction,
    p: usize,
    domain: &Domain,
) -> Result<FitnessReport> {
    let entropy = entropy_term(rule, prediction, domain)?;
    match kind {
        CriterionKind::IidGaussian => {
            let residuals: Vec<f64> = observations.values.iter().zip(&prediction.at_data).map(|(o, c)| o - c).collect();
            FitnessReport::iid(&residuals, p, entropy)
        }
        CriterionKind::Weighted => FitnessReport::weighted(observations, &prediction.at_data, prediction.m_total, p, entropy),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationSpec {
    pub solver: Solver,
    pub n: usize,
    pub criterion: CriterionKind,
    /// Seeds the RWPT increments, or the MTPT random placement.
    pub seed: u64,
    /// Starting `(v, D)`.
    #[serde(default = "default_theta0")]
    pub theta0: [f64; 2],
    #[serde(default)]
    pub options: NelderMeadOptions,
}

fn default_theta0() -> [f64; 2] {
    [0.5, 0.5]
}

impl EstimationSpec {
    pub fn new(solver: Solver, n: usize, criterion: CriterionKind, seed: u64) -> Self {
        Self { solver, n, criterion, seed, theta0: default_theta0(), options: NelderMeadOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub velocity: f64,
    pub diffusion: f64,
    /// AIC (p = 2) at the estimate.
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub criterion: CriterionKind,
}

/// Fits `(v, D)` to the observations by Nelder-Mead on `(v, ln D)`.
///
/// `base` supplies the release point and final time. RWPT draws its random
/// increments once from `spec.seed` and replays them for every trial, so the
/// objective is a deterministic function of the parameters.
pub fn estimate_parameters(
    exec: Execution,
    observations: &ObservationSet,
    base: &AdeParams,
    domain: &Domain,
    spec: &EstimationSpec,
) -> Result<EstimationResult> {
    let [v0, d0] = spec.theta0;
    if !(d0 > 0.0) {
        return Err(invalid(format!("initial diffusion must be positive, got {d0}")));
    }
    let crn = match spec.solver.method {
        Method::Rwpt => {
            let steps = step_schedule(base.final_time, spec.solver.dt)?;
            Some((RandomIncrements::draw(spec.n, steps, spec.seed, exec)?, default_grid(observations)?))
        }
        Method::Mtpt => None,
    };
    let evaluate = |theta: &[f64]| -> Result<f64> {
        let params = base.with_transport(theta[0], theta[1].exp());
        params.validate()?;
        let prediction = match &crn {
            Some((inc, grid)) => {
                let ensemble = ParticleEnsemble::equal_mass(inc.propagate(&params, exec))?;
                Prediction { at_data: bin_concentrations(&ensemble, grid)?, m_total: ensemble.total_mass(), n: spec.n, particles: None }
            }
            None => predict(exec, &spec.solver, &params, domain, spec.n, observations, spec.seed)?,
        };
        Ok(score(spec.criterion, EntropyRule::Uniform, observations, &prediction, 2, domain)?.aic)
    };
    let start = [v0, d0.ln()];
    evaluate(&start)?;
    let min = nelder_mead(|t| evaluate(t).unwrap_or(f64::INFINITY), &start, &spec.options)?;
    Ok(EstimationResult {
        velocity: min.x[0],
        diffusion: min.x[1].exp(),
        value: min.value,
        iterations: min.iterations,
        evaluations: min.evaluations,
        converged: min.converged,
        criterion: spec.criterion,
    })
}

/// `m` particle counts spaced evenly in `log10` from `10^lo` to `10^hi`.
pub fn log_spaced_counts(lo: f64, hi: f64, m: usize) -> Result<Vec<usize>> {
    if m == 0 || !(hi >= lo) {
        return Err(invalid("need at least one point and hi >= lo"));
    }
    let step = if m > 1 { (hi - lo) / (m - 1) as f64 } else { 0.0 };
    let grid: Vec<usize> = (0..m).map(|i| 10f64.powf(lo + i as f64 * step).round() as usize).collect();
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("grid too dense to give distinct particle counts"));
    }
    Ok(grid)
}

/// Twelve counts from `10^2` to `10^4.6`.
pub fn default_sweep_grid() -> Vec<usize> {
    log_spaced_counts(2.0, 4.6, 12).expect("fixed grid is valid")
}

/// Settings for re-estimating `(v, D)` at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reestimate {
    #[serde(default = "default_theta0")]
    pub theta0: [f64; 2],
    #[serde(default)]
    pub options: NelderMeadOptions,
}

impl Default for Reestimate {
    fn default() -> Self {
        Self { theta0: default_theta0(), options: NelderMeadOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub params: AdeParams,
    pub domain: Domain,
    pub k: usize,
    pub spacing: SpacingMode,
    pub alpha: f64,
    pub solver: Solver,
    pub criterion: CriterionKind,
    pub entropy: EntropyRule,
    /// Strictly ascending particle counts.
    pub grid: Vec<usize>,
    pub realizations: usize,
    pub master_seed: u64,
    /// Draw fresh observations for every realization.
    pub resample_data: bool,
    /// Fit `(v, D)` at each point before scoring.
    pub estimate: Option<Reestimate>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.domain.validate()?;
        if self.grid.is_empty() {
            return Err(invalid("sweep grid is empty"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("sweep grid must be strictly ascending"));
        }
        let min_n = if self.solver.method == Method::Mtpt { 2 } else { 1 };
        if self.grid[0] < min_n {
            return Err(invalid(format!("particle counts must be at least {min_n}")));
        }
        if self.realizations == 0 {
            return Err(invalid("need at least one realization"));
        }
        if self.k < 2 {
            return Err(invalid("need at least two observations"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("noise alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.solver.dt > 0.0) {
            return Err(invalid(format!("time step must be positive, got {}", self.solver.dt)));
        }
        if matches!(self.entropy, EntropyRule::Integral | EntropyRule::IntegralMeanVolume) && self.solver.method != Method::Mtpt {
            return Err(invalid("the integral entropy needs MTPT"));
        }
        Ok(())
    }

    /// Parameter count charged by the criteria.
    pub fn p(&self) -> usize {
        if self.estimate.is_some() {
            2
        } else {
            0
        }
    }

    /// True when every realization would produce the same numbers.
    pub fn is_deterministic(&self) -> bool {
        self.solver.is_deterministic() && (!self.resample_data || (self.alpha == 0.0 && self.spacing == SpacingMode::Uniform))
    }

    /// `(model_seed, data_seed)` for a realization. Seeds depend only on the
    /// master seed and the realization index, so adding realizations leaves
    /// earlier ones unchanged.
    pub fn seeds(&self, realization: usize) -> (u64, u64) {
        let seq = SeedSequence::new(self.master_seed);
        let data_index = if self.resample_data { realization as u64 } else { 0 };
        (seq.derive(Stream::Model, realization as u64), seq.derive(Stream::Data, data_index))
    }

    pub fn observations(&self, realization: usize) -> Result<ObservationSet> {
        let (_, data_seed) = self.seeds(realization);
        synthesize_observations(&self.params, &self.domain, self.k, self.spacing, NoiseSpec { alpha: self.alpha, seed: data_seed })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub report: FitnessReport,
    pub estimate: Option<EstimationResult>,
}

/// One `(n, realization)` job of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub n: usize,
    pub realization: usize,
    pub model_seed: u64,
    pub data_seed: u64,
    pub result: std::result::Result<PointResult, Error>,
}

pub fn evaluate_point(exec: Execution, spec: &SweepSpec, n: usize, realization: usize) -> Result<PointResult> {
    let obs = spec.observations(realization)?;
    let (model_seed, _) = spec.seeds(realization);
    let (params, estimate) = match &spec.estimate {
        Some(re) => {
            let est_spec = EstimationSpec { solver: spec.solver, n, criterion: spec.criterion, seed: model_seed, theta0: re.theta0, options: re.options };
            let est = estimate_parameters(exec, &obs, &spec.params, &spec.domain, &est_spec)?;
            (spec.params.with_transport(est.velocity, est.diffusion), Some(est))
        }
        None => (spec.params, None),
    };
    let prediction = predict(exec, &spec.solver, &params, &spec.domain, n, &obs, model_seed)?;
    let report = score(spec.criterion, spec.entropy, &obs, &prediction, spec.p(), &spec.domain)?;
    Ok(PointResult { report, estimate })
}

fn score_realization(spec: &SweepSpec, sim: &Simulation, realization: usize) -> Result<PointResult> {
    let obs = spec.observations(realization)?;
    let prediction = sim.predict(&obs)?;
    let report = score(spec.criterion, spec.entropy, &obs, &prediction, spec.p(), &spec.domain)?;
    Ok(PointResult { report, estimate: None })
}

/// Runs every `(n, realization)` pair and aggregates the ensemble mean per `n`.
///
/// A failing job is recorded in its [`SweepPoint`] and left out of the mean.
/// When the simulation does not depend on the realization (deterministic
/// solver, fixed parameters) it runs once per `n` and is scored against each
/// realization's data.
pub fn sweep_particle_numbers(exec: Execution, spec: &SweepSpec) -> Result<(Vec<SweepPoint>, SweepCurve)> {
    spec.validate()?;
    let r = spec.realizations;
    let point = |n: usize, realization: usize, result: Result<PointResult>| {
        let (model_seed, data_seed) = spec.seeds(realization);
        SweepPoint { n, realization, model_seed, data_seed, result }
    };
    let points: Vec<SweepPoint> = if spec.solver.is_deterministic() && spec.estimate.is_none() {
        let inner = if spec.grid.len() > 1 { Execution::Sequential } else { exec };
        exec.map(spec.grid.len(), |g| {
            let n = spec.grid[g];
            let sim = simulate(inner, &spec.solver, &spec.params, &spec.domain, n, spec.seeds(0).0);
            (0..r)
                .map(|realization| {
                    let result = sim.as_ref().map_err(Clone::clone).and_then(|s| score_realization(spec, s, realization));
                    point(n, realization, result)
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()
    } else {
        let jobs = spec.grid.len() * r;
        // With several jobs the parallelism goes across jobs; each job runs alone.
        let inner = if jobs > 1 { Execution::Sequential } else { exec };
        exec.map(jobs, |j| {
            let (n, realization) = (spec.grid[j / r], j % r);
            point(n, realization, evaluate_point(inner, spec, n, realization))
        })
    };
    let curve = SweepCurve::aggregate(&spec.grid, r, spec.criterion, &points)?;
    Ok((points, curve))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    Single,
    EnsembleMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub aic: f64,
    pub aicc: Option<f64>,
    pub comic: f64,
    pub comicc: Option<f64>,
    pub entropy_term: f64,
    pub successes: usize,
    pub failures: usize,
}

/// Criterion values against particle count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub points: Vec<CurvePoint>,
    pub realizations: usize,
    pub aggregation: Aggregation,
    pub criterion: CriterionKind,
}

impl SweepCurve {
    /// Mean of each column over the successful realizations at each `n`, in
    /// realization order.
    pub fn aggregate(grid: &[usize], realizations: usize, criterion: CriterionKind, points: &[SweepPoint]) -> Result<Self> {
        let mut out = Vec::with_capacity(grid.len());
        for &n in grid {
            let reports: Vec<&FitnessReport> = points
                .iter()
                .filter(|p| p.n == n)
                .filter_map(|p| p.result.as_ref().ok().map(|r| &r.report))
                .collect();
            let failures = points.iter().filter(|p| p.n == n && p.result.is_err()).count();
            let m = reports.len() as f64;
            let mean = |f: &dyn Fn(&FitnessReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / m;
            let mean_opt = |f: &dyn Fn(&FitnessReport) -> Option<f64>| -> Option<f64> {
                let vals: Option<Vec<f64>> = reports.iter().map(|r| f(r)).collect();
                vals.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / m)
            };
            out.push(CurvePoint {
                n,
                aic: mean(&|r| r.aic),
                aicc: mean_opt(&|r| r.aicc),
                comic: mean(&|r| r.comic),
                comicc: mean_opt(&|r| r.comicc),
                entropy_term: mean(&|r| r.entropy_term),
                successes: reports.len(),
                failures,
            });
        }
        if out.iter().all(|p| p.successes == 0) {
            let first = points.iter().find_map(|p| p.result.as_ref().err().cloned());
            return Err(first.unwrap_or_else(|| invalid("sweep produced no points")));
        }
        let aggregation = if realizations == 1 { Aggregation::Single } else { Aggregation::EnsembleMean };
        Ok(Self { points: out, realizations, aggregation, criterion })
    }

    pub fn counts(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.n).collect()
    }

    /// Index of the smallest value of `column` among points with data; the
    /// first wins ties.
    pub fn argmin_index_by(&self, column: impl Fn(&CurvePoint) -> f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.points.iter().enumerate() {
            let v = column(p);
            if p.successes == 0 || v.is_nan() {
                continue;
            }
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Particle count minimising COMIC.
    pub fn argmin(&self) -> Option<usize> {
        self.argmin_index_by(|p| p.comic).map(|i| self.points[i].n)
    }

    /// Grid neighbours on either side of the COMIC minimum.
    pub fn bracket(&self) -> Option<(usize, usize)> {
        let i = self.argmin_index_by(|p| p.comic)?;
        let lo = self.points[i.saturating_sub(1)].n;
        let hi = self.points[(i + 1).min(self.points.len() - 1)].n;
        Some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_values() {
        assert_eq!(default_sweep_grid(), vec![100, 172, 297, 512, 882, 1520, 2619, 4514, 7779, 13405, 23101, 39811]);
        assert!(log_spaced_counts(0.0, 0.01, 5).is_err());
        assert_eq!(log_spaced_counts(3.0, 3.0, 1).unwrap(), vec![1000]);
    }

    fn spec() -> SweepSpec {
        SweepSpec {
            params: AdeParams::new(0.0, 1.0, 0.0, 1.0).unwrap(),
            domain: Domain::default(),
            k: 30,
            spacing: SpacingMode::Uniform,
            alpha: 0.0,
            solver: Solver::mtpt(0.1),
            criterion: CriterionKind::IidGaussian,
            entropy: EntropyRule::Uniform,
            grid: vec![50, 100, 200],
            realizations: 1,
            master_seed: 7,
            resample_data: false,
            estimate: None,
        }
    }

    #[test]
    fn seeds_are_stable_under_more_realizations() {
        let mut s = spec();
        s.resample_data = true;
        let a: Vec<_> = (0..3).map(|r| s.seeds(r)).collect();
        s.realizations = 10;
        let b: Vec<_> = (0..3).map(|r| s.seeds(r)).collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn sweep_decomposes() {
        let (points, curve) = sweep_particle_numbers(Execution::default(), &spec()).unwrap();
        assert_eq!(points.len(), 3);
        for p in &curve.points {
            assert_eq!(p.comic, p.aic + (p.n as f64).ln());
        }
        assert!(curve.argmin().is_some());
        assert_eq!(curve.aggregation, Aggregation::Single);
    }

    #[test]
    fn shared_simulation_matches_single_points() {
        let mut s = spec();
        s.alpha = 0.2;
        s.realizations = 3;
        s.resample_data = true;
        let (points, _) = sweep_particle_numbers(Execution::default(), &s).unwrap();
        for p in &points {
            let single = evaluate_point(Execution::Sequential, &s, p.n, p.realization).unwrap();
            assert_eq!(p.result.as_ref().unwrap().report, single.report);
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec();
        s.grid = vec![100, 100];
        assert!(s.validate().is_err());
        let mut s = spec();
        s.solver = Solver::rwpt(0.1);
        s.entropy = EntropyRule::Integral;
        assert!(s.validate().is_err());
    }

    #[test]
    fn failures_are_recorded() {
        let mut s = spec();
        s.grid = vec![100];
        s.k = 30;
        let curve_points = vec![SweepPoint { n: 100, realization: 0, model_seed: 0, data_seed: 0, result: Err(invalid("boom")) }];
        assert!(SweepCurve::aggregate(&s.grid, 1, s.criterion, &curve_points).is_err());
    }

    #[test]
    fn determinism_flags() {
        let mut s = spec();
        assert!(s.is_deterministic());
        s.resample_data = true;
        assert!(s.is_deterministic());
        s.alpha = 0.1;
        assert!(!s.is_deterministic());
        s.resample_data = false;
        assert!(s.is_deterministic());
        s.solver = Solver::rwpt(0.1);
        assert!(!s.is_deterministic());
    }
}
