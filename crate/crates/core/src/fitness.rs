//! Likelihoods and information criteria.
//!
//! The default log-fitness strips constants from the Gaussian log-likelihood
//! at its maximum: `ln L = -ln(SSE / k)`. The textbook form
//! `-(k/2)(ln(2 pi SSE / k) + 1)` is available as [`gaussian_log_likelihood`].

use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::model::ObservationSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionKind {
    /// Independent Gaussian errors with a common variance.
    IidGaussian,
    /// Weighted MSE with variance proportional to the observed concentration.
    Weighted,
}

impl CriterionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CriterionKind::IidGaussian => "iid-gaussian",
            CriterionKind::Weighted => "weighted",
        }
    }
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid-gaussian" => Ok(CriterionKind::IidGaussian),
            "weighted" => Ok(CriterionKind::Weighted),
            _ => Err(invalid(format!("unknown criterion kind {s:?}"))),
        }
    }
}

fn sse(residuals: &[f64]) -> f64 {
    residuals.iter().map(|y| y * y).sum()
}

/// `-ln(SSE / k)`.
pub fn log_fitness_iid(residuals: &[f64]) -> Result<f64> {
    if residuals.is_empty() {
        return Err(invalid("need at least one residual"));
    }
    let s = sse(residuals);
    if !s.is_finite() {
        return Err(invalid("residuals must be finite"));
    }
    if s == 0.0 {
        return Err(Error::DegenerateFit("all residuals are zero".into()));
    }
    Ok(-(s / residuals.len() as f64).ln())
}

/// Maximised Gaussian log-likelihood with all constants kept.
pub fn gaussian_log_likelihood(residuals: &[f64]) -> Result<f64> {
    let k = residuals.len() as f64;
    let lf = log_fitness_iid(residuals)?;
    Ok(-0.5 * k * ((2.0 * std::f64::consts::PI).ln() - lf + 1.0))
}

/// Log-likelihood of independent Gaussian residuals with known variances.
pub fn diagonal_gaussian_log_likelihood(residuals: &[f64], variances: &[f64]) -> Result<f64> {
    check_len(residuals.len(), variances.len())?;
    if variances.iter().any(|v| !(*v > 0.0)) {
        return Err(invalid("variances must be positive"));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(-0.5
        * residuals
            .iter()
            .zip(variances)
            .map(|(y, v)| y * y / v + (two_pi * v).ln())
            .sum::<f64>())
}

pub fn aic(log_likelihood: f64, p: usize) -> f64 {
    -2.0 * log_likelihood + 2.0 * p as f64
}

/// Small-sample correction `aic + (2p^2 + 2p) / (k - p - 1)`.
pub fn aicc(aic: f64, p: usize, k: usize) -> Result<f64> {
    if k <= p + 1 {
        return Err(invalid(format!("AICc needs k > p + 1, got k = {k}, p = {p}")));
    }
    let p = p as f64;
    Ok(aic + (2.0 * p * p + 2.0 * p) / (k as f64 - p - 1.0))
}

pub fn comic_uniform(aic: f64, n: usize) -> f64 {
    aic + (n as f64).ln()
}

pub fn comicc_uniform(aicc: f64, n: usize) -> f64 {
    aicc + (n as f64).ln()
}

/// `-sum_i c_i ln(dV_i) dV_i`, the computational entropy for per-particle
/// sampling volumes.
pub fn integral_entropy(concentrations: &[f64], volumes: &[f64]) -> Result<f64> {
    check_len(concentrations.len(), volumes.len())?;
    if volumes.iter().any(|v| !(*v > 0.0)) {
        return Err(invalid("sampling volumes must be positive"));
    }
    Ok(-concentrations
        .iter()
        .zip(volumes)
        .map(|(c, v)| c * v.ln() * v)
        .sum::<f64>())
}

/// `aic - integral c ln dV dx`, integrated with one node per particle.
pub fn comic_integral(aic: f64, concentrations: &[f64], volumes: &[f64]) -> Result<f64> {
    Ok(aic + integral_entropy(concentrations, volumes)?)
}

/// Weighted mean square error and how many points it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedMse {
    pub value: f64,
    /// Points with a positive observation.
    pub used: usize,
    /// Points dropped because the observation is zero.
    pub excluded: usize,
}

/// `E = (1/k) sum_i (c_obs - c_model)^2 / (m_total c_obs)` over points with
/// `c_obs > 0`; `k` counts only those points.
pub fn weighted_mse(observations: &ObservationSet, model: &[f64], m_total: f64) -> Result<WeightedMse> {
    check_len(observations.k(), model.len())?;
    if !(m_total > 0.0) {
        return Err(invalid(format!("total mass must be positive, got {m_total}")));
    }
    let mut sum = 0.0;
    let mut used = 0;
    for (obs, c) in observations.values.iter().zip(model) {
        if *obs > 0.0 {
            let d = obs - c;
            sum += d * d / (m_total * obs);
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::Undefined("every observation is zero; weights are undefined".into()));
    }
    Ok(WeightedMse { value: sum / used as f64, used, excluded: observations.k() - used })
}

/// `2 ln E + 2p - ln dV`.
pub fn comic_weighted(e: f64, p: usize, volume: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(invalid(format!("sampling volume must be positive, got {volume}")));
    }
    if e == 0.0 {
        return Err(Error::DegenerateFit("weighted error is zero".into()));
    }
    if !(e > 0.0) {
        return Err(invalid(format!("weighted error must be positive, got {e}")));
    }
    Ok(2.0 * e.ln() + 2.0 * p as f64 - volume.ln())
}

/// Per-point mean of squared residuals over `N` residual vectors.
pub fn pointwise_variance_mle(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = samples.first().ok_or_else(|| invalid("need at least one residual sample"))?;
    let k = first.len();
    let mut acc = vec![0.0; k];
    for s in samples {
        check_len(k, s.len())?;
        for (a, y) in acc.iter_mut().zip(s) {
            *a += y * y;
        }
    }
    let n = samples.len() as f64;
    Ok(acc.into_iter().map(|a| a / n).collect())
}

/// Error variance assumed for the data.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorModel {
    Iid,
    /// Binomial counting noise: `var_i = m_total / (n dx_i) * c_i`.
    ConcentrationProportional { variances: Vec<f64> },
}

impl ErrorModel {
    pub fn concentration_proportional(m_total: f64, n: usize, widths: &[f64], concentrations: &[f64]) -> Result<Self> {
        check_len(widths.len(), concentrations.len())?;
        if widths.iter().any(|w| !(*w > 0.0)) {
            return Err(invalid("bin widths must be positive"));
        }
        let variances = widths
            .iter()
            .zip(concentrations)
            .map(|(w, c)| m_total / (n as f64 * w) * c)
            .collect();
        Ok(ErrorModel::ConcentrationProportional { variances })
    }

    pub fn variances(&self) -> Option<&[f64]> {
        match self {
            ErrorModel::Iid => None,
            ErrorModel::ConcentrationProportional { variances } => Some(variances),
        }
    }
}

/// One scored simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    /// `-2 ln L` for the iid kind, `2 ln E` for the weighted kind.
    pub neg2lnl: f64,
    pub p: usize,
    pub k: usize,
    pub aic: f64,
    /// Absent when `k <= p + 1`.
    pub aicc: Option<f64>,
    pub comic: f64,
    pub comicc: Option<f64>,
    pub entropy_term: f64,
    pub criterion_kind: CriterionKind,
}

impl FitnessReport {
    fn assemble(kind: CriterionKind, neg2lnl: f64, p: usize, k: usize, entropy_term: f64) -> Self {
        let aic = neg2lnl + 2.0 * p as f64;
        let aicc = aicc(aic, p, k).ok();
        FitnessReport {
            neg2lnl,
            p,
            k,
            aic,
            aicc,
            comic: aic + entropy_term,
            comicc: aicc.map(|a| a + entropy_term),
            entropy_term,
            criterion_kind: kind,
        }
    }

    /// Scores residuals under iid Gaussian errors.
    pub fn iid(residuals: &[f64], p: usize, entropy_term: f64) -> Result<Self> {
        let lf = log_fitness_iid(residuals)?;
        Ok(Self::assemble(CriterionKind::IidGaussian, -2.0 * lf, p, residuals.len(), entropy_term))
    }

    /// Scores model values with the weighted MSE; `k` is the number of points
    /// with positive observations.
    pub fn weighted(observations: &ObservationSet, model: &[f64], m_total: f64, p: usize, entropy_term: f64) -> Result<Self> {
        let e = weighted_mse(observations, model, m_total)?;
        if e.value == 0.0 {
            return Err(Error::DegenerateFit("weighted error is zero".into()));
        }
        Ok(Self::assemble(CriterionKind::Weighted, 2.0 * e.value.ln(), p, e.used, entropy_term))
    }
}
