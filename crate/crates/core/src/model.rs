//! The constant-coefficient ADE on an effectively infinite line, its
//! Green's-function solution, and synthetic observation sets drawn from it.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::seed;

/// Velocity, diffusion coefficient, release point and final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdeParams {
    #[serde(rename = "v")]
    pub velocity: f64,
    #[serde(rename = "D")]
    pub diffusion: f64,
    #[serde(rename = "x0")]
    pub release: f64,
    #[serde(rename = "T")]
    pub final_time: f64,
}

impl AdeParams {
    pub fn new(velocity: f64, diffusion: f64, release: f64, final_time: f64) -> Result<Self> {
        let p = Self { velocity, diffusion, release, final_time };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.velocity.is_finite() && self.release.is_finite()) {
            return Err(invalid("velocity and release point must be finite"));
        }
        if !(self.diffusion > 0.0 && self.diffusion.is_finite()) {
            return Err(Error::Domain(format!("diffusion must be positive, got {}", self.diffusion)));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::Domain(format!("final time must be positive, got {}", self.final_time)));
        }
        Ok(())
    }

    /// Same physics with a different `(v, D)`, as used by parameter estimation.
    pub fn with_transport(&self, velocity: f64, diffusion: f64) -> Self {
        Self { velocity, diffusion, ..*self }
    }

    /// Centre of the plume at time `t`.
    pub fn plume_center(&self, t: f64) -> f64 {
        self.release + self.velocity * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let d = Self { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(invalid(format!("domain needs lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn shifted(&self, by: f64) -> Self {
        Self { lo: self.lo + by, hi: self.hi + by }
    }
}

impl Default for Domain {
    fn default() -> Self {
        Self { lo: -5.0, hi: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingMode {
    Uniform,
    Random,
}

/// Multiplicative Gaussian measurement noise: `sd = alpha * c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub alpha: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn exact(seed: u64) -> Self {
        Self { alpha: 0.0, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub locations: Vec<f64>,
    pub values: Vec<f64>,
    pub spacing: SpacingMode,
    pub noise: NoiseSpec,
}

impl ObservationSet {
    /// Builds an observation set from explicit data, checking its invariants.
    pub fn new(locations: Vec<f64>, values: Vec<f64>, spacing: SpacingMode, noise: NoiseSpec) -> Result<Self> {
        if locations.is_empty() {
            return Err(invalid("an observation set needs at least one point"));
        }
        crate::error::check_len(locations.len(), values.len())?;
        if locations.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("observation locations must be strictly increasing"));
        }
        if values.iter().any(|c| !(*c >= 0.0)) {
            return Err(invalid("observed concentrations must be non-negative"));
        }
        Ok(Self { locations, values, spacing, noise })
    }

    pub fn k(&self) -> usize {
        self.locations.len()
    }
}

/// Green's function of the ADE released at `x0`: a Gaussian with mean
/// `x0 + v t` and variance `2 D t`.
pub fn analytic_concentration(params: &AdeParams, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    if !(params.diffusion > 0.0) {
        return Err(Error::Domain(format!("diffusion must be positive, got {}", params.diffusion)));
    }
    let spread = 4.0 * params.diffusion * t;
    let s = x - params.plume_center(t);
    Ok((-s * s / spread).exp() / (std::f64::consts::PI * spread).sqrt())
}

/// `k` endpoint-inclusive, evenly spaced points; a single point sits at the
/// centre of the domain.
pub fn uniform_points(domain: &Domain, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![0.5 * (domain.lo + domain.hi)],
        _ => {
            let h = domain.length() / (k - 1) as f64;
            let mut pts: Vec<f64> = (0..k).map(|i| domain.lo + i as f64 * h).collect();
            pts[k - 1] = domain.hi;
            pts
        }
    }
}

/// Samples `k` observations of `c(x, T)`.
///
/// Random locations are drawn uniformly on the domain and sorted. Noisy values
/// come from `Normal(c, (alpha c)^2)`; a negative draw is redrawn until it is
/// non-negative, so the set always keeps `k` points.
pub fn synthesize_observations(
    params: &AdeParams,
    domain: &Domain,
    k: usize,
    spacing: SpacingMode,
    noise: NoiseSpec,
) -> Result<ObservationSet> {
    if k < 1 {
        return Err(invalid("need at least one observation"));
    }
    params.validate()?;
    domain.validate()?;
    if !(noise.alpha >= 0.0 && noise.alpha.is_finite()) {
        return Err(invalid(format!("noise alpha must be >= 0, got {}", noise.alpha)));
    }
    let mut rng = seed::rng(noise.seed);
    let locations = match spacing {
        SpacingMode::Uniform => uniform_points(domain, k),
        SpacingMode::Random => {
            let mut xs: Vec<f64> = (0..k).map(|_| rng.random_range(domain.lo..domain.hi)).collect();
            xs.sort_by(f64::total_cmp);
            if xs.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid("random locations collided; choose another seed"));
            }
            xs
        }
    };
    let mut values = Vec::with_capacity(k);
    for &x in &locations {
        let exact = analytic_concentration(params, x, params.final_time)?;
        if noise.alpha == 0.0 {
            values.push(exact);
            continue;
        }
        let sd = noise.alpha * exact;
        let mut draw;
        loop {
            let xi: f64 = rng.sample(StandardNormal);
            draw = exact + sd * xi;
            if draw >= 0.0 {
                break;
            }
        }
        values.push(draw);
    }
    ObservationSet::new(locations, values, spacing, noise)
}
