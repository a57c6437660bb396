//! Random-walk particle tracking.
//!
//! Every particle starts at the release point with mass `1/n` and takes
//! Gaussian steps `v dt + sqrt(2 D dt) xi`. Concentrations are recovered by
//! counting particles in bins: `c_i = n_i / (n dx_i)`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Result};
use crate::exec::Execution;
use crate::model::{AdeParams, ObservationSet};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleEnsemble {
    positions: Vec<f64>,
    masses: Vec<f64>,
    total_mass: f64,
}

impl ParticleEnsemble {
    pub fn new(positions: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("an ensemble needs at least one particle"));
        }
        check_len(positions.len(), masses.len())?;
        if masses.iter().any(|m| !(*m >= 0.0)) {
            return Err(invalid("particle masses must be non-negative"));
        }
        let total_mass = masses.iter().sum();
        Ok(Self { positions, masses, total_mass })
    }

    /// `n` particles of mass `1/n` each.
    pub fn equal_mass(positions: Vec<f64>) -> Result<Self> {
        let n = positions.len();
        if n == 0 {
            return Err(invalid("an ensemble needs at least one particle"));
        }
        let masses = vec![1.0 / n as f64; n];
        Ok(Self { positions, masses, total_mass: 1.0 })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn into_positions(self) -> Vec<f64> {
        self.positions
    }
}

/// Step lengths covering `[0, T]`: full steps of `dt`, the last one shortened
/// so the schedule ends exactly at `T`.
pub fn step_schedule(final_time: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    if !(final_time > 0.0) {
        return Err(invalid(format!("final time must be positive, got {final_time}")));
    }
    if dt > final_time {
        return Err(invalid(format!("time step {dt} exceeds final time {final_time}")));
    }
    // Tolerate round-off so that T = 1, dt = 0.1 gives ten equal steps.
    let ratio = final_time / dt;
    let full = (ratio * (1.0 + 1e-12)).floor() as usize;
    let mut steps = vec![dt; full];
    let rest = final_time - full as f64 * dt;
    if rest > 1e-12 * final_time {
        steps.push(rest);
    }
    Ok(steps)
}

/// The standard-normal increments of one RWPT realization.
///
/// Replaying the same increments under different `(v, D)` gives common random
/// numbers: the estimation objective becomes a deterministic function of the
/// parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomIncrements {
    steps: Vec<f64>,
    /// Row-major by particle: `xi[p * steps + s]`.
    xi: Vec<f64>,
    n: usize,
}

impl RandomIncrements {
    pub fn draw(n: usize, steps: Vec<f64>, seed: u64, exec: Execution) -> Result<Self> {
        if n == 0 {
            return Err(invalid("need at least one particle"));
        }
        let per = steps.len();
        let rows = exec.map(n, |p| {
            let mut rng = seed::particle_rng(seed, p);
            (0..per).map(|_| StandardNormal.sample(&mut rng)).collect::<Vec<f64>>()
        });
        Ok(Self { steps, xi: rows.concat(), n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Final particle positions under `params`.
    pub fn propagate(&self, params: &AdeParams, exec: Execution) -> Vec<f64> {
        let per = self.steps.len();
        let drift: Vec<f64> = self.steps.iter().map(|h| params.velocity * h).collect();
        let jump: Vec<f64> = self.steps.iter().map(|h| (2.0 * params.diffusion * h).sqrt()).collect();
        exec.map(self.n, |p| {
            let xi = &self.xi[p * per..(p + 1) * per];
            let mut x = params.release;
            for s in 0..per {
                x += drift[s] + jump[s] * xi[s];
            }
            x
        })
    }
}

pub fn simulate_rwpt(params: &AdeParams, n: usize, dt: f64, seed: u64) -> Result<ParticleEnsemble> {
    simulate_rwpt_in(Execution::default(), params, n, dt, seed)
}

pub fn simulate_rwpt_in(exec: Execution, params: &AdeParams, n: usize, dt: f64, seed: u64) -> Result<ParticleEnsemble> {
    if !(params.velocity.is_finite() && params.diffusion >= 0.0 && params.final_time > 0.0) {
        return Err(invalid("RWPT needs finite velocity, D >= 0 and T > 0"));
    }
    let steps = step_schedule(params.final_time, dt)?;
    let inc = RandomIncrements::draw(n, steps, seed, exec)?;
    ParticleEnsemble::equal_mass(inc.propagate(params, exec))
}

/// Histogram bins, each the half-open interval `[lower, lower + width)`.
///
/// `centers` label where each bin's concentration is reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinGrid {
    centers: Vec<f64>,
    lower: Vec<f64>,
    widths: Vec<f64>,
}

impl BinGrid {
    /// Bins `[c - w/2, c + w/2)` centred on the given points.
    pub fn centered(centers: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        check_len(centers.len(), widths.len())?;
        let lower = centers.iter().zip(&widths).map(|(c, w)| c - 0.5 * w).collect();
        Self::from_parts(centers, lower, widths)
    }

    fn from_parts(centers: Vec<f64>, lower: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        if let Some(w) = widths.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(invalid(format!("bin widths must be positive, got {w}")));
        }
        for i in 1..lower.len() {
            let prev_hi = lower[i - 1] + widths[i - 1];
            if lower[i] < lower[i - 1] || prev_hi > lower[i] + 1e-12 * widths[i].max(widths[i - 1]) {
                return Err(invalid(format!("bins {} and {} overlap or are out of order", i - 1, i)));
            }
        }
        Ok(Self { centers, lower, widths })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn lower_edges(&self) -> &[f64] {
        &self.lower
    }

    /// Particle count per bin.
    pub fn counts(&self, positions: &[f64]) -> Vec<usize> {
        let mut sorted = positions.to_vec();
        sorted.sort_by(f64::total_cmp);
        let below = |edge: f64| sorted.partition_point(|x| *x < edge);
        self.lower
            .iter()
            .zip(&self.widths)
            .map(|(lo, w)| below(lo + w) - below(*lo))
            .collect()
    }
}

/// `c_i = n_i / (n dx_i)` at each bin.
pub fn bin_concentrations(ensemble: &ParticleEnsemble, grid: &BinGrid) -> Result<Vec<f64>> {
    let n = ensemble.len() as f64;
    Ok(grid
        .counts(ensemble.positions())
        .into_iter()
        .zip(grid.widths())
        .map(|(count, w)| count as f64 / (n * w))
        .collect())
}

/// Bins around the observation locations.
///
/// Bin `i` spans the midpoints to its neighbours, so its width is half the
/// distance to each neighbour; the end bins extend by the same half-gap
/// outward. The bins tile an interval without overlap; for uneven spacing a
/// bin's interval is not centred on its observation.
pub fn default_grid(observations: &ObservationSet) -> Result<BinGrid> {
    let x = &observations.locations;
    let k = x.len();
    if k < 2 {
        return Err(invalid("default grid needs at least two observation locations"));
    }
    let mut edges = Vec::with_capacity(k + 1);
    edges.push(x[0] - 0.5 * (x[1] - x[0]));
    edges.extend(x.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    edges.push(x[k - 1] + 0.5 * (x[k - 1] - x[k - 2]));
    let widths = edges.windows(2).map(|e| e[1] - e[0]).collect();
    BinGrid::from_parts(x.clone(), edges[..k].to_vec(), widths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NoiseSpec, SpacingMode};
    use approx::assert_relative_eq;

    fn obs(locations: Vec<f64>) -> ObservationSet {
        let values = vec![0.0; locations.len()];
        ObservationSet::new(locations, values, SpacingMode::Uniform, NoiseSpec::exact(0)).unwrap()
    }

    #[test]
    fn schedule_lands_on_final_time() {
        assert_eq!(step_schedule(1.0, 0.1).unwrap().len(), 10);
        let s = step_schedule(1.0, 0.3).unwrap();
        assert_eq!(s.len(), 4);
        assert_relative_eq!(s.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(s[3], 0.1, epsilon = 1e-12);
        assert!(step_schedule(1.0, 0.0).is_err());
        assert!(step_schedule(1.0, -0.1).is_err());
        assert!(step_schedule(1.0, 2.0).is_err());
    }

    #[test]
    fn no_diffusion_is_pure_advection() {
        let p = AdeParams { velocity: 1.0, diffusion: 0.0, release: 0.0, final_time: 1.0 };
        let e = simulate_rwpt(&p, 50, 0.1, 3).unwrap();
        for x in e.positions() {
            assert_relative_eq!(*x, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn single_bin_holds_everything() {
        let e = ParticleEnsemble::equal_mass(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let g = BinGrid::centered(vec![0.25], vec![1.0]).unwrap();
        assert_eq!(bin_concentrations(&e, &g).unwrap(), vec![1.0]);
    }

    #[test]
    fn hand_counted_bins() {
        let e = ParticleEnsemble::equal_mass(vec![-0.3, 0.1, 0.2, 0.9]).unwrap();
        let g = BinGrid::centered(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(bin_concentrations(&e, &g).unwrap(), vec![0.75, 0.25]);
    }

    #[test]
    fn edge_particle_goes_right() {
        let e = ParticleEnsemble::equal_mass(vec![0.5]).unwrap();
        let g = BinGrid::centered(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(g.counts(e.positions()), vec![0, 1]);
    }

    #[test]
    fn rejects_bad_bins() {
        assert!(BinGrid::centered(vec![0.0], vec![0.0]).is_err());
        assert!(BinGrid::centered(vec![0.0], vec![-1.0]).is_err());
        assert!(BinGrid::centered(vec![0.0, 0.5], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn default_grid_widths() {
        let g = default_grid(&obs(vec![0.0, 1.0, 3.0])).unwrap();
        assert_eq!(g.widths(), &[1.0, 1.5, 2.0]);
        let total: f64 = g.widths().iter().sum();
        // span 3 plus half-gap extensions 0.5 and 1.0
        assert_relative_eq!(total, 4.5, epsilon = 1e-15);

        let u = default_grid(&obs(vec![-1.0, -0.5, 0.0, 0.5, 1.0])).unwrap();
        for w in u.widths() {
            assert_relative_eq!(*w, 0.5, epsilon = 1e-15);
        }
        assert!(default_grid(&obs(vec![1.0])).is_err());
    }

    #[test]
    fn mass_accounting_on_tiling_grid() {
        let p = AdeParams::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let e = simulate_rwpt(&p, 5000, 0.1, 11).unwrap();
        let lo = e.positions().iter().cloned().fold(f64::INFINITY, f64::min) - 0.01;
        let hi = e.positions().iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 0.01;
        let k = 40;
        let w = (hi - lo) / k as f64;
        let centers: Vec<f64> = (0..k).map(|i| lo + (i as f64 + 0.5) * w).collect();
        let g = BinGrid::centered(centers, vec![w; k]).unwrap();
        assert_eq!(g.counts(e.positions()).iter().sum::<usize>(), 5000);
        let c = bin_concentrations(&e, &g).unwrap();
        let mass: f64 = c.iter().zip(g.widths()).map(|(c, w)| c * w).sum();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn execution_policies_agree() {
        let p = AdeParams::new(0.3, 0.7, 0.0, 1.0).unwrap();
        let a = simulate_rwpt_in(Execution::Sequential, &p, 2000, 0.1, 5).unwrap();
        let b = simulate_rwpt_in(Execution::Parallel, &p, 2000, 0.1, 5).unwrap();
        assert_eq!(a, b);
    }
}
