//! Mass-transfer particle tracking.
//!
//! Particles are laid out over the domain with zero mass, except the one
//! nearest the release point, which carries unit mass. They advect with the
//! mean velocity only; diffusion happens by exchanging mass with every
//! neighbour through a Gaussian kernel of bandwidth `sqrt(2 D dt)`:
//!
//! ```text
//! m_i <- m_i - sum_j (m_i - m_j) W_ij,   W_ij = K(s_ij) / rho_ij
//! ```
//!
//! Pure advection preserves inter-particle distances, so the kernel is built
//! once per simulation.
//!
//! Weights below `tail_tolerance * K(0)` are dropped. Positions are sorted, so
//! each particle interacts with a contiguous band of neighbours and only the
//! upper triangle of the symmetric kernel is ever held. Evenly spaced
//! particles use one weight per index offset. Irregular layouts store their
//! band in `f64` when it fits in `storage_budget` pairs, in `f32` when it fits
//! in `compact_budget` pairs, and recompute it on every application
//! otherwise. Mass is conserved in every mode because each pair weight is
//! stored once and the row sums come from the same values.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::exec::Execution;
use crate::model::{AdeParams, Domain};
use crate::rwpt::{step_schedule, ParticleEnsemble};
use crate::seed;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    #[default]
    Uniform,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementSpec {
    pub mode: Placement,
    pub seed: u64,
}

impl PlacementSpec {
    pub fn uniform() -> Self {
        Self { mode: Placement::Uniform, seed: 0 }
    }

    pub fn random(seed: u64) -> Self {
        Self { mode: Placement::Random, seed }
    }
}

/// Initial MTPT layout: sorted positions, unit mass on the particle nearest
/// `release` (lower index on a tie), zero elsewhere.
pub fn init_ensemble(domain: &Domain, n: usize, placement: PlacementSpec, release: f64) -> Result<ParticleEnsemble> {
    if n < 2 {
        return Err(invalid(format!("mass transfer needs at least two particles, got {n}")));
    }
    domain.validate()?;
    if !domain.contains(release) {
        return Err(invalid(format!("release point {release} lies outside [{}, {}]", domain.lo, domain.hi)));
    }
    let positions = match placement.mode {
        Placement::Uniform => crate::model::uniform_points(domain, n),
        Placement::Random => {
            let mut rng = seed::rng(placement.seed);
            let mut xs: Vec<f64> = (0..n).map(|_| rng.random_range(domain.lo..domain.hi)).collect();
            xs.sort_by(f64::total_cmp);
            xs
        }
    };
    let mut nearest = 0;
    for (i, x) in positions.iter().enumerate() {
        if (x - release).abs() < (positions[nearest] - release).abs() {
            nearest = i;
        }
    }
    let mut masses = vec![0.0; n];
    masses[nearest] = 1.0;
    ParticleEnsemble::new(positions, masses)
}

/// Voronoi length of each particle within the domain.
///
/// Interior particles own half the gap to each neighbour; the end particles
/// also own the stretch out to the domain boundary, so the volumes partition
/// the domain.
pub fn local_volumes(positions: &[f64], domain: &Domain) -> Result<Vec<f64>> {
    if positions.is_empty() {
        return Ok(Vec::new());
    }
    if positions.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("positions must be sorted ascending"));
    }
    let mut edges = Vec::with_capacity(positions.len() + 1);
    edges.push(domain.lo);
    edges.extend(positions.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    edges.push(domain.hi);
    Ok(edges.windows(2).map(|e| e[1] - e[0]).collect())
}

/// How the kernel density `rho_ij` is chosen when a simulation builds its kernel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationRule {
    /// `rho = n / |domain|` for every pair.
    #[default]
    ParticleDensity,
    /// `rho_ij = (1/dV_i + 1/dV_j) / 2` from the Voronoi volumes.
    LocalDensity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Normalization {
    Density(f64),
    /// Per-particle volumes; `rho_ij` is the mean of their reciprocals.
    LocalDensity(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelOptions {
    /// Weights smaller than this fraction of the peak weight are dropped.
    pub tail_tolerance: f64,
    /// Largest number of irregular pair weights kept in memory as `f64`.
    pub storage_budget: usize,
    /// Largest number kept as `f32` when the `f64` budget is exceeded.
    #[serde(default = "default_compact_budget")]
    pub compact_budget: usize,
}

fn default_compact_budget() -> usize {
    1 << 29
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { tail_tolerance: 1e-10, storage_budget: 1 << 25, compact_budget: default_compact_budget() }
    }
}

#[derive(Debug, Clone)]
enum Storage {
    /// Equal spacing: `band[d - 1]` couples particles `d` apart.
    Offsets(Vec<f64>),
    /// Row `i` holds weights to `i + 1 .. reach[i]` at `values[start[i]..]`.
    Stored { start: Vec<usize>, values: Vec<f64> },
    Compact { start: Vec<usize>, values: Vec<f32> },
    OnTheFly,
}

/// Symmetric transfer weights `W_ij` with their row sums.
#[derive(Debug, Clone)]
pub struct TransferKernel {
    positions: Vec<f64>,
    diffusion: f64,
    dt: f64,
    normalization: Normalization,
    /// Divisor applied by the stability clamp (1 when inactive).
    scale: f64,
    /// Exclusive end of the upper band of each row.
    reach: Vec<usize>,
    row_sums: Vec<f64>,
    storage: Storage,
}

const CHUNK: usize = 512;

impl TransferKernel {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    /// Factor every raw weight was divided by to keep row sums at most one.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn clamped(&self) -> bool {
        self.scale > 1.0
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn normalization(&self) -> &Normalization {
        &self.normalization
    }

    /// Number of retained pairs `i < j`.
    pub fn pair_count(&self) -> usize {
        self.reach.iter().enumerate().map(|(i, r)| r - i - 1).sum()
    }

    /// True when weights are held as `f32`.
    pub fn is_compact(&self) -> bool {
        matches!(self.storage, Storage::Compact { .. })
    }

    pub fn is_stored(&self) -> bool {
        !matches!(self.storage, Storage::OnTheFly)
    }

    fn peak(&self) -> f64 {
        1.0 / (4.0 * std::f64::consts::PI * self.diffusion * self.dt).sqrt()
    }

    fn inv_spread(&self) -> f64 {
        1.0 / (4.0 * self.diffusion * self.dt)
    }

    /// Weight between particles `i` and `j` straight from the formula.
    fn raw_weight(&self, i: usize, j: usize) -> f64 {
        let s = self.positions[j] - self.positions[i];
        let e = (-s * s * self.inv_spread()).exp();
        match &self.normalization {
            Normalization::Density(rho) => self.peak() / rho / self.scale * e,
            Normalization::LocalDensity(v) => self.peak() * e / (0.5 * (1.0 / v[i] + 1.0 / v[j])) / self.scale,
        }
    }

    /// Row `i` of the upper band, computed from the formula into `out`.
    fn raw_row(&self, i: usize, out: &mut Vec<f64>) {
        let (peak, inv, scale) = (self.peak(), self.inv_spread(), self.scale);
        let x = &self.positions;
        out.clear();
        match &self.normalization {
            Normalization::Density(rho) => {
                let c = peak / rho / scale;
                out.extend(x[i + 1..self.reach[i]].iter().map(|xj| {
                    let s = xj - x[i];
                    c * (-s * s * inv).exp()
                }))
            }
            Normalization::LocalDensity(v) => out.extend((i + 1..self.reach[i]).map(|j| {
                let s = x[j] - x[i];
                peak * (-s * s * inv).exp() / (0.5 * (1.0 / v[i] + 1.0 / v[j])) / scale
            })),
        }
    }

    /// `W_ij`; zero on the diagonal and beyond the truncation radius.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i == j || j >= self.reach[i] {
            return 0.0;
        }
        match &self.storage {
            Storage::Offsets(band) => band[j - i - 1],
            Storage::Stored { start, values } => values[start[i] + j - i - 1],
            Storage::Compact { start, values } => values[start[i] + j - i - 1] as f64,
            Storage::OnTheFly => self.raw_weight(i, j),
        }
    }

    /// Kernel from an explicit symmetric weight matrix, used as given (no
    /// clamp).
    pub fn from_weights(weights: &[Vec<f64>]) -> Result<Self> {
        let n = weights.len();
        for (i, row) in weights.iter().enumerate() {
            check_len(n, row.len())?;
            for (j, w) in row.iter().enumerate() {
                if !(w.is_finite() && *w >= 0.0) {
                    return Err(invalid("weights must be finite and non-negative"));
                }
                if *w != weights[j][i] {
                    return Err(invalid(format!("weights are not symmetric at ({i}, {j})")));
                }
            }
        }
        let mut start = Vec::with_capacity(n);
        let mut values = Vec::new();
        for (i, row) in weights.iter().enumerate() {
            start.push(values.len());
            values.extend_from_slice(&row[i + 1..]);
        }
        let mut kernel = TransferKernel {
            positions: vec![0.0; n],
            diffusion: f64::NAN,
            dt: f64::NAN,
            normalization: Normalization::Density(1.0),
            scale: 1.0,
            reach: vec![n; n],
            row_sums: Vec::new(),
            storage: Storage::Stored { start, values },
        };
        kernel.row_sums = kernel.apply(Execution::Sequential, &vec![1.0; n]);
        Ok(kernel)
    }

    /// Dense copy of the weights, for small kernels.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.weight(i, j)).collect()).collect()
    }

    /// `y = W m`.
    ///
    /// Rows are processed in fixed-size chunks whose partial results are
    /// summed in chunk order, so the output does not depend on the thread
    /// count.
    pub fn apply(&self, exec: Execution, m: &[f64]) -> Vec<f64> {
        let n = m.len();
        let reach = &self.reach;
        let parts = exec.map(n.div_ceil(CHUNK), |c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(n);
            let hi = reach[start..end].iter().copied().max().unwrap_or(end).max(end);
            let mut part = vec![0.0; hi - start];
            let mut scratch = Vec::new();
            for i in start..end {
                let len = reach[i] - i - 1;
                let (mj, pj) = (&m[i + 1..reach[i]], &mut part[i + 1 - start..reach[i] - start]);
                let inflow = match &self.storage {
                    Storage::Offsets(band) => band_row(&band[..len], mj, pj, m[i]),
                    Storage::Stored { start, values } => band_row(&values[start[i]..start[i] + len], mj, pj, m[i]),
                    Storage::Compact { start, values } => band_row(&values[start[i]..start[i] + len], mj, pj, m[i]),
                    Storage::OnTheFly => {
                        self.raw_row(i, &mut scratch);
                        band_row(&scratch, mj, pj, m[i])
                    }
                };
                part[i - start] += inflow;
            }
            (start, part)
        });
        let mut y = vec![0.0; n];
        for (start, part) in parts {
            for (o, v) in part.into_iter().enumerate() {
                y[start + o] += v;
            }
        }
        y
    }

    fn divide_weights(&mut self, by: f64) {
        match &mut self.storage {
            Storage::Offsets(band) => band.iter_mut().for_each(|w| *w /= by),
            Storage::Stored { values, .. } => values.iter_mut().for_each(|w| *w /= by),
            Storage::Compact { values, .. } => values.iter_mut().for_each(|w| *w = (*w as f64 / by) as f32),
            Storage::OnTheFly => {}
        }
        self.scale *= by;
    }
}

pub fn build_transfer_weights(positions: &[f64], diffusion: f64, dt: f64, normalization: Normalization) -> Result<TransferKernel> {
    build_transfer_weights_in(Execution::default(), positions, diffusion, dt, normalization, KernelOptions::default())
}

/// Builds `W_ij = K(s_ij) / rho_ij` for sorted positions.
///
/// If any row sum exceeds one, every weight is divided by the largest row sum
/// so that no particle can give away more mass than it holds; the divisor is
/// available as [`TransferKernel::scale`].
pub fn build_transfer_weights_in(
    exec: Execution,
    positions: &[f64],
    diffusion: f64,
    dt: f64,
    normalization: Normalization,
    options: KernelOptions,
) -> Result<TransferKernel> {
    let n = positions.len();
    if positions.iter().any(|x| !x.is_finite()) {
        return Err(invalid("positions must be finite"));
    }
    if positions.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("positions must be sorted ascending"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("transfer time step must be positive, got {dt}")));
    }
    if !(diffusion > 0.0 && diffusion.is_finite()) {
        return Err(Error::Domain(format!("diffusion must be positive, got {diffusion}")));
    }
    match &normalization {
        Normalization::Density(rho) if !(*rho > 0.0 && rho.is_finite()) => {
            return Err(invalid(format!("density must be positive, got {rho}")));
        }
        Normalization::LocalDensity(v) => {
            check_len(n, v.len())?;
            if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(invalid("local volumes must be positive"));
            }
        }
        _ => {}
    }
    let tol = options.tail_tolerance;
    let cutoff = if tol > 0.0 && tol < 1.0 {
        (4.0 * diffusion * dt * (1.0 / tol).ln()).sqrt()
    } else {
        f64::INFINITY
    };

    let mut kernel = TransferKernel {
        positions: positions.to_vec(),
        diffusion,
        dt,
        normalization,
        scale: 1.0,
        reach: Vec::new(),
        row_sums: Vec::new(),
        storage: Storage::OnTheFly,
    };

    if let (Some(h), Normalization::Density(_)) = (even_spacing(positions), &kernel.normalization) {
        let width = if h > 0.0 { ((cutoff / h).floor() as usize).min(n.saturating_sub(1)) } else { n - 1 };
        let band: Vec<f64> = (1..=width)
            .map(|d| {
                let s = d as f64 * h;
                let k = kernel.peak() * (-s * s * kernel.inv_spread()).exp();
                match kernel.normalization {
                    Normalization::Density(rho) => k / rho,
                    Normalization::LocalDensity(_) => unreachable!(),
                }
            })
            .collect();
        kernel.reach = (0..n).map(|i| (i + width + 1).min(n)).collect();
        kernel.storage = Storage::Offsets(band);
    } else {
        kernel.reach = (0..n)
            .map(|i| {
                let limit = positions[i] + cutoff;
                i + 1 + positions[i + 1..].partition_point(|x| *x <= limit)
            })
            .collect();
        let pairs = kernel.pair_count();
        if pairs <= options.storage_budget {
            let (start, values) = fill_band(exec, &kernel, |w| w);
            kernel.storage = Storage::Stored { start, values };
        } else if pairs <= options.compact_budget {
            let (start, values) = fill_band(exec, &kernel, |w| w as f32);
            kernel.storage = Storage::Compact { start, values };
        }
    }

    let ones = vec![1.0; n];
    kernel.row_sums = kernel.apply(exec, &ones);
    let max_row = kernel.row_sums.iter().copied().fold(0.0, f64::max);
    if max_row > 1.0 {
        kernel.divide_weights(max_row);
        kernel.row_sums = kernel.apply(exec, &ones);
    }
    Ok(kernel)
}

/// Scatters `w * mi` into `part` and returns `sum w * m`, using four
/// accumulators in a fixed order.
fn band_row<T: Copy + Into<f64>>(w: &[T], m: &[f64], part: &mut [f64], mi: f64) -> f64 {
    let mut acc = [0.0; 4];
    let mut wc = w.chunks_exact(4);
    let mut mc = m.chunks_exact(4);
    let mut pc = part.chunks_exact_mut(4);
    for ((w4, m4), p4) in (&mut wc).zip(&mut mc).zip(&mut pc) {
        for l in 0..4 {
            let wl: f64 = w4[l].into();
            acc[l] += wl * m4[l];
            p4[l] += wl * mi;
        }
    }
    let mut tail = 0.0;
    for ((wj, mj), pj) in wc.remainder().iter().zip(mc.remainder()).zip(pc.into_remainder()) {
        let wj: f64 = (*wj).into();
        tail += wj * mj;
        *pj += wj * mi;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Evaluates every retained pair into one flat buffer, row by row.
fn fill_band<T, F>(exec: Execution, kernel: &TransferKernel, convert: F) -> (Vec<usize>, Vec<T>)
where
    T: Copy + Default + Send,
    F: Fn(f64) -> T + Sync + Send,
{
    let n = kernel.len();
    let mut start = Vec::with_capacity(n);
    let mut acc = 0;
    for (i, r) in kernel.reach.iter().enumerate() {
        start.push(acc);
        acc += r - i - 1;
    }
    let mut values = vec![T::default(); acc];
    let mut rows: Vec<&mut [T]> = Vec::with_capacity(n);
    let mut rest = values.as_mut_slice();
    for (i, r) in kernel.reach.iter().enumerate() {
        let (row, tail) = rest.split_at_mut(r - i - 1);
        rows.push(row);
        rest = tail;
    }
    exec.for_each_mut(&mut rows, |i, row| {
        let mut buf = Vec::with_capacity(row.len());
        kernel.raw_row(i, &mut buf);
        for (w, v) in row.iter_mut().zip(buf) {
            *w = convert(v);
        }
    });
    drop(rows);
    (start, values)
}

/// Spacing `h` when `positions` are evenly spaced to round-off.
fn even_spacing(positions: &[f64]) -> Option<f64> {
    let n = positions.len();
    if n < 2 {
        return Some(0.0);
    }
    let h = (positions[n - 1] - positions[0]) / (n - 1) as f64;
    let tol = 1e-9 * h.abs().max(f64::MIN_POSITIVE);
    positions
        .iter()
        .enumerate()
        .all(|(i, x)| (x - (positions[0] + i as f64 * h)).abs() <= tol)
        .then_some(h)
}

pub fn mtpt_step(masses: &[f64], kernel: &TransferKernel) -> Result<Vec<f64>> {
    mtpt_step_in(Execution::default(), masses, kernel)
}

/// One simultaneous transfer: `m_i - sum_j (m_i - m_j) W_ij` from the old masses.
pub fn mtpt_step_in(exec: Execution, masses: &[f64], kernel: &TransferKernel) -> Result<Vec<f64>> {
    check_len(kernel.len(), masses.len())?;
    let inflow = kernel.apply(exec, masses);
    Ok(masses
        .iter()
        .zip(kernel.row_sums())
        .zip(inflow)
        .map(|((m, r), y)| m - r * m + y)
        .collect())
}

/// How particle masses turn into concentrations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// `c_i = m_i n / |domain|`.
    #[default]
    MeanVolume,
    /// `c_i = m_i / dV_i` with the Voronoi volume.
    LocalVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MtptConfig {
    pub dt: f64,
    pub normalization: NormalizationRule,
    pub readout: Readout,
    #[serde(default)]
    pub kernel: KernelOptions,
    /// Translate the layout so the particle carrying the initial mass sits
    /// exactly on the release point. Without this the plume starts up to half
    /// a particle spacing away from it.
    #[serde(default = "yes")]
    pub align_release: bool,
}

fn yes() -> bool {
    true
}

impl Default for MtptConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            normalization: NormalizationRule::ParticleDensity,
            readout: Readout::MeanVolume,
            kernel: KernelOptions::default(),
            align_release: true,
        }
    }
}

/// State of an MTPT simulation at the final time.
#[derive(Debug, Clone, PartialEq)]
pub struct MtptSolution {
    /// Advected (and release-aligned) positions, ascending.
    pub positions: Vec<f64>,
    pub masses: Vec<f64>,
    /// Voronoi volumes in the co-moving frame.
    pub volumes: Vec<f64>,
    pub concentrations: Vec<f64>,
    /// Clamp divisor of the kernel (1 when the clamp never fired).
    pub kernel_scale: f64,
    pub steps: usize,
    /// Set when any particle ended with negative mass.
    pub negative_mass: bool,
}

impl MtptSolution {
    /// Piecewise-linear interpolation of the particle concentrations; zero
    /// outside the particle cloud.
    pub fn concentration_at(&self, xs: &[f64]) -> Vec<f64> {
        let p = &self.positions;
        let c = &self.concentrations;
        xs.iter()
            .map(|&x| {
                if p.is_empty() || x < p[0] || x > p[p.len() - 1] {
                    return 0.0;
                }
                let j = p.partition_point(|q| *q <= x);
                if j == p.len() {
                    return c[j - 1];
                }
                let (x0, x1) = (p[j - 1], p[j]);
                let t = (x - x0) / (x1 - x0);
                c[j - 1] + t * (c[j] - c[j - 1])
            })
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

pub fn simulate_mtpt(params: &AdeParams, domain: &Domain, n: usize, config: &MtptConfig, placement: PlacementSpec) -> Result<MtptSolution> {
    simulate_mtpt_in(Execution::default(), params, domain, n, config, placement)
}

pub fn simulate_mtpt_in(
    exec: Execution,
    params: &AdeParams,
    domain: &Domain,
    n: usize,
    config: &MtptConfig,
    placement: PlacementSpec,
) -> Result<MtptSolution> {
    params.validate()?;
    let ensemble = init_ensemble(domain, n, placement, params.release)?;
    let positions = ensemble.positions();
    let volumes = local_volumes(positions, domain)?;
    let normalization = match config.normalization {
        NormalizationRule::ParticleDensity => Normalization::Density(n as f64 / domain.length()),
        NormalizationRule::LocalDensity => Normalization::LocalDensity(volumes.clone()),
    };
    let schedule = step_schedule(params.final_time, config.dt)?;

    let mut kernels: Vec<TransferKernel> = Vec::with_capacity(2);
    let mut masses = ensemble.masses().to_vec();
    for &h in &schedule {
        if kernels.last().is_none_or(|k| k.dt() != h) {
            kernels.push(build_transfer_weights_in(exec, positions, params.diffusion, h, normalization.clone(), config.kernel)?);
        }
        masses = mtpt_step_in(exec, &masses, kernels.last().unwrap())?;
    }
    let kernel_scale = kernels.iter().map(TransferKernel::scale).fold(1.0, f64::max);

    let mut shift = params.velocity * params.final_time;
    if config.align_release {
        let carrier = ensemble.masses().iter().position(|m| *m != 0.0).unwrap_or(0);
        shift += params.release - positions[carrier];
    }
    let concentrations = match config.readout {
        Readout::MeanVolume => {
            let per = n as f64 / domain.length();
            masses.iter().map(|m| m * per).collect()
        }
        Readout::LocalVolume => masses.iter().zip(&volumes).map(|(m, v)| m / v).collect(),
    };
    Ok(MtptSolution {
        positions: positions.iter().map(|x| x + shift).collect(),
        negative_mass: masses.iter().any(|m| *m < 0.0),
        masses,
        volumes,
        concentrations,
        kernel_scale,
        steps: schedule.len(),
    })
}
