//! Lagrangian particle tracking for the one-dimensional advection-diffusion
//! equation, scored with the computational information criterion (COMIC).
//!
//! The crate is organised around the pipeline used to pick a particle count:
//!
//! - [`model`]: the analytic Green's-function solution and synthetic data.
//! - [`rwpt`]: random-walk particle tracking and histogram binning.
//! - [`mtpt`]: mass-transfer particle tracking with a Gaussian kernel.
//! - [`fitness`]: AIC/AICc, COMIC variants and the weighted-MSE criterion.
//! - [`optimize`] and [`estimation`]: Nelder-Mead, parameter recovery and
//!   particle-number sweeps.
//!
//! Inner loops (per-particle random walks, kernel application, sweep points)
//! run on rayon when the `parallel` feature is enabled. Every entry point that
//! parallelises takes an [`Execution`] so results can be compared against the
//! sequential path; both produce bit-identical output.

pub mod error;
pub mod estimation;
pub mod exec;
pub mod fitness;
pub mod model;
pub mod mtpt;
pub mod optimize;
pub mod rwpt;
pub mod seed;

pub use error::{Error, Result};
pub use exec::Execution;

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::estimation::{
        estimate_parameters, sweep_particle_numbers, CriterionKind, EntropyRule,
        EstimationResult, EstimationSpec, Method, SweepCurve, SweepSpec,
    };
    pub use crate::exec::Execution;
    pub use crate::fitness::FitnessReport;
    pub use crate::model::{
        analytic_concentration, synthesize_observations, AdeParams, Domain, NoiseSpec,
        ObservationSet, SpacingMode,
    };
    pub use crate::mtpt::{simulate_mtpt, MtptConfig, MtptSolution, Placement, PlacementSpec};
    pub use crate::rwpt::{bin_concentrations, default_grid, simulate_rwpt, BinGrid, ParticleEnsemble};
}
