//! Canonical experiments.
//!
//! - `E1`: sweeps on exact, evenly spaced data (v = 0) for k = 10, 30, 200.
//! - `E2`: parameter recovery (v = D = 1) and the sweep with per-n fitting.
//! - `E3`: parameter recovery from randomly located data.
//! - `E4`: MTPT with randomly placed particles scored with the integral entropy.
//! - `E5`: the weighted criterion on randomly located data.
//! - `E6`: sweeps against noisy data, alpha in {1/3, 1/9, 1/81}.

use comic_core::estimation::log_spaced_counts;
use comic_core::prelude::*;

use crate::config::{ExperimentId, Series, SeriesKind};

/// Ensemble size for stochastic sweeps.
pub const ENSEMBLE: usize = 30;
/// Seeds per batch of RWPT estimates.
pub const ESTIMATE_SEEDS: usize = 20;

pub fn description(id: ExperimentId) -> &'static str {
    match id {
        ExperimentId::E1 => "COMIC sweeps on exact evenly spaced data, k = 10, 30, 200, RWPT and MTPT",
        ExperimentId::E2 => "recovery of (v, D) = (1, 1) from k = 10 and 30 evenly spaced points; MTPT sweep with per-n fitting",
        ExperimentId::E3 => "recovery of (v, D) from k = 10 and 30 randomly located points",
        ExperimentId::E4 => "MTPT with randomly placed particles, integral entropy, 30-realization ensemble",
        ExperimentId::E5 => "weighted-error criterion on k = 30 random points: sweeps and recovery",
        ExperimentId::E6 => "sweeps against noisy data, alpha = 1/3, 1/9, 1/81, both criteria",
        ExperimentId::Custom => "series given in the config file",
    }
}

fn transported() -> AdeParams {
    AdeParams { velocity: 1.0, diffusion: 1.0, release: 0.0, final_time: 1.0 }
}

fn sweep(name: String, method: Method) -> Series {
    let mut s = Series::new(name, SeriesKind::Sweep, method);
    if method == Method::Rwpt {
        s.realizations = ENSEMBLE;
    }
    s
}

fn estimate(name: String, method: Method, n: usize) -> Series {
    let mut s = Series::new(name, SeriesKind::Estimate, method);
    s.params = transported();
    s.n = Some(n);
    if method == Method::Rwpt {
        s.realizations = ESTIMATE_SEEDS;
    }
    s
}

pub fn canonical_series(id: ExperimentId) -> Vec<Series> {
    match id {
        ExperimentId::E1 => {
            let mut out = Vec::new();
            for k in [10, 30, 200] {
                for method in [Method::Rwpt, Method::Mtpt] {
                    let mut s = sweep(format!("{}_k{k}", method_name(method)), method);
                    s.k = k;
                    out.push(s);
                }
            }
            out
        }
        ExperimentId::E2 => {
            let mut out = Vec::new();
            for k in [30, 10] {
                for (method, n) in [(Method::Rwpt, 20_000), (Method::Mtpt, 3000)] {
                    let mut s = estimate(format!("{}_k{k}", method_name(method)), method, n);
                    s.k = k;
                    out.push(s);
                }
            }
            let mut s = sweep("mtpt_reestimate".into(), Method::Mtpt);
            s.params = transported();
            s.grid = Some(log_spaced_counts(2.0, 4.0, 10).expect("fixed grid"));
            s.reestimate = true;
            out.push(s);
            out
        }
        ExperimentId::E3 => [(30, Method::Rwpt, 5000), (10, Method::Rwpt, 20_000), (30, Method::Mtpt, 3000), (10, Method::Mtpt, 3000)]
            .into_iter()
            .map(|(k, method, n)| {
                let mut s = estimate(format!("{}_k{k}", method_name(method)), method, n);
                s.k = k;
                s.spacing = SpacingMode::Random;
                s
            })
            .collect(),
        ExperimentId::E4 => {
            let mut s = sweep("mtpt_random_integral".into(), Method::Mtpt);
            s.placement = Placement::Random;
            s.entropy = EntropyRule::Integral;
            s.realizations = ENSEMBLE;
            vec![s]
        }
        ExperimentId::E5 => {
            let mut out = Vec::new();
            for method in [Method::Rwpt, Method::Mtpt] {
                let mut s = sweep(format!("{}_weighted", method_name(method)), method);
                s.params = transported();
                s.spacing = SpacingMode::Random;
                s.criterion = CriterionKind::Weighted;
                s.entropy = EntropyRule::ConstantVolume;
                out.push(s);
            }
            for (method, n) in [(Method::Rwpt, 5000), (Method::Mtpt, 3000)] {
                let mut s = estimate(format!("{}_weighted_fit", method_name(method)), method, n);
                s.spacing = SpacingMode::Random;
                s.criterion = CriterionKind::Weighted;
                out.push(s);
            }
            out
        }
        ExperimentId::E6 => {
            let mut out = Vec::new();
            for (label, alpha) in [("a3", 1.0 / 3.0), ("a9", 1.0 / 9.0), ("a81", 1.0 / 81.0)] {
                for method in [Method::Rwpt, Method::Mtpt] {
                    for criterion in [CriterionKind::IidGaussian, CriterionKind::Weighted] {
                        let tag = if criterion == CriterionKind::Weighted { "weighted" } else { "iid" };
                        let mut s = sweep(format!("{}_{tag}_{label}", method_name(method)), method);
                        s.alpha = alpha;
                        s.criterion = criterion;
                        if criterion == CriterionKind::Weighted {
                            s.entropy = EntropyRule::ConstantVolume;
                        }
                        s.realizations = ENSEMBLE;
                        s.resample_data = true;
                        out.push(s);
                    }
                }
            }
            out
        }
        ExperimentId::Custom => Vec::new(),
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Rwpt => "rwpt",
        Method::Mtpt => "mtpt",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn canonical_configs_resolve() {
        for id in ExperimentId::CANONICAL {
            let r = ExperimentConfig::canonical(id).resolve(None).unwrap();
            assert!(!r.series.is_empty(), "{id}");
        }
    }

    #[test]
    fn noisy_mtpt_series_mirror_the_exact_sweep() {
        let e1 = canonical_series(ExperimentId::E1).into_iter().find(|s| s.name == "mtpt_k30").unwrap();
        let mut e6 = canonical_series(ExperimentId::E6).into_iter().find(|s| s.name == "mtpt_iid_a3").unwrap();
        e6.alpha = 0.0;
        let (a, b) = (e1.sweep_spec(5), e6.sweep_spec(5));
        assert_eq!((a.params, a.k, a.solver, a.entropy, a.grid.clone()), (b.params, b.k, b.solver, b.entropy, b.grid.clone()));
        let (x, y) = (a.observations(0).unwrap(), b.observations(7).unwrap());
        assert_eq!((x.locations, x.values), (y.locations, y.values));
    }
}
