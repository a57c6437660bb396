use comic_core::fitness::{aicc, comic_uniform, weighted_mse};
use comic_core::mtpt::{build_transfer_weights_in, local_volumes, mtpt_step_in, KernelOptions, Normalization};
use comic_core::prelude::*;
use comic_core::rwpt::RandomIncrements;
use proptest::prelude::*;

fn sorted_positions(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 2..max).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_symmetric_and_stable(x in sorted_positions(60), d in 0.05f64..3.0, rho in 0.1f64..50.0) {
        let k = build_transfer_weights_in(Execution::default(), &x, d, 0.1, Normalization::Density(rho), KernelOptions::default()).unwrap();
        let w = k.to_dense();
        for i in 0..x.len() {
            for j in 0..x.len() {
                prop_assert!(w[i][j] >= 0.0);
                prop_assert_eq!(w[i][j], w[j][i]);
            }
            prop_assert!(k.row_sums()[i] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn transfer_conserves_mass(
        x in sorted_positions(80),
        d in 0.05f64..3.0,
        local in any::<bool>(),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let dom = Domain::default();
        let norm = if local {
            Normalization::LocalDensity(local_volumes(&x, &dom).unwrap())
        } else {
            Normalization::Density(x.len() as f64 / dom.length())
        };
        let k = build_transfer_weights_in(Execution::default(), &x, d, 0.1, norm, KernelOptions::default()).unwrap();
        let mut r = comic_core::seed::rng(seed);
        let raw: Vec<f64> = (0..x.len()).map(|_| r.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let mut m: Vec<f64> = raw.iter().map(|v| v / total).collect();
        for _ in 0..10 {
            m = mtpt_step_in(Execution::default(), &m, &k).unwrap();
        }
        prop_assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn execution_modes_agree(x in sorted_positions(3000), budget in prop_oneof![Just(0usize), Just(1usize << 25)]) {
        let opts = KernelOptions { storage_budget: budget, ..KernelOptions::default() };
        let rho = x.len() as f64 / 10.0;
        let a = build_transfer_weights_in(Execution::Sequential, &x, 1.0, 0.1, Normalization::Density(rho), opts).unwrap();
        let b = build_transfer_weights_in(Execution::Parallel, &x, 1.0, 0.1, Normalization::Density(rho), opts).unwrap();
        let mut m = vec![0.0; x.len()];
        m[x.len() / 2] = 1.0;
        prop_assert_eq!(mtpt_step_in(Execution::Sequential, &m, &a).unwrap(), mtpt_step_in(Execution::Parallel, &m, &b).unwrap());
    }

    #[test]
    fn voronoi_volumes_partition_the_domain(x in sorted_positions(100)) {
        let dom = Domain::default();
        let v = local_volumes(&x, &dom).unwrap();
        prop_assert!(v.iter().all(|v| *v >= 0.0));
        prop_assert!((v.iter().sum::<f64>() - dom.length()).abs() < 1e-12);
    }

    #[test]
    fn binning_never_overcounts(x in sorted_positions(50), seed in any::<u64>(), n in 1usize..500) {
        let mut locations = x;
        locations.dedup();
        prop_assume!(locations.len() >= 2);
        let obs = ObservationSet::new(locations.clone(), vec![0.0; locations.len()], SpacingMode::Random, NoiseSpec::exact(0)).unwrap();
        let grid = default_grid(&obs).unwrap();
        let e = simulate_rwpt(&AdeParams::new(0.0, 2.0, 0.0, 1.0).unwrap(), n, 0.25, seed).unwrap();
        let counts = grid.counts(e.positions());
        prop_assert!(counts.iter().sum::<usize>() <= n);
        let c = bin_concentrations(&e, &grid).unwrap();
        let binned_mass: f64 = c.iter().zip(grid.widths()).map(|(c, w)| c * w).sum();
        prop_assert!(binned_mass <= 1.0 + 1e-12);
    }

    #[test]
    fn comic_adds_ln_n(a in -200.0f64..200.0, n in 1usize..1_000_000) {
        prop_assert_eq!(comic_uniform(a, n), a + (n as f64).ln());
    }

    #[test]
    fn correction_is_non_negative(a in -200.0f64..200.0, p in 0usize..5, extra in 2usize..100) {
        let k = p + extra;
        prop_assert!(aicc(a, p, k).unwrap() >= a);
    }

    #[test]
    fn criteria_are_permutation_invariant(
        pairs in prop::collection::vec((0.01f64..1.0, 0.0f64..1.0), 3..40),
        rotate in 0usize..40,
    ) {
        let mut shuffled = pairs.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rotate % len);
        shuffled.swap(0, len - 1);
        let score = |v: &[(f64, f64)]| {
            let residuals: Vec<f64> = v.iter().map(|(o, c)| o - c).collect();
            let iid = FitnessReport::iid(&residuals, 2, 3.0).unwrap().comic;
            let locations = (0..v.len()).map(|i| i as f64).collect();
            let obs = ObservationSet::new(locations, v.iter().map(|p| p.0).collect(), SpacingMode::Uniform, NoiseSpec::exact(0)).unwrap();
            let model: Vec<f64> = v.iter().map(|p| p.1).collect();
            (iid, weighted_mse(&obs, &model, 1.0).unwrap().value)
        };
        let (a, b) = (score(&pairs), score(&shuffled));
        prop_assert!((a.0 - b.0).abs() <= 1e-12 * a.0.abs().max(1.0));
        prop_assert!((a.1 - b.1).abs() <= 1e-12 * a.1);
    }

    #[test]
    fn release_translation(a in -3.0f64..3.0, x in -8.0f64..8.0, v in -1.0f64..1.0, d in 0.1f64..2.0) {
        let shifted = AdeParams::new(v, d, a, 1.0).unwrap();
        let origin = AdeParams::new(v, d, 0.0, 1.0).unwrap();
        let lhs = analytic_concentration(&shifted, x, 1.0).unwrap();
        let rhs = analytic_concentration(&origin, x - a, 1.0).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs) + 1e-300);
    }

    #[test]
    fn observations_respect_invariants(alpha in 0.0f64..1.0, seed in any::<u64>(), k in 1usize..60, random in any::<bool>()) {
        let dom = Domain::default();
        let spacing = if random { SpacingMode::Random } else { SpacingMode::Uniform };
        let obs = synthesize_observations(&AdeParams::new(0.0, 1.0, 0.0, 1.0).unwrap(), &dom, k, spacing, NoiseSpec { alpha, seed }).unwrap();
        prop_assert_eq!(obs.k(), k);
        prop_assert!(obs.values.iter().all(|c| *c >= 0.0));
        prop_assert!(obs.locations.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(obs.locations.iter().all(|x| dom.contains(*x)));
    }

    #[test]
    fn common_random_numbers_shift_with_velocity(seed in any::<u64>(), dv in -2.0f64..2.0) {
        let inc = RandomIncrements::draw(200, vec![0.25; 4], seed, Execution::default()).unwrap();
        let base = AdeParams::new(0.5, 1.0, 0.0, 1.0).unwrap();
        let a = inc.propagate(&base, Execution::Sequential);
        let b = inc.propagate(&base.with_transport(0.5 + dv, 1.0), Execution::Parallel);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - x - dv).abs() < 1e-12);
        }
        prop_assert_eq!(a, inc.propagate(&base, Execution::Parallel));
    }
}
