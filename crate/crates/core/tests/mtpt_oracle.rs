use comic_core::mtpt::{build_transfer_weights, init_ensemble, local_volumes, mtpt_step, Normalization};
use comic_core::prelude::*;
use comic_core::seed::rng;
use rand::Rng;

// Dense weights written out from the kernel definition, with the same tail
// cutoff (relative weight 1e-10) and largest-row-sum clamp.
fn dense_weights(x: &[f64], d: f64, dt: f64, rho: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && (x[i] - x[j]).powi(2) <= 4.0 * d * dt * 1e10f64.ln() {
                let s = x[i] - x[j];
                w[i][j] = (-s * s / (4.0 * d * dt)).exp() / (4.0 * std::f64::consts::PI * d * dt).sqrt() / rho(i, j);
            }
        }
    }
    let max_row = w.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    if max_row > 1.0 {
        w.iter_mut().flatten().for_each(|v| *v /= max_row);
    }
    w
}

// m <- (I - diag(W 1) + W) m
fn dense_step(w: &[Vec<f64>], m: &[f64]) -> Vec<f64> {
    let n = m.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = 1.0 - w[i].iter().sum::<f64>();
        for j in 0..n {
            if i != j {
                a[i][j] += w[i][j];
            }
        }
    }
    a.iter().map(|row| row.iter().zip(m).map(|(x, y)| x * y).sum()).collect()
}

#[test]
fn small_kernels_match_dense_iteration() {
    let mut r = rng(4);
    for trial in 0..200 {
        let n = 2 + trial % 4;
        let mut x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        x.sort_by(f64::total_cmp);
        let d = r.random_range(0.1..2.0);
        let rho = r.random_range(0.5..5.0);
        let w = dense_weights(&x, d, 0.1, |_, _| rho);
        let kernel = build_transfer_weights(&x, d, 0.1, Normalization::Density(rho)).unwrap();
        let mut m: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        let mut oracle = m.clone();
        for _ in 0..20 {
            m = mtpt_step(&m, &kernel).unwrap();
            oracle = dense_step(&w, &oracle);
        }
        for (a, b) in m.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-14, "trial {trial}: {a} vs {b}");
        }
    }
}

#[test]
fn local_density_kernels_match_dense_iteration() {
    let mut r = rng(5);
    let dom = Domain::new(-2.0, 2.0).unwrap();
    for trial in 0..100 {
        let n = 2 + trial % 4;
        let mut x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        x.sort_by(f64::total_cmp);
        let v = local_volumes(&x, &dom).unwrap();
        let w = dense_weights(&x, 1.0, 0.1, |i, j| 0.5 * (1.0 / v[i] + 1.0 / v[j]));
        let kernel = build_transfer_weights(&x, 1.0, 0.1, Normalization::LocalDensity(v)).unwrap();
        let m0 = vec![0.25; n];
        let (a, b) = (mtpt_step(&m0, &kernel).unwrap(), dense_step(&w, &m0));
        for (a, b) in a.iter().zip(&b) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}

#[test]
fn small_simulations_match_dense_iteration() {
    let dom = Domain::default();
    let p = AdeParams::new(0.5, 1.0, 0.0, 1.0).unwrap();
    for n in 2..=5 {
        for placement in [PlacementSpec::uniform(), PlacementSpec::random(n as u64)] {
            let sol = simulate_mtpt(&p, &dom, n, &MtptConfig::default(), placement).unwrap();
            let init = init_ensemble(&dom, n, placement, 0.0).unwrap();
            let w = dense_weights(init.positions(), 1.0, 0.1, |_, _| n as f64 / dom.length());
            let mut m = init.masses().to_vec();
            for _ in 0..sol.steps {
                m = dense_step(&w, &m);
            }
            assert_eq!(sol.steps, 10);
            for (a, b) in sol.masses.iter().zip(&m) {
                assert!((a - b).abs() < 1e-14, "n {n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn conserves_mass_over_many_steps() {
    let dom = Domain::default();
    for n in [10, 1000, 10_000] {
        for placement in [PlacementSpec::uniform(), PlacementSpec::random(17)] {
            let e = init_ensemble(&dom, n, placement, 0.0).unwrap();
            let kernel = build_transfer_weights(e.positions(), 1.0, 0.1, Normalization::Density(n as f64 / dom.length())).unwrap();
            let mut m = e.masses().to_vec();
            for _ in 0..100 {
                m = mtpt_step(&m, &kernel).unwrap();
                assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn approaches_the_analytic_solution() {
    let dom = Domain::default();
    let p = AdeParams::new(0.0, 1.0, 0.0, 1.0).unwrap();
    let max_error = |n: usize| {
        let sol = simulate_mtpt(&p, &dom, n, &MtptConfig::default(), PlacementSpec::uniform()).unwrap();
        sol.positions
            .iter()
            .zip(&sol.concentrations)
            .map(|(x, c)| (c - analytic_concentration(&p, *x, 1.0).unwrap()).abs())
            .fold(0.0, f64::max)
    };
    let errors: Vec<f64> = [300, 1000, 3000].into_iter().map(max_error).collect();
    assert!(errors[2] < 0.01, "{errors:?}");
    assert!(errors.windows(2).all(|e| e[1] < e[0]), "{errors:?}");
}

#[test]
fn advection_does_not_change_masses() {
    let dom = Domain::default();
    let still = AdeParams::new(0.0, 1.0, 0.0, 1.0).unwrap();
    let moving = AdeParams::new(2.5, 1.0, 0.0, 1.0).unwrap();
    for placement in [PlacementSpec::uniform(), PlacementSpec::random(3)] {
        let a = simulate_mtpt(&still, &dom, 500, &MtptConfig::default(), placement).unwrap();
        let b = simulate_mtpt(&moving, &dom, 500, &MtptConfig::default(), placement).unwrap();
        assert_eq!(a.masses, b.masses);
        for (x, y) in a.positions.iter().zip(&b.positions) {
            assert!((y - x - 2.5).abs() < 1e-12);
        }
    }
}

#[test]
fn simulations_are_bit_reproducible() {
    let dom = Domain::default();
    let p = AdeParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
    for placement in [PlacementSpec::uniform(), PlacementSpec::random(21)] {
        let a = simulate_mtpt(&p, &dom, 2000, &MtptConfig::default(), placement).unwrap();
        let b = simulate_mtpt(&p, &dom, 2000, &MtptConfig::default(), placement).unwrap();
        assert_eq!(a, b);
    }
}
