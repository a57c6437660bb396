use std::hint::black_box;

use comic_core::mtpt::{build_transfer_weights_in, init_ensemble, KernelOptions, Normalization};
use comic_core::prelude::*;
use comic_core::rwpt::{step_schedule, RandomIncrements};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn kernel_apply(c: &mut Criterion) {
    let dom = Domain::default();
    let mut group = c.benchmark_group("kernel_apply");
    for n in [2_000, 20_000] {
        let e = init_ensemble(&dom, n, PlacementSpec::random(1), 0.0).unwrap();
        let rho = Normalization::Density(n as f64 / dom.length());
        let kernel = build_transfer_weights_in(Execution::default(), e.positions(), 1.0, 0.1, rho, KernelOptions::default()).unwrap();
        let m = vec![1.0 / n as f64; n];
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| b.iter(|| kernel.apply(exec, black_box(&m))));
        }
    }
    group.finish();
}

fn kernel_build(c: &mut Criterion) {
    let dom = Domain::default();
    let n = 10_000;
    let e = init_ensemble(&dom, n, PlacementSpec::random(2), 0.0).unwrap();
    let mut group = c.benchmark_group("kernel_build");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                let rho = Normalization::Density(n as f64 / dom.length());
                build_transfer_weights_in(exec, black_box(e.positions()), 1.0, 0.1, rho, KernelOptions::default()).unwrap()
            })
        });
    }
    group.finish();
}

fn rwpt_propagate(c: &mut Criterion) {
    let p = AdeParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
    let inc = RandomIncrements::draw(200_000, step_schedule(1.0, 0.1).unwrap(), 3, Execution::default()).unwrap();
    let mut group = c.benchmark_group("rwpt_propagate");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| inc.propagate(black_box(&p), exec)));
    }
    group.finish();
}

criterion_group!(benches, kernel_apply, kernel_build, rwpt_propagate);
criterion_main!(benches);
