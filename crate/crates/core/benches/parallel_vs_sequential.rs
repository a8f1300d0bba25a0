use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use danzer_core::chabauty::{cf_distance_with, danzer_param_check, DanzerCheckOptions, WindowedSet};
use danzer_core::harness::{alignedbox_summary, metric_suite};
use danzer_core::pointset::NetOracle;
use danzer_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn boxes(c: &mut Criterion) {
    let ring = NetOracle::ring_lattice_z_sqrt2_scaled(0.4).unwrap();
    let mut group = c.benchmark_group("aligned_boxes");
    group.sample_size(10);
    for n in [1_000usize, 10_000] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| alignedbox_summary(&ring, n, 50.0, 100.0, 16, 7, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn danzer_check(c: &mut Criterion) {
    let grid = NetOracle::jittered_grid(2, 0.05, 0.4, 1).unwrap();
    let mut group = c.benchmark_group("danzer_check");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = DanzerCheckOptions {
            r: 0.5,
            trials: 8192,
            seed: 3,
            log_range: 1.0,
            window: 20.0,
            exec,
        };
        group.bench_function(name, |b| b.iter(|| danzer_param_check(&grid, opts).unwrap()));
    }
    group.finish();
}

fn metric(c: &mut Criterion) {
    let grid = NetOracle::jittered_grid(2, 0.5, 0.4, 2).unwrap();
    let a = WindowedSet::sample(&grid, 15.0).unwrap();
    let grid2 = NetOracle::jittered_grid(2, 0.5, 0.4, 3).unwrap();
    let b = WindowedSet::sample(&grid2, 15.0).unwrap();
    let mut group = c.benchmark_group("metric");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("distance", name), |bench| {
            bench.iter(|| cf_distance_with(exec, &a, &b).unwrap())
        });
        group.bench_function(BenchmarkId::new("suite", name), |bench| {
            bench.iter(|| metric_suite(2, 50, 100, &[0.1, 0.5, 0.9], 11, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, boxes, danzer_check, metric);
criterion_main!(benches);
