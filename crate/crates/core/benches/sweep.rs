use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use huygens::regions::{region_map, run_decay_panel, DecayFitOptions, GridSpec, Spacing};
use huygens::verify::{run_verify, VerifyOptions};
use huygens::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn region_maps(c: &mut Criterion) {
    let mut g = c.benchmark_group("region_map");
    for n in [100, 400] {
        let grid = GridSpec { x_min: 1e-3, x_max: 10.0, y_min: 1e-3, y_max: 10.0, nx: n, ny: n, spacing: Spacing::Log };
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n * n), &grid, |b, grid| {
                b.iter(|| region_map(grid, 0.5, 0.2, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn verify_suite(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = VerifyOptions { draws: 2000, exec, decay_panel: false, ..VerifyOptions::default() };
        g.bench_function(name, |b| b.iter(|| run_verify(&opts).unwrap()));
    }
    g.finish();
}

fn decay_panel(c: &mut Criterion) {
    let mut g = c.benchmark_group("decay_panel");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| run_decay_panel(exec, &DecayFitOptions::default()).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, region_maps, verify_suite, decay_panel);
criterion_main!(benches);
