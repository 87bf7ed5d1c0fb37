use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use intricacy::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn system(d: usize, n: usize) -> JointDistribution {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    random_system(SystemShape::new(d, n).unwrap(), &mut rng, 0.0)
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    for (d, n) in [(2, 12), (4, 8)] {
        let dist = system(d, n);
        let table = build_table(&LambdaSpec::Lebesgue, n).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("d{d}n{n}")), &dist, |b, dist| {
                b.iter(|| intricacy_exact_with(dist, &table, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    let dist = system(2, 10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| intricacy_mc_with(&dist, &LambdaSpec::Lebesgue, 50_000, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn optimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximize");
    group.sample_size(10);
    let shape = SystemShape::new(2, 5).unwrap();
    let table = build_table(&LambdaSpec::Lebesgue, 5).unwrap();
    for (name, exec) in MODES {
        let config = OptimizerConfig { restarts: 4, exec, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| maximize(shape, &table, &config).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, exact, monte_carlo, optimize);
criterion_main!(benches);
