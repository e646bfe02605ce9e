use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ietlab::dynamics::{default_ladder, orbit};
use ietlab::exec::Execution;
use ietlab::experiment::{run_alpha_sweep, sample_alpha, ExperimentConfig};
use ietlab::iet::{build_composition, CompositionSpec, Iet};
use ietlab::numerics::{Fixed, NumericsConfig, Rational, Scalar};

fn spec<S: Scalar>(cfg: &NumericsConfig) -> CompositionSpec<S> {
    let t = Iet::parse(&["1/2", "1/4", "1/4"], &[3, 2, 1], cfg).unwrap();
    CompositionSpec::new(
        vec![t.clone(), t],
        vec![S::one(cfg), S::from_ratio(3, 2, cfg)],
    )
    .unwrap()
}

fn sweep(c: &mut Criterion) {
    let cfg = NumericsConfig::default();
    let mut config = ExperimentConfig::new(spec::<Fixed>(&cfg), 16, 1, cfg);
    config.diagnostic.ladder = default_ladder(8, 14);
    config.diagnostic.idoc_depth = 1000;
    let mut group = c.benchmark_group("alpha_sweep");
    group.sample_size(10);
    for (name, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_function(name, |b| {
            b.iter(|| run_alpha_sweep(black_box(&config), exec).unwrap())
        });
    }
    group.finish();
}

fn orbits(c: &mut Criterion) {
    let cfg = NumericsConfig::default();
    let alpha: Fixed = sample_alpha(7, 0, &cfg);
    let fixed = build_composition(&spec::<Fixed>(&cfg), &alpha).unwrap();
    let alpha_q = Rational::new(123_457, 1_000_003);
    let exact = build_composition(&spec::<Rational>(&cfg), &alpha_q).unwrap();
    let mut group = c.benchmark_group("orbit_10k");
    group.bench_function(BenchmarkId::new("fixed", cfg.precision_bits()), |b| {
        b.iter(|| orbit(&fixed, black_box(&Fixed::from_ratio(1, 7, &cfg)), 10_000).unwrap())
    });
    group.bench_function("rational", |b| {
        b.iter(|| orbit(&exact, black_box(&Rational::new(1, 7)), 10_000).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sweep, orbits);
criterion_main!(benches);
