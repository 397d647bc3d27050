use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vcsra::channel::ModelTag;
use vcsra::config::ScenarioConfig;
use vcsra::montecarlo::{estimate_rates, AvailabilitySamples, Execution};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn scenario(model: ModelTag) -> ScenarioConfig {
    ScenarioConfig {
        model,
        m: 64,
        n_r: 4,
        lambda_db: 6.0,
        trials: 200,
        ..ScenarioConfig::default()
    }
}

fn availability(c: &mut Criterion) {
    let mut group = c.benchmark_group("availability");
    group.sample_size(10);
    for model in [ModelTag::Simplified, ModelTag::Practical] {
        let cfg = scenario(model);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, model), &cfg, |b, cfg| {
                b.iter(|| AvailabilitySamples::draw(cfg, cfg.trials, 4, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn rates(c: &mut Criterion) {
    let mut group = c.benchmark_group("rates");
    group.sample_size(10);
    for model in [ModelTag::Simplified, ModelTag::Practical] {
        let cfg = ScenarioConfig {
            trials: 50,
            ..scenario(model)
        };
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, model), &cfg, |b, cfg| {
                b.iter(|| estimate_rates(cfg, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, availability, rates);
criterion_main!(benches);
