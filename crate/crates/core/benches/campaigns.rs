use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use etaforge::campaign::{run_suite, CampaignConfig, Suite};
use etaforge::par::Execution;

fn campaigns(c: &mut Criterion) {
    let cases = [
        (Suite::FunctionalEq, CampaignConfig { trials: Some(200), ..Default::default() }),
        (Suite::Omega, CampaignConfig { trials: Some(2000), ..Default::default() }),
        (Suite::Reciprocity, CampaignConfig { order: Some(120), ..Default::default() }),
    ];
    let mut group = c.benchmark_group("campaigns");
    group.sample_size(10);
    for (suite, cfg) in cases {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let cfg = CampaignConfig { execution: exec, ..cfg.clone() };
            group.bench_with_input(BenchmarkId::new(suite.name(), format!("{exec:?}")), &cfg, |b, cfg| {
                b.iter(|| black_box(run_suite(suite, cfg)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, campaigns);
criterion_main!(benches);
