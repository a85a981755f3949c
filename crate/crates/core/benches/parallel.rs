use std::hint::black_box;

use aqss_core::analysis::{mc_purity, McPlan};
use aqss_core::channels::{apply_product_with, apply_with, sample_ruc, ChannelFamily};
use aqss_core::random::random_pure_state;
use aqss_core::{ExecMode, RngStream};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn channel_apply(c: &mut Criterion) {
    let mut rng = RngStream::new(11, 0);
    let mut group = c.benchmark_group("channel_apply");
    group.sample_size(10);

    let single = sample_ruc(32, 2048, &mut rng).unwrap();
    let rho = random_pure_state(32, &mut rng).unwrap();
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "d32_n2048"), &mode, |b, &mode| {
            b.iter(|| apply_with(mode, black_box(&single), black_box(&rho)).unwrap())
        });
    }

    let family = ChannelFamily::new(vec![
        sample_ruc(8, 1200, &mut rng).unwrap(),
        sample_ruc(8, 1200, &mut rng).unwrap(),
    ])
    .unwrap();
    let joint = random_pure_state(64, &mut rng).unwrap();
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "product_d8_n1200"), &mode, |b, &mode| {
            b.iter(|| apply_product_with(mode, black_box(&family), black_box(&joint)).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("mc_purity");
    group.sample_size(10);
    for (name, mode) in MODES {
        let plan = McPlan::new(64, 5).with_exec(mode);
        group.bench_with_input(BenchmarkId::new(name, "d3_n64_t64"), &plan, |b, plan| {
            b.iter(|| mc_purity(3, 64, 64, plan).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, channel_apply, monte_carlo);
criterion_main!(benches);
