//! Compares the rayon data-parallel paths against their sequential fallbacks
//! on the two batch workloads: Monte Carlo monitoring and detector sweeps.

use std::collections::BTreeSet;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use zeno_core::monitor::{monitored_batch_par, monitored_batch_seq, MonitorPlacement};
use zeno_core::schedule::{build_schedule, LogicBit, ProtocolParams, SliceLocator};
use zeno_core::sweep::{detector_sweep_par, detector_sweep_seq};

fn bench_monte_carlo(c: &mut Criterion) {
    let schedule = build_schedule(&ProtocolParams::new(5, 5, LogicBit::Zero)).unwrap();
    let monitor: BTreeSet<SliceLocator> = schedule.inner_slices().into_iter().collect();
    let n_runs = 20_000u64;

    let mut group = c.benchmark_group("monte_carlo_batch");
    group.sample_size(20);
    group.bench_with_input(BenchmarkId::new("sequential", n_runs), &n_runs, |b, &n| {
        b.iter(|| monitored_batch_seq(&schedule, &monitor, MonitorPlacement::BeforeAbsorb, 7, n))
    });
    group.bench_with_input(BenchmarkId::new("parallel", n_runs), &n_runs, |b, &n| {
        b.iter(|| monitored_batch_par(&schedule, &monitor, MonitorPlacement::BeforeAbsorb, 7, n))
    });
    group.finish();
}

fn bench_detector_sweep(c: &mut Criterion) {
    let ms: Vec<u32> = (1..=40).collect();
    let ns: Vec<u32> = (1..=40).collect();

    let mut group = c.benchmark_group("detector_sweep");
    group.sample_size(20);
    group.bench_function("sequential", |b| {
        b.iter(|| detector_sweep_seq(&ms, &ns, LogicBit::One).unwrap())
    });
    group.bench_function("parallel", |b| {
        b.iter(|| detector_sweep_par(&ms, &ns, LogicBit::One).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_monte_carlo, bench_detector_sweep);
criterion_main!(benches);
