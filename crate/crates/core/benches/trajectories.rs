use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qedsim::channels::{awgn_projected_vector, estimate_channel_mc};
use qedsim::harness::{simulate, ExperimentConfig};
use qedsim::par::Execution;
use qedsim::qubit::haar_random_state;
use qedsim::signal::{SignalConfig, ToneBank};

fn executions() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn bench_simulate(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        num_states: 20,
        reps_per_state: 10,
        sigma2: 5e-6,
        coeff_sigma: 0.02,
        n_boot: 200,
        seed: 1,
        ..ExperimentConfig::default()
    };
    let mut group = c.benchmark_group("simulate_400_runs");
    group.sample_size(10);
    for (name, exec) in executions() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(simulate(&cfg, exec).unwrap()))
        });
    }
    group.finish();
}

fn bench_channel(c: &mut Criterion) {
    let cfg = SignalConfig::with_defaults(2, 1000.0).unwrap();
    let bank = ToneBank::new(cfg);
    let sigma2 = 0.05 * cfg.duration();
    let mut group = c.benchmark_group("channel_mc_20k");
    group.sample_size(10);
    for (name, exec) in executions() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                let est = estimate_channel_mc(
                    |rng| {
                        let psi = haar_random_state(2, rng)?;
                        awgn_projected_vector(&bank, &psi, sigma2, rng)
                    },
                    20_000,
                    7,
                    exec,
                );
                black_box(est.unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_simulate, bench_channel);
criterion_main!(benches);
