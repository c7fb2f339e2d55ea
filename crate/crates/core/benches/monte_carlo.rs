use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parkrelay::channel::RadioConfig;
use parkrelay::engine::{Execution, StreamSeed};
use parkrelay::parking::{ParkingModel, Relay};
use parkrelay::simulation::{estimate_outage, outage_day_profile, DayProfileOptions, DayScenario};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn outage_trials(c: &mut Criterion) {
    let model = ParkingModel::synthetic_default();
    let cfg = RadioConfig::default();
    let relays: Vec<Relay> = [9u8, 8, 10].iter().map(|&h| Relay::observed_at(h, 15.0).unwrap()).collect();
    let mut group = c.benchmark_group("outage_trials_1e6");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| estimate_outage(black_box(&relays), &model, &cfg, 1_000_000, StreamSeed(1), exec).unwrap())
        });
    }
    group.finish();
}

fn day_profile(c: &mut Criterion) {
    let model = ParkingModel::synthetic_default();
    let cfg = RadioConfig::default();
    let scenario = DayScenario {
        replications: 100,
        ..DayScenario::default()
    };
    let opts = DayProfileOptions::default();
    let mut group = c.benchmark_group("day_profile_100_days");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| outage_day_profile(&model, &cfg, black_box(&scenario), &opts, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, outage_trials, day_profile);
criterion_main!(benches);
