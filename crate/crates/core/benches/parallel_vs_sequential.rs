use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use spikescope::battery::{run_battery, BatteryConfig};
use spikescope::par::Exec;
use spikescope::process::simulate;
use spikescope::spikes::{SpikeMatrix, SpikeTrain, TraceMeta};
use spikescope::stats::{fano_factor, window_counts};

fn layer(nodes: u64, n: usize) -> SpikeMatrix {
    let trains: Vec<SpikeTrain> = (0..nodes).map(|s| simulate(0.3, n, s).unwrap()).collect();
    SpikeMatrix::from_trains(&trains, TraceMeta::default()).unwrap()
}

fn battery(c: &mut Criterion) {
    let sm = layer(64, 10_000);
    let mut g = c.benchmark_group("battery_64x10000");
    for exec in [Exec::Sequential, Exec::Parallel] {
        let cfg = BatteryConfig { exec, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &cfg, |b, cfg| {
            b.iter(|| run_battery(black_box(&sm), cfg).unwrap())
        });
    }
    g.finish();
}

fn monte_carlo_fano(c: &mut Criterion) {
    let mut g = c.benchmark_group("fano_200_seeds");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_function(format!("{exec:?}"), |b| {
            b.iter(|| {
                exec.map_range(200, |s| {
                    let t = simulate(0.3, 20_000, s as u64).unwrap();
                    fano_factor(&window_counts(&t, 100).unwrap()).unwrap()
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, battery, monte_carlo_fano);
criterion_main!(benches);
