//! Monitoring-curve calibration on the desk data set.
//!
//! cargo run --release --example monitor_calibrate -- [width] [gen_epochs] [mem_epochs]

use spikescope::netlab::monitor::curve_shape;
use spikescope::netlab::{
    make_synthetic_splits, monitor_training, shuffle_labels, DenseNetSpec, MonitorConfig, Splits, TrainConfig,
};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: usize| args.get(i).map(|s| s.parse().unwrap()).unwrap_or(d);
    let (width, gen, mem) = (arg(0, 64), arg(1, 10), arg(2, 100));
    for seed in 0..3u64 {
        let (train, test) = make_synthetic_splits(300, 100, 256, 0.3, 1000 + seed).unwrap();
        let shuffled = shuffle_labels(&train, seed);
        let cfg = MonitorConfig {
            train: TrainConfig { epochs: gen, ..Default::default() },
            memorize_epochs: mem,
            probe_size: 100,
        };
        let rows =
            monitor_training(&DenseNetSpec::mlp(256, width).unwrap(), &cfg, &Splits { train, test }, &shuffled, seed)
                .unwrap();
        let per_epoch =
            rows.iter().filter(|r| r.split == "train" && r.phase == spikescope::netlab::Phase::Memorize).count() / mem;
        for split in ["train", "test"] {
            let c = curve_shape(&rows, split, 5, per_epoch).unwrap();
            println!("seed {seed} {split}: {c:?} ok={}", c.drop_then_stabilize());
        }
        let tr: Vec<String> = rows.iter().filter(|r| r.split == "train").map(|r| format!("{:.2}", r.mfr)).collect();
        println!("{}", tr[..tr.len().min(160)].join(" "));
    }
}
