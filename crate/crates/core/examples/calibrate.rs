//! Desk-scale calibration: accuracy and layer indicators per condition.
//!
//! cargo run --release --example calibrate -- [spread] [dim] [n_per_class] [epochs] [mem_epochs]

use spikescope::indicators::layer_indicators;
use spikescope::netlab::{
    make_synthetic_splits, run_condition, Condition, DenseNetSpec, RecipeConfig, Splits, TrainConfig,
};
use spikescope::spikes::binarize;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: f64| args.get(i).map(|s| s.parse().unwrap()).unwrap_or(d);
    let (spread, dim, npc) = (arg(0, 0.3), arg(1, 256.0) as usize, arg(2, 300.0) as usize);
    let cfg = RecipeConfig {
        train: TrainConfig { epochs: arg(3, 10.0) as usize, ..Default::default() },
        memorize_epochs: arg(4, 100.0) as usize,
    };
    println!("width seed condition train val test mfr_train mf_train mfr_test mf_test");
    for width in [16, 32, 64, 128] {
        for seed in 0..3u64 {
            let (train, test) = make_synthetic_splits(npc, 100, dim, spread, 1000 + seed).unwrap();
            let data = Splits { train, test };
            let spec = DenseNetSpec::mlp(dim, width).unwrap();
            let gen = run_condition(Condition::Generalize, &spec, &cfg, &data, seed, None).unwrap();
            for cond in [Condition::Random, Condition::Generalize, Condition::MemRetrainLast, Condition::MemRandomLast]
            {
                let a = if cond == Condition::Generalize {
                    gen.clone()
                } else {
                    run_condition(cond, &spec, &cfg, &data, seed, Some(&gen)).unwrap()
                };
                let tr = layer_indicators(&binarize(&a.train_trace, 0.0).unwrap(), 100).unwrap();
                let te = layer_indicators(&binarize(&a.test_trace, 0.0).unwrap(), 100).unwrap();
                let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.3}"));
                println!(
                    "{width} {seed} {cond} {:.3} {:.3} {:.3} {:.3} {} {:.3} {}",
                    a.accuracy.train,
                    a.accuracy.validation,
                    a.accuracy.test,
                    tr.mfr,
                    f(tr.mf),
                    te.mfr,
                    f(te.mf)
                );
            }
        }
    }
}
