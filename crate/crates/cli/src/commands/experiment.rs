//! The condition x width x seed sweep.

use std::path::Path;

use serde::Serialize;
use spikescope::indicators::{
    compare_pair, gap_rows_to_csv, gap_scatter, layer_indicators, GapRecord, LayerIndicators, PairKind,
};
use spikescope::netlab::params_io::save_params;
use spikescope::netlab::{run_condition, Condition, DenseNetSpec, RecipeConfig, RunArtifacts, Splits, TrainConfig};
use spikescope::par::Exec;
use spikescope::spikes::{binarize, SpikeMatrix};
use spikescope::stats::bonferroni_threshold;
use spikescope::trace_io::{save_spikes, save_trace};

use super::DataOptions;
use crate::commands::analyze::symbols_of;
use crate::error::CliError;
use crate::manifest::Settings;
use crate::output::{guard_dir, write_json, write_text};
use crate::tables::{
    AccuracyRow, AccuracyTable, CellComparisons, ComparisonTable, ConditionIndicators, IndicatorSummary, Similarity,
    Status, FORMAT_VERSION,
};

pub const ACCURACY_FILE: &str = "accuracy.json";
pub const COMPARISON_FILE: &str = "comparisons.json";
pub const GAP_FILE: &str = "gap.csv";
pub const STATUS_FILE: &str = "status.json";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOptions {
    pub seed: u64,
    pub seeds: usize,
    pub widths: Vec<usize>,
    pub conditions: Vec<Condition>,
    pub data: DataOptions,
    pub train: TrainConfig,
    pub memorize_epochs: usize,
    pub window: usize,
    pub alpha: f64,
    pub comparisons: Option<usize>,
    /// Parameters, histories and spike matrices per run.
    pub save_artifacts: bool,
    /// Raw activation traces as well (large).
    pub save_activations: bool,
    pub parallel: bool,
}

impl ExperimentOptions {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let seed = super::require_seed(s)?;
        let mut conditions = s.list::<Condition>("conditions")?.unwrap_or_else(|| {
            vec![Condition::Random, Condition::Generalize, Condition::MemRetrainLast, Condition::MemRandomLast]
        });
        conditions.sort();
        conditions.dedup();
        let o = Self {
            seed,
            seeds: s.or("seeds", 3)?,
            widths: s.list("widths")?.unwrap_or_else(|| vec![16, 32, 64, 128]),
            conditions,
            data: DataOptions::from_settings(s, seed)?,
            train: super::train_config(s, 10)?,
            memorize_epochs: s.or("memorize_epochs", 100)?,
            window: s.or("window", 100)?,
            alpha: s.or("alpha", 0.05)?,
            comparisons: s.get("comparisons")?,
            save_artifacts: s.or("save_artifacts", true)?,
            save_activations: s.or("save_activations", false)?,
            parallel: s.or("parallel", true)?,
        };
        if o.seeds == 0 || o.widths.is_empty() || o.conditions.is_empty() {
            return Err(CliError::Usage("seeds, widths and conditions must be non-empty".into()));
        }
        Ok(o)
    }

    pub fn run_seeds(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.seed + i).collect()
    }
}

/// Everything one (width, seed) cell produced, in condition order.
pub struct CellResult {
    pub width: usize,
    pub seed: u64,
    pub runs: Vec<RunSummary>,
}

pub struct RunSummary {
    pub condition: Condition,
    pub artifacts: RunArtifacts,
    pub train: LayerIndicators,
    pub test: LayerIndicators,
}

fn stage<T>(r: Result<T, impl Into<CliError>>, name: impl FnOnce() -> String) -> Result<T, (String, CliError)> {
    r.map_err(|e| (name(), e.into()))
}

fn run_cell(
    o: &ExperimentOptions,
    data: &Splits,
    width: usize,
    seed: u64,
    out: &Path,
) -> Result<CellResult, (String, CliError)> {
    let tag = format!("w{width}_s{seed}");
    let spec = stage(DenseNetSpec::mlp(data.train.dim(), width), || format!("{tag} spec"))?;
    let recipe = RecipeConfig { train: o.train, memorize_epochs: o.memorize_epochs };
    let mut generalized: Option<RunArtifacts> = None;
    let mut runs = Vec::new();
    for &cond in &o.conditions {
        let name = || format!("{tag} {cond} training");
        let a = stage(run_condition(cond, &spec, &recipe, data, seed, generalized.as_ref()), name)?;
        let spikes = |t| stage(binarize(t, 0.0), || format!("{tag} {cond} capture"));
        let (train_sm, test_sm): (SpikeMatrix, SpikeMatrix) = (spikes(&a.train_trace)?, spikes(&a.test_trace)?);
        let ind = |sm: &SpikeMatrix| stage(layer_indicators(sm, o.window), || format!("{tag} {cond} analysis"));
        let (train, test) = (ind(&train_sm)?, ind(&test_sm)?);
        if o.save_artifacts {
            let dir = out.join("runs").join(&tag).join(cond.name());
            let save = || -> Result<(), CliError> {
                std::fs::create_dir_all(&dir)?;
                save_params(&dir.join("params.bin"), &a.params)?;
                if let Some(h) = &a.history {
                    write_json(&dir.join("history.json"), h)?;
                }
                save_spikes(&dir.join("train_spikes.csv"), &train_sm)?;
                save_spikes(&dir.join("test_spikes.csv"), &test_sm)?;
                if o.save_activations {
                    save_trace(&dir.join("train_activations.csv"), &a.train_trace)?;
                    save_trace(&dir.join("test_activations.csv"), &a.test_trace)?;
                }
                Ok(())
            };
            stage(save(), || format!("{tag} {cond} writing artifacts"))?;
        }
        if cond == Condition::Generalize {
            generalized = Some(a.clone());
        }
        runs.push(RunSummary { condition: cond, artifacts: a, train, test });
    }
    Ok(CellResult { width, seed, runs })
}

/// `(kind, split, a, b)` indices into `cell.runs`; `a`/`b` follow the order of
/// the legend pair.
fn planned_pairs(cell: &CellResult) -> Vec<(PairKind, &'static str, usize, usize)> {
    let find = |c: Condition| cell.runs.iter().position(|r| r.condition == c);
    let mut jobs = Vec::new();
    for i in 0..cell.runs.len() {
        jobs.push((PairKind::TestTrain, "test/train", i, i));
    }
    let (gen, rnd) = (find(Condition::Generalize), find(Condition::Random));
    for split in ["train", "test"] {
        if let (Some(g), Some(r)) = (gen, rnd) {
            jobs.push((PairKind::GeneralizationRandom, split, g, r));
        }
        for (m, run) in cell.runs.iter().enumerate() {
            if !run.condition.uses_shuffled_labels() {
                continue;
            }
            if let Some(r) = rnd {
                jobs.push((PairKind::MemorizationRandom, split, m, r));
            }
            if let Some(g) = gen {
                jobs.push((PairKind::GeneralizationMemorization, split, g, m));
            }
        }
    }
    jobs
}

fn fr<'a>(cell: &'a CellResult, i: usize, split: &str) -> &'a [f64] {
    if split == "test" {
        &cell.runs[i].test.fr_per_node
    } else {
        &cell.runs[i].train.fr_per_node
    }
}

pub fn comparison_table(
    cells: &[CellResult],
    o: &ExperimentOptions,
    dataset: &str,
) -> Result<ComparisonTable, CliError> {
    let plans: Vec<_> = cells.iter().map(planned_pairs).collect();
    let total: usize = plans.iter().map(Vec::len).sum();
    let m = o.comparisons.unwrap_or(total.max(1));
    let threshold = bonferroni_threshold(o.alpha, m)?;
    let mut out = Vec::with_capacity(cells.len());
    for (cell, plan) in cells.iter().zip(plans) {
        let mut comparisons = Vec::with_capacity(plan.len());
        for (kind, split, a, b) in plan {
            let (xa, xb) = if kind == PairKind::TestTrain {
                (fr(cell, a, "test"), fr(cell, b, "train"))
            } else {
                (fr(cell, a, split), fr(cell, b, split))
            };
            comparisons.push(Similarity {
                split: split.into(),
                a_condition: cell.runs[a].condition.name().into(),
                b_condition: cell.runs[b].condition.name().into(),
                result: compare_pair(kind, xa, xb, threshold)?,
            });
        }
        out.push(CellComparisons {
            width: cell.width,
            seed: cell.seed,
            dataset: dataset.into(),
            conditions: cell
                .runs
                .iter()
                .map(|r| ConditionIndicators {
                    condition: r.condition.name().into(),
                    train: IndicatorSummary::from(&r.train),
                    test: IndicatorSummary::from(&r.test),
                })
                .collect(),
            symbols: symbols_of(&comparisons),
            comparisons,
        });
    }
    Ok(ComparisonTable {
        format_version: FORMAT_VERSION,
        alpha: o.alpha,
        comparisons: m,
        threshold,
        legend: spikescope::indicators::legend(),
        cells: out,
    })
}

pub fn accuracy_table(cells: &[CellResult], dataset: &str) -> AccuracyTable {
    let runs = cells
        .iter()
        .flat_map(|c| {
            c.runs.iter().map(|r| {
                let a = r.artifacts.accuracy;
                AccuracyRow {
                    width: c.width,
                    seed: c.seed,
                    condition: r.condition.name().into(),
                    train: a.train,
                    validation: a.validation,
                    test: a.test,
                    generalization_gap: a.train - a.validation,
                }
            })
        })
        .collect();
    AccuracyTable { format_version: FORMAT_VERSION, dataset: dataset.into(), runs }
}

pub fn gap_csv(cells: &[CellResult]) -> Result<String, CliError> {
    let records: Vec<GapRecord> = cells
        .iter()
        .flat_map(|c| c.runs.iter())
        .flat_map(|r| {
            let a = r.artifacts.accuracy;
            [&r.train, &r.test].into_iter().map(move |ind| GapRecord {
                train_accuracy: a.train,
                validation_accuracy: a.validation,
                indicators: ind.clone(),
            })
        })
        .collect();
    Ok(gap_rows_to_csv(&gap_scatter(&records)?))
}

fn write_status(out: &Path, status: &Status) -> Result<(), CliError> {
    write_json(&out.join(STATUS_FILE), status)
}

/// Runs the sweep and writes its tables into `out`. On failure `status.json`
/// names the failed stage and keeps `"incomplete"`.
pub fn cmd_experiment(o: &ExperimentOptions, out: &Path, force: bool) -> Result<Vec<CellResult>, CliError> {
    guard_dir(out, force)?;
    write_status(out, &Status { status: "incomplete".into(), failed_stage: None, error: None })?;
    write_json(&out.join(CONFIG_FILE), o)?;
    let result = run_sweep(o, out);
    match result {
        Ok(cells) => {
            write_status(out, &Status { status: "complete".into(), failed_stage: None, error: None })?;
            Ok(cells)
        }
        Err((stage, e)) => {
            write_status(
                out,
                &Status { status: "incomplete".into(), failed_stage: Some(stage.clone()), error: Some(e.to_string()) },
            )?;
            Err(e.at_stage(&stage))
        }
    }
}

fn run_sweep(o: &ExperimentOptions, out: &Path) -> Result<Vec<CellResult>, (String, CliError)> {
    let data = stage(o.data.load(), || "loading data".to_string())?;
    let dataset = data.train.name.clone();
    let grid: Vec<(usize, u64)> =
        o.widths.iter().flat_map(|&w| o.run_seeds().into_iter().map(move |s| (w, s))).collect();
    let exec = if o.parallel { Exec::Parallel } else { Exec::Sequential };
    let cells =
        exec.map_slice(&grid, |&(w, s)| run_cell(o, &data, w, s, out)).into_iter().collect::<Result<Vec<_>, _>>()?;

    let acc = accuracy_table(&cells, &dataset);
    stage(write_json(&out.join(ACCURACY_FILE), &acc), || "writing accuracy table".into())?;
    let cmp = stage(comparison_table(&cells, o, &dataset), || "comparing conditions".into())?;
    stage(write_json(&out.join(COMPARISON_FILE), &cmp), || "writing comparison table".into())?;
    let gap = stage(gap_csv(&cells), || "building gap table".into())?;
    stage(write_text(&out.join(GAP_FILE), &gap), || "writing gap table".into())?;
    Ok(cells)
}
