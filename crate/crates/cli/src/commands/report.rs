//! Summary of an experiment directory: the generalize-vs-memorize ordering,
//! train/test indistinguishability and the MF-on-MFR line.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spikescope::indicators::{gap_rows_from_csv, mf_mfr_regression, PairKind, Regression};

use super::experiment::{ACCURACY_FILE, COMPARISON_FILE, GAP_FILE, STATUS_FILE};
use crate::error::CliError;
use crate::output::{guard_file, read_json, write_json};
use crate::tables::{AccuracyTable, ComparisonTable, Status, FORMAT_VERSION};

/// Generalize against one memorizing condition on one split of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub width: usize,
    pub seed: u64,
    pub split: String,
    pub memorization_condition: String,
    pub mfr_generalize: f64,
    pub mfr_memorize: f64,
    pub mf_generalize: Option<f64>,
    pub mf_memorize: Option<f64>,
    /// `mfr_generalize > mfr_memorize` and `mf_generalize < mf_memorize`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionMeans {
    pub runs: usize,
    pub train_accuracy: f64,
    pub validation_accuracy: f64,
    pub mfr: f64,
    pub mf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub format_version: u32,
    pub dataset: String,
    pub alpha: f64,
    pub comparisons: usize,
    pub threshold: f64,
    pub ordering: Vec<OrderingCheck>,
    pub ordering_holds_everywhere: bool,
    pub test_train_pairs: usize,
    pub test_train_similar: usize,
    pub test_train_similar_fraction: Option<f64>,
    /// Mean values per width and condition (`"<width>/<condition>"`).
    pub means: BTreeMap<String, ConditionMeans>,
    pub mf_on_mfr: Option<Regression>,
}

pub fn ordering_checks(table: &ComparisonTable) -> Vec<OrderingCheck> {
    let mut out = Vec::new();
    for cell in &table.cells {
        let Some(gen) = cell.condition("Generalize") else { continue };
        for mem in cell.conditions.iter().filter(|c| c.condition.starts_with("Mem")) {
            for split in ["train", "test"] {
                let (g, m) = if split == "train" { (&gen.train, &mem.train) } else { (&gen.test, &mem.test) };
                let holds = g.mfr > m.mfr && matches!((g.mf, m.mf), (Some(a), Some(b)) if a < b);
                out.push(OrderingCheck {
                    width: cell.width,
                    seed: cell.seed,
                    split: split.into(),
                    memorization_condition: mem.condition.clone(),
                    mfr_generalize: g.mfr,
                    mfr_memorize: m.mfr,
                    mf_generalize: g.mf,
                    mf_memorize: m.mf,
                    holds,
                });
            }
        }
    }
    out
}

pub fn report(dir: &Path) -> Result<SweepReport, CliError> {
    let status: Status = read_json(&dir.join(STATUS_FILE))?;
    if status.status != "complete" {
        return Err(CliError::Data(format!("{} holds an incomplete experiment", dir.display())));
    }
    let acc: AccuracyTable = read_json(&dir.join(ACCURACY_FILE))?;
    let cmp: ComparisonTable = read_json(&dir.join(COMPARISON_FILE))?;
    let gap_text = std::fs::read_to_string(dir.join(GAP_FILE))?;
    let gap = gap_rows_from_csv(&gap_text)?;

    let ordering = ordering_checks(&cmp);
    let tt: Vec<bool> = cmp
        .cells
        .iter()
        .flat_map(|c| c.comparisons.iter())
        .filter(|s| s.result.pair == PairKind::TestTrain)
        .map(|s| s.result.similar)
        .collect();
    let similar = tt.iter().filter(|&&s| s).count();

    let mut means: BTreeMap<String, ConditionMeans> = BTreeMap::new();
    for cell in &cmp.cells {
        for c in &cell.conditions {
            let a = acc
                .runs
                .iter()
                .find(|r| r.width == cell.width && r.seed == cell.seed && r.condition == c.condition)
                .ok_or_else(|| {
                    CliError::Data(format!("accuracy table lacks {} w{} s{}", c.condition, cell.width, cell.seed))
                })?;
            let e = means.entry(format!("{}/{}", cell.width, c.condition)).or_insert(ConditionMeans {
                runs: 0,
                train_accuracy: 0.0,
                validation_accuracy: 0.0,
                mfr: 0.0,
                mf: Some(0.0),
            });
            e.runs += 1;
            e.train_accuracy += a.train;
            e.validation_accuracy += a.validation;
            e.mfr += (c.train.mfr + c.test.mfr) / 2.0;
            e.mf = match (e.mf, c.train.mf, c.test.mf) {
                (Some(acc), Some(x), Some(y)) => Some(acc + (x + y) / 2.0),
                _ => None,
            };
        }
    }
    for e in means.values_mut() {
        let n = e.runs as f64;
        e.train_accuracy /= n;
        e.validation_accuracy /= n;
        e.mfr /= n;
        e.mf = e.mf.map(|v| v / n);
    }

    let points: Vec<(f64, f64)> = gap.iter().filter_map(|r| r.mf.map(|mf| (r.mfr, mf))).collect();
    Ok(SweepReport {
        format_version: FORMAT_VERSION,
        dataset: acc.dataset,
        alpha: cmp.alpha,
        comparisons: cmp.comparisons,
        threshold: cmp.threshold,
        ordering_holds_everywhere: !ordering.is_empty() && ordering.iter().all(|o| o.holds),
        ordering,
        test_train_pairs: tt.len(),
        test_train_similar: similar,
        test_train_similar_fraction: (!tt.is_empty()).then(|| similar as f64 / tt.len() as f64),
        means,
        mf_on_mfr: mf_mfr_regression(&points).ok(),
    })
}

pub fn cmd_report(dir: &Path, out: &Path, force: bool) -> Result<(), CliError> {
    let r = report(dir)?;
    guard_file(out, force)?;
    write_json(out, &r)
}
