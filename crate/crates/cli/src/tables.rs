//! Documents written by `experiment` and read back by `report`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use spikescope::indicators::{LayerIndicators, PairComparison};

pub const FORMAT_VERSION: u32 = 1;

/// Accuracies per run, laid out like a train / validation accuracy table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTable {
    pub format_version: u32,
    pub dataset: String,
    pub runs: Vec<AccuracyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub width: usize,
    pub seed: u64,
    pub condition: String,
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub generalization_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSummary {
    pub mfr: f64,
    pub cv_fr: Option<f64>,
    pub mf: Option<f64>,
    pub cv_f: Option<f64>,
    pub excluded_nodes: usize,
    pub n_nodes: usize,
}

impl From<&LayerIndicators> for IndicatorSummary {
    fn from(li: &LayerIndicators) -> Self {
        Self {
            mfr: li.mfr,
            cv_fr: li.cv_fr,
            mf: li.mf,
            cv_f: li.cv_f,
            excluded_nodes: li.excluded_nodes,
            n_nodes: li.width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionIndicators {
    pub condition: String,
    pub train: IndicatorSummary,
    pub test: IndicatorSummary,
}

/// One KS comparison of firing-rate distributions. For test/train pairs
/// `split` is `"test/train"` and both conditions are the same.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub split: String,
    pub a_condition: String,
    pub b_condition: String,
    #[serde(flatten)]
    pub result: PairComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellComparisons {
    pub width: usize,
    pub seed: u64,
    pub dataset: String,
    pub conditions: Vec<ConditionIndicators>,
    pub comparisons: Vec<Similarity>,
    /// Legend symbols of every pair kind with at least one similar comparison.
    pub symbols: String,
}

impl CellComparisons {
    pub fn condition(&self, name: &str) -> Option<&ConditionIndicators> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub format_version: u32,
    pub alpha: f64,
    /// Bonferroni family size.
    pub comparisons: usize,
    pub threshold: f64,
    pub legend: BTreeMap<String, String>,
    pub cells: Vec<CellComparisons>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}
