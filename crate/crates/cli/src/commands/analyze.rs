use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spikescope::battery::{run_battery, BatteryConfig, LayerReport};
use spikescope::indicators::{compare_pair, PairKind};
use spikescope::netlab::Condition;
use spikescope::stats::bonferroni_threshold;
use spikescope::trace_io::load_as_spikes;

use crate::error::CliError;
use crate::manifest::Settings;
use crate::output::{guard_file, write_json};
use crate::tables::{Similarity, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    pub window: usize,
    pub lags: usize,
    pub adf_lags: usize,
    pub alpha: f64,
    /// Bonferroni family size; defaults to the number of comparisons made.
    pub comparisons: Option<usize>,
}

impl AnalyzeOptions {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        Ok(Self {
            window: s.or("window", 100)?,
            lags: s.or("lags", 10)?,
            adf_lags: s.or("adf_lags", 0)?,
            alpha: s.or("alpha", 0.05)?,
            comparisons: s.get("comparisons")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySection {
    pub alpha: f64,
    pub comparisons: usize,
    pub threshold: f64,
    pub legend: BTreeMap<String, String>,
    pub pairs: Vec<Similarity>,
    pub symbols: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format_version: u32,
    pub window: usize,
    pub lags: usize,
    pub adf_lags: usize,
    pub alpha: f64,
    pub inputs: Vec<String>,
    pub layers: Vec<LayerReport>,
    /// Present when two or more traces can be paired.
    pub similarity: Option<SimilaritySection>,
}

/// `generalization` / `memorization` / `random` for condition names this
/// crate writes, otherwise the lower-cased label as given.
fn family(condition: &str) -> String {
    condition.parse::<Condition>().map(|c| c.family().to_string()).unwrap_or_else(|_| condition.to_lowercase())
}

/// Collects the pairs of the similarity legend among the given layers.
pub fn pair_layers(layers: &[LayerReport]) -> Vec<(PairKind, String, usize, usize)> {
    let mut jobs = Vec::new();
    for (i, a) in layers.iter().enumerate() {
        for (j, b) in layers.iter().enumerate().skip(i + 1) {
            let (ma, mb) = (&a.meta, &b.meta);
            if ma.condition == mb.condition && ma.split != mb.split {
                let (t, r) = if ma.split == "test" { (i, j) } else { (j, i) };
                jobs.push((PairKind::TestTrain, "test/train".to_string(), t, r));
                continue;
            }
            if ma.split != mb.split {
                continue;
            }
            let (fa, fb) = (family(&ma.condition), family(&mb.condition));
            for kind in
                [PairKind::MemorizationRandom, PairKind::GeneralizationRandom, PairKind::GeneralizationMemorization]
            {
                let (ka, kb) = kind.keys();
                if fa == ka && fb == kb {
                    jobs.push((kind, ma.split.clone(), i, j));
                } else if fa == kb && fb == ka {
                    jobs.push((kind, ma.split.clone(), j, i));
                }
            }
        }
    }
    jobs
}

pub fn analyze(paths: &[PathBuf], o: &AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    if paths.is_empty() {
        return Err(CliError::Usage("analyze needs at least one trace file".into()));
    }
    let cfg = BatteryConfig { window: o.window, lags: o.lags, adf_lags: o.adf_lags, ..Default::default() };
    let layers = paths
        .iter()
        .map(|p| {
            let sm = load_as_spikes(p).map_err(|e| CliError::from(e).at_stage(&p.display().to_string()))?;
            run_battery(&sm, &cfg).map_err(|e| CliError::from(e).at_stage(&p.display().to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let jobs = pair_layers(&layers);
    let similarity = if jobs.is_empty() {
        None
    } else {
        let m = o.comparisons.unwrap_or(jobs.len());
        let threshold = bonferroni_threshold(o.alpha, m)?;
        let pairs = jobs
            .iter()
            .map(|(kind, split, a, b)| {
                let r = compare_pair(
                    *kind,
                    &layers[*a].indicators.fr_per_node,
                    &layers[*b].indicators.fr_per_node,
                    threshold,
                )?;
                Ok(Similarity {
                    split: split.clone(),
                    a_condition: layers[*a].meta.condition.clone(),
                    b_condition: layers[*b].meta.condition.clone(),
                    result: r,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let symbols = symbols_of(&pairs);
        Some(SimilaritySection {
            alpha: o.alpha,
            comparisons: m,
            threshold,
            legend: spikescope::indicators::legend(),
            pairs,
            symbols,
        })
    };
    Ok(AnalysisReport {
        format_version: FORMAT_VERSION,
        window: o.window,
        lags: o.lags,
        adf_lags: o.adf_lags,
        alpha: o.alpha,
        inputs: paths.iter().map(|p| p.display().to_string()).collect(),
        layers,
        similarity,
    })
}

/// One symbol per pair kind with at least one similar comparison, in legend order.
pub fn symbols_of(pairs: &[Similarity]) -> String {
    PairKind::ALL
        .iter()
        .filter(|k| pairs.iter().any(|p| p.result.pair == **k && p.result.similar))
        .map(|k| k.symbol())
        .collect()
}

pub fn cmd_analyze(paths: &[PathBuf], o: &AnalyzeOptions, out: &Path, force: bool) -> Result<(), CliError> {
    let report = analyze(paths, o)?;
    guard_file(out, force)?;
    write_json(out, &report)
}
