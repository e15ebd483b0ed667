//! Layer-level indicators (mean firing rate, mean Fano factor and their
//! coefficients of variation), cross-condition KS comparisons with the
//! clubs/diamonds/hearts/spades similarity legend, generalization-gap rows and
//! the MF-vs-MFR regression.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spikes::SpikeMatrix;
use crate::stats::{bonferroni_threshold, fano_factor, ks_two_sample, window_counts};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerIndicators {
    pub fr_per_node: Vec<f64>,
    /// `None` for nodes whose window counts are all zero.
    pub fano_per_node: Vec<Option<f64>>,
    pub mfr: f64,
    /// Mean over nodes with a defined Fano factor.
    pub mf: Option<f64>,
    /// Percent. `None` when `mfr == 0`.
    pub cv_fr: Option<f64>,
    /// Percent. `None` when no node has a defined Fano factor or `mf == 0`.
    pub cv_f: Option<f64>,
    pub excluded_nodes: usize,
    pub window: usize,
    pub condition: String,
    pub split: String,
    pub dataset: String,
    pub width: usize,
}

fn population_std(xs: &[f64], mean: f64) -> f64 {
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// `100 * std / mean`, undefined at zero mean.
pub fn coefficient_of_variation(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if m > 0.0 && xs.iter().all(|&x| x == xs[0]) {
        // the rounded mean can sit an ulp away from the common value
        return Some(0.0);
    }
    (m > 0.0).then(|| 100.0 * population_std(xs, m) / m)
}

/// Firing rate and windowed Fano factor of every node, summarized over the
/// layer. Dead nodes count towards MFR / CV(FR) but are excluded from MF /
/// CV(F).
pub fn layer_indicators(sm: &SpikeMatrix, window: usize) -> Result<LayerIndicators> {
    if sm.n_samples() < 2 * window {
        return Err(Error::InsufficientData(format!(
            "need >= {} samples for window {window}, got {}",
            2 * window,
            sm.n_samples()
        )));
    }
    let fr_per_node = sm.firing_rates();
    let fano_per_node = sm
        .trains()
        .iter()
        .map(|train| match fano_factor(&window_counts(train, window)?) {
            Ok(f) => Ok(Some(f)),
            Err(Error::Undefined(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(fr_per_node, fano_per_node, window, sm))
}

pub(crate) fn summarize(
    fr_per_node: Vec<f64>,
    fano_per_node: Vec<Option<f64>>,
    window: usize,
    sm: &SpikeMatrix,
) -> LayerIndicators {
    let mfr = fr_per_node.iter().sum::<f64>() / fr_per_node.len() as f64;
    let fanos: Vec<f64> = fano_per_node.iter().flatten().copied().collect();
    let mf = (!fanos.is_empty()).then(|| fanos.iter().sum::<f64>() / fanos.len() as f64);
    LayerIndicators {
        cv_fr: coefficient_of_variation(&fr_per_node),
        cv_f: coefficient_of_variation(&fanos),
        excluded_nodes: fano_per_node.len() - fanos.len(),
        fr_per_node,
        fano_per_node,
        mfr,
        mf,
        window,
        condition: sm.meta.condition.clone(),
        split: sm.meta.split.clone(),
        dataset: sm.meta.dataset.clone(),
        width: sm.n_nodes(),
    }
}

/// The four condition pairs of the similarity legend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    TestTrain,
    MemorizationRandom,
    GeneralizationRandom,
    GeneralizationMemorization,
}

impl PairKind {
    pub const ALL: [PairKind; 4] = [
        PairKind::TestTrain,
        PairKind::MemorizationRandom,
        PairKind::GeneralizationRandom,
        PairKind::GeneralizationMemorization,
    ];

    /// Map keys of the two firing-rate vectors compared.
    pub fn keys(self) -> (&'static str, &'static str) {
        match self {
            PairKind::TestTrain => ("test", "train"),
            PairKind::MemorizationRandom => ("memorization", "random"),
            PairKind::GeneralizationRandom => ("generalization", "random"),
            PairKind::GeneralizationMemorization => ("generalization", "memorization"),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PairKind::TestTrain => "\u{2663}",
            PairKind::MemorizationRandom => "\u{2666}",
            PairKind::GeneralizationRandom => "\u{2665}",
            PairKind::GeneralizationMemorization => "\u{2660}",
        }
    }

    pub fn legend_key(self) -> &'static str {
        match self {
            PairKind::TestTrain => "clubs",
            PairKind::MemorizationRandom => "diamonds",
            PairKind::GeneralizationRandom => "hearts",
            PairKind::GeneralizationMemorization => "spades",
        }
    }

    pub fn legend(self) -> &'static str {
        match self {
            PairKind::TestTrain => "between Test/Train",
            PairKind::MemorizationRandom => "between Memorization/Random",
            PairKind::GeneralizationRandom => "between Generalization/Random",
            PairKind::GeneralizationMemorization => "between Generalization/Memorization",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub pair: PairKind,
    pub a: String,
    pub b: String,
    pub ks_statistic: f64,
    pub p_value: f64,
    /// KS non-rejection after Bonferroni: `p > alpha / m`. Not an
    /// equivalence test.
    pub similar: bool,
    pub symbol: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub comparisons: usize,
    pub threshold: f64,
    pub pairs: Vec<PairComparison>,
    /// Pairs skipped because a condition was not supplied.
    pub missing: Vec<PairKind>,
    /// Concatenated symbols of every similar pair, in legend order.
    pub symbols: String,
    /// `clubs` / `diamonds` / `hearts` / `spades` -> similarity flag
    /// (`None` when the pair is missing).
    pub flags: BTreeMap<String, Option<bool>>,
    pub legend: BTreeMap<String, String>,
}

pub fn legend() -> BTreeMap<String, String> {
    PairKind::ALL.iter().map(|k| (k.legend_key().to_string(), k.legend().to_string())).collect()
}

/// Compares one pair of firing-rate distributions.
pub fn compare_pair(pair: PairKind, a: &[f64], b: &[f64], threshold: f64) -> Result<PairComparison> {
    let ks = ks_two_sample(a, b)?;
    let similar = ks.p_value > threshold;
    let (ka, kb) = pair.keys();
    Ok(PairComparison {
        pair,
        a: ka.into(),
        b: kb.into(),
        ks_statistic: ks.statistic,
        p_value: ks.p_value,
        similar,
        symbol: if similar { pair.symbol().into() } else { String::new() },
    })
}

/// KS-compares every legend pair whose two keys are present in `frs`.
/// Similarity is flagged where `p > alpha / comparisons`.
pub fn compare_conditions(
    frs: &BTreeMap<String, Vec<f64>>,
    alpha: f64,
    comparisons: usize,
) -> Result<ComparisonReport> {
    let threshold = bonferroni_threshold(alpha, comparisons)?;
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    let mut flags = BTreeMap::new();
    for kind in PairKind::ALL {
        let (ka, kb) = kind.keys();
        match (frs.get(ka), frs.get(kb)) {
            (Some(a), Some(b)) => {
                if a.is_empty() || b.is_empty() {
                    return Err(Error::InsufficientData(format!("empty firing-rate vector for {ka}/{kb}")));
                }
                let cmp = compare_pair(kind, a, b, threshold)?;
                flags.insert(kind.legend_key().to_string(), Some(cmp.similar));
                pairs.push(cmp);
            }
            _ => {
                flags.insert(kind.legend_key().to_string(), None);
                missing.push(kind);
            }
        }
    }
    let symbols = pairs.iter().map(|p| p.symbol.as_str()).collect();
    Ok(ComparisonReport { alpha, comparisons, threshold, pairs, missing, symbols, flags, legend: legend() })
}

/// One network's generalization gap next to its indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub train_accuracy: f64,
    pub validation_accuracy: f64,
    pub indicators: LayerIndicators,
}

impl GapRecord {
    pub fn generalization_gap(&self) -> f64 {
        self.train_accuracy - self.validation_accuracy
    }
}

/// Plot-ready row: gap on the x axis, one statistic per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub gap: f64,
    pub mfr: f64,
    pub cv_fr: Option<f64>,
    pub mf: Option<f64>,
    pub cv_f: Option<f64>,
    pub condition: String,
    pub dataset: String,
    pub width: usize,
    pub split: String,
}

pub fn gap_scatter(records: &[GapRecord]) -> Result<Vec<GapRow>> {
    if records.is_empty() {
        return Err(Error::InsufficientData("gap table needs at least one record".into()));
    }
    Ok(records
        .iter()
        .map(|r| GapRow {
            gap: r.generalization_gap(),
            mfr: r.indicators.mfr,
            cv_fr: r.indicators.cv_fr,
            mf: r.indicators.mf,
            cv_f: r.indicators.cv_f,
            condition: r.indicators.condition.clone(),
            dataset: r.indicators.dataset.clone(),
            width: r.indicators.width,
            split: r.indicators.split.clone(),
        })
        .collect())
}

pub const GAP_CSV_HEADER: &str = "gap,mfr,cv_fr,mf,cv_f,condition,dataset,width,split";

/// CSV with undefined statistics left as empty cells.
pub fn gap_rows_to_csv(rows: &[GapRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(GAP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.gap,
            r.mfr,
            opt(r.cv_fr),
            opt(r.mf),
            opt(r.cv_f),
            r.condition,
            r.dataset,
            r.width,
            r.split
        );
    }
    out
}

pub fn gap_rows_from_csv(text: &str) -> Result<Vec<GapRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(GAP_CSV_HEADER) {
        return Err(Error::parse("line 1", "unexpected gap table header"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let loc = format!("line {}", i + 2);
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(Error::parse(loc, format!("expected 9 columns, found {}", cells.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(loc.clone(), format!("not a number: `{s}`")));
        let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
        rows.push(GapRow {
            gap: num(cells[0])?,
            mfr: num(cells[1])?,
            cv_fr: opt(cells[2])?,
            mf: opt(cells[3])?,
            cv_f: opt(cells[4])?,
            condition: cells[5].into(),
            dataset: cells[6].into(),
            width: cells[7].parse().map_err(|_| Error::parse(loc.clone(), "bad width"))?,
            split: cells[8].into(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Least-squares line of mean Fano factor on mean firing rate.
pub fn mf_mfr_regression(points: &[(f64, f64)]) -> Result<Regression> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!("regression needs >= 3 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0).powi(2) {
        return Err(Error::Singular("firing rates have no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(Regression { slope, intercept, r2 })
}
