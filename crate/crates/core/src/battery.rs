//! Per-layer assumption-test battery and its JSON report.
//!
//! Every node is tested independently (in parallel under [`Exec::Parallel`]);
//! the Ljung-Box p-values are then combined with Pearson's method. Nodes whose
//! statistics are undefined are counted, never turned into NaN.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{self, LayerIndicators};
use crate::par::Exec;
use crate::spikes::{SpikeMatrix, TraceMeta};
use crate::stats::{
    adf_test, combine_pvalues_pearson, fano_factor, fano_gamma_test, ljung_box, window_counts, DEFAULT_LAGS,
    DEFAULT_WINDOW,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryConfig {
    pub window: usize,
    pub lags: usize,
    pub adf_lags: usize,
    pub exec: Exec,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self { window: DEFAULT_WINDOW, lags: DEFAULT_LAGS, adf_lags: 0, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub node: usize,
    pub fr: f64,
    pub fano: Option<f64>,
    pub fano_p: Option<f64>,
    pub ljungbox_p: Option<f64>,
    pub adf_statistic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfSummary {
    pub lags: usize,
    pub tested: usize,
    pub rejected_at_5pct: usize,
    pub rejected_at_1pct: usize,
    /// Constant trains.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub combined_ljungbox_p: Option<f64>,
    pub combined_ljungbox_statistic: Option<f64>,
    /// Constant trains left out of the Ljung-Box combination.
    pub ljungbox_excluded: usize,
    pub fano_rejected_at_5pct: usize,
    pub adf_summary: AdfSummary,
    /// Nodes without a defined Fano factor (all window counts zero).
    pub excluded_node_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub meta: TraceMeta,
    pub n_samples: usize,
    pub n_nodes: usize,
    pub window: usize,
    pub lags: usize,
    pub nodes: Vec<NodeReport>,
    pub layer: LayerSummary,
    pub indicators: LayerIndicators,
}

/// `Ok(None)` for statistics that are undefined on this train.
fn defined<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Undefined(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn run_battery(sm: &SpikeMatrix, cfg: &BatteryConfig) -> Result<LayerReport> {
    if sm.n_samples() < 2 * cfg.window {
        return Err(Error::InsufficientData(format!(
            "need >= {} samples for window {}, got {}",
            2 * cfg.window,
            cfg.window,
            sm.n_samples()
        )));
    }
    let trains = sm.trains();
    let nodes = cfg
        .exec
        .map_slice(&trains, |train| -> Result<NodeReport> {
            let wc = window_counts(train, cfg.window)?;
            let fano = defined(fano_factor(&wc))?;
            let fano_p = fano.map(|f| fano_gamma_test(f, wc.n_windows())).transpose()?.map(|r| r.p_value);
            let series = train.as_f64();
            let ljungbox_p = defined(ljung_box(&series, cfg.lags))?.map(|r| r.p_value);
            let adf_statistic = defined(adf_test(&series, cfg.adf_lags))?.map(|r| r.result.statistic);
            Ok(NodeReport {
                node: train.node_id,
                fr: train.spike_count() as f64 / train.len() as f64,
                fano,
                fano_p,
                ljungbox_p,
                adf_statistic,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let lb: Vec<f64> = nodes.iter().filter_map(|n| n.ljungbox_p).collect();
    let combined = if lb.is_empty() { None } else { Some(combine_pvalues_pearson(&lb)?) };

    let adf_stats: Vec<f64> = nodes.iter().filter_map(|n| n.adf_statistic).collect();
    let crit = |alpha: f64| {
        crate::stats::ADF_CRITICAL_CONSTANT.iter().find(|c| c.0 == alpha).map(|c| c.1).expect("tabulated level")
    };
    let adf_summary = AdfSummary {
        lags: cfg.adf_lags,
        tested: adf_stats.len(),
        rejected_at_5pct: adf_stats.iter().filter(|&&t| t < crit(0.05)).count(),
        rejected_at_1pct: adf_stats.iter().filter(|&&t| t < crit(0.01)).count(),
        excluded: nodes.len() - adf_stats.len(),
    };

    let fano_per_node: Vec<Option<f64>> = nodes.iter().map(|n| n.fano).collect();
    let indicators = indicators::summarize(sm.firing_rates(), fano_per_node, cfg.window, sm);
    let layer = LayerSummary {
        combined_ljungbox_p: combined.as_ref().map(|r| r.p_value),
        combined_ljungbox_statistic: combined.as_ref().map(|r| r.statistic),
        ljungbox_excluded: nodes.len() - lb.len(),
        fano_rejected_at_5pct: nodes.iter().filter(|n| n.fano_p.is_some_and(|p| p < 0.05)).count(),
        adf_summary,
        excluded_node_count: indicators.excluded_nodes,
    };
    Ok(LayerReport {
        meta: sm.meta.clone(),
        n_samples: sm.n_samples(),
        n_nodes: sm.n_nodes(),
        window: cfg.window,
        lags: cfg.lags,
        nodes,
        layer,
        indicators,
    })
}
