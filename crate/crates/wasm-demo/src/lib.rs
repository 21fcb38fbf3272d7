//! Browser bindings for the demo page in `www/`. Every export takes plain
//! numbers and strings and returns a JSON string; errors become JS exceptions.
//!
//! The `*_json` functions hold the logic and are what the native tests call.

use cp3o::eval::{generate_scenario, ScenarioKind, ScenarioSpec};
use cp3o::{run_cp3o, validate_config, Cp3oConfig, GofMetric, MetricKind, SegmentGof, TimeSeries};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Simulated {
    series: Vec<f64>,
    true_change_points: Vec<usize>,
}

#[derive(Serialize)]
struct Detected {
    change_points: Vec<usize>,
    selected_k: usize,
    gof_curve: Vec<f64>,
    segmentations: Vec<Vec<usize>>,
    /// `prune_stats[kappa - 1][t]`, `t = 0..=T`.
    prune_stats: Vec<Vec<usize>>,
    degenerate: bool,
}

#[derive(Serialize)]
struct Profile {
    /// Split positions `b` (1-based start of the right segment).
    splits: Vec<usize>,
    /// `g(1, b, T + 1)` at each split.
    values: Vec<f64>,
}

fn metric(name: &str, alpha: f64) -> Result<GofMetric, String> {
    let kind: MetricKind = name.parse().map_err(|e: cp3o::Cp3oError| e.to_string())?;
    Ok(GofMetric {
        kind,
        alpha,
        delta: None,
    })
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

pub fn simulate_json(scenario: &str, len: usize, seed: u64) -> Result<String, String> {
    let kind: ScenarioKind = scenario
        .parse()
        .map_err(|e: cp3o::Cp3oError| e.to_string())?;
    let (series, truth) =
        generate_scenario(&ScenarioSpec::new(kind, len, seed)).map_err(|e| e.to_string())?;
    to_json(&Simulated {
        series: series.as_slice().to_vec(),
        true_change_points: truth.change_points().to_vec(),
    })
}

pub fn detect_json(
    series: &[f64],
    metric_name: &str,
    alpha: f64,
    min_size: usize,
    max_changes: usize,
    prune: bool,
) -> Result<String, String> {
    let seq = TimeSeries::from_values(series.to_vec()).map_err(|e| e.to_string())?;
    let cfg =
        Cp3oConfig::new(max_changes, min_size, metric(metric_name, alpha)?).with_pruning(prune);
    let res = run_cp3o(&seq, &cfg).map_err(|e| e.to_string())?;
    to_json(&Detected {
        change_points: res.change_points.change_points().to_vec(),
        selected_k: res.selected_k,
        gof_curve: res.gof_curve,
        segmentations: res
            .segmentations
            .iter()
            .map(|s| s.change_points().to_vec())
            .collect(),
        prune_stats: res.prune_stats.rows,
        degenerate: res.degenerate,
    })
}

/// Single-split scores `g(1, b, T + 1)` for every admissible `b`.
pub fn divergence_profile_json(
    series: &[f64],
    metric_name: &str,
    alpha: f64,
    min_size: usize,
) -> Result<String, String> {
    let seq = TimeSeries::from_values(series.to_vec()).map_err(|e| e.to_string())?;
    let cfg = validate_config(
        &seq,
        &Cp3oConfig::new(1, min_size, metric(metric_name, alpha)?),
    )
    .map_err(|e| e.to_string())?;
    let eval = cfg.metric.prepare(&seq).map_err(|e| e.to_string())?;
    let len = seq.len();
    let splits: Vec<usize> = (min_size + 1..=len + 1 - min_size).collect();
    let values = splits.iter().map(|&b| eval.gof(1, b, len + 1)).collect();
    to_json(&Profile { splits, values })
}

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(scenario: &str, len: usize, seed: u32) -> Result<String, JsError> {
    js(simulate_json(scenario, len, seed.into()))
}

#[wasm_bindgen]
pub fn detect(
    series: &[f64],
    metric: &str,
    alpha: f64,
    min_size: usize,
    max_changes: usize,
    prune: bool,
) -> Result<String, JsError> {
    js(detect_json(
        series,
        metric,
        alpha,
        min_size,
        max_changes,
        prune,
    ))
}

#[wasm_bindgen]
pub fn divergence_profile(
    series: &[f64],
    metric: &str,
    alpha: f64,
    min_size: usize,
) -> Result<String, JsError> {
    js(divergence_profile_json(series, metric, alpha, min_size))
}
