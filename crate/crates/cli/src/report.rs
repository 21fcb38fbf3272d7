//! Output documents: the detection JSON (and its flattened CSV view), the
//! simulation table and the pruning matrix.

use cp3o::eval::{ScenarioSpec, TrialReport};
use cp3o::{Cp3oConfig, DetectionResult, MetricKind, PruneStats, Segmentation};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::input::{HeaderReport, Transform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub columns: Vec<String>,
    pub header: HeaderReport,
    pub transforms: Vec<Transform>,
    pub metric: MetricKind,
    /// Absent for the KS metrics.
    pub alpha: Option<f64>,
    pub delta: Option<usize>,
    pub max_changes: usize,
    pub min_size: usize,
    pub pruning: bool,
    pub seed: u64,
    /// Length after transforms.
    pub series_len: usize,
    pub dim: usize,
}

/// Result of `detect`. Change points are 1-based positions in the
/// transformed series; `original_row_map` gives the data row (1-based,
/// header excluded) each one corresponds to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectOutput {
    pub config: ConfigEcho,
    pub index_base: usize,
    pub change_points: Vec<usize>,
    pub original_row_map: Vec<usize>,
    pub selected_k: usize,
    pub gof_curve: Vec<f64>,
    /// `segmentations[k - 1]` holds the `k` change points found for `kappa = k`.
    pub segmentations: Vec<Vec<usize>>,
    pub degenerate_flag: bool,
    pub knee_fallback: bool,
    pub effective_max_k: usize,
    /// `prune_stats[kappa - 1][t]` for `t = 0..=T`.
    pub prune_stats: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prune_stats_path: Option<String>,
    pub runtime_s: f64,
}

impl DetectOutput {
    pub fn new(
        config: ConfigEcho,
        result: &DetectionResult,
        rows: &[usize],
        prune_stats_path: Option<String>,
    ) -> Self {
        let cps = result.change_points.change_points().to_vec();
        Self {
            config,
            index_base: 1,
            original_row_map: cps.iter().map(|&cp| rows[cp - 1]).collect(),
            change_points: cps,
            selected_k: result.selected_k,
            gof_curve: result.gof_curve.clone(),
            segmentations: result
                .segmentations
                .iter()
                .map(|s| s.change_points().to_vec())
                .collect(),
            degenerate_flag: result.degenerate,
            knee_fallback: result.knee_fallback,
            effective_max_k: result.effective_max_k,
            prune_stats: result.prune_stats.rows.clone(),
            prune_stats_path,
            runtime_s: result.runtime_s,
        }
    }

    /// Rebuilds the library result this document was made from.
    pub fn to_result(&self) -> CliResult<DetectionResult> {
        let len = self.config.series_len;
        let seg = |cps: &[usize]| Segmentation::new(cps.to_vec(), len).map_err(CliError::from);
        Ok(DetectionResult {
            selected_k: self.selected_k,
            change_points: seg(&self.change_points)?,
            gof_curve: self.gof_curve.clone(),
            segmentations: self
                .segmentations
                .iter()
                .map(|s| seg(s))
                .collect::<CliResult<_>>()?,
            prune_stats: PruneStats {
                rows: self.prune_stats.clone(),
            },
            degenerate: self.degenerate_flag,
            knee_fallback: self.knee_fallback,
            effective_max_k: self.effective_max_k,
            runtime_s: self.runtime_s,
        })
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per `kappa`; change points joined with `;`.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kappa", "gof", "selected", "change_points", "original_rows"])?;
        // Observations map to data rows with a constant offset (one per diff).
        let offset = self
            .original_row_map
            .first()
            .map_or(0, |&r| r - self.change_points[0]);
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(";")
        };
        for (k, (g, cps)) in self.gof_curve.iter().zip(&self.segmentations).enumerate() {
            w.write_record([
                (k + 1).to_string(),
                g.to_string(),
                (k + 1 == self.selected_k).to_string(),
                join(&mut cps.iter().copied()),
                join(&mut cps.iter().map(|&cp| cp + offset)),
            ])?;
        }
        csv_string(w)
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Input(format!("csv output: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
}

/// CSV with a `t` column (`1..=T`) and one `kappa_<k>` column per iteration.
pub fn prune_stats_csv(stats: &PruneStats) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((1..=stats.num_iterations()).map(|k| format!("kappa_{k}")));
    w.write_record(&header)?;
    let len = stats.rows.first().map_or(0, |r| r.len() - 1);
    for t in 1..=len {
        let mut rec = vec![t.to_string()];
        rec.extend(stats.rows.iter().map(|row| row[t].to_string()));
        w.write_record(&rec)?;
    }
    csv_string(w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub scenario: String,
    #[serde(rename = "T")]
    pub len: usize,
    pub metric: String,
    pub alpha: Option<f64>,
    pub w: usize,
    pub trials: usize,
    pub mean_rand: f64,
    pub mean_t2e: f64,
    pub mean_e2t: f64,
    pub mean_est_k: f64,
    pub mean_runtime_s: f64,
}

impl SimulationRow {
    pub fn new(spec: &ScenarioSpec, cfg: &Cp3oConfig, trials: usize, mean: &TrialReport) -> Self {
        Self {
            scenario: spec.kind.name().to_string(),
            len: spec.len,
            metric: cfg.metric.kind.name().to_string(),
            alpha: cfg.metric.kind.is_energy().then_some(cfg.metric.alpha),
            w: cfg.min_size,
            trials,
            mean_rand: mean.rand,
            mean_t2e: mean.t2e,
            mean_e2t: mean.e2t,
            mean_est_k: mean.est_k,
            mean_runtime_s: mean.runtime_s,
        }
    }
}

pub fn rows_csv(rows: &[SimulationRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    csv_string(w)
}
