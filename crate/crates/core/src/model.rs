//! Domain types shared by the divergence, search and evaluation modules.
//!
//! All user-facing indices are 1-based: a change point `tau` is the index of
//! the first observation of a new segment, with implicit sentinels `1` and
//! `T + 1`. Storage is 0-based; observation `i` lives in row `i - 1`.

use serde::{Deserialize, Serialize};

use crate::divergence::{GofMetric, MetricKind};
use crate::error::{Cp3oError, Result};

/// A time-ordered `T x d` matrix of finite observations, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    data: Vec<f64>,
    len: usize,
    dim: usize,
}

impl TimeSeries {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Cp3oError::input("dimension must be at least 1"));
        }
        if data.is_empty() {
            return Err(Cp3oError::input(
                "series must contain at least one observation",
            ));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Cp3oError::input(format!(
                "{} values cannot be split into rows of width {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Cp3oError::NonFinite {
                row: pos / dim + 1,
                col: pos % dim + 1,
            });
        }
        let len = data.len() / dim;
        Ok(Self { data, len, dim })
    }

    /// Univariate series.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Cp3oError::input(format!(
                "row {} has {} values, expected {dim}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Self::new(rows.concat(), dim)
    }

    /// Number of observations `T`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Observation at 0-based storage row `idx`.
    #[inline]
    pub fn row(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Observation `Z_i` for 1-based `i`.
    #[inline]
    pub fn obs(&self, i: usize) -> &[f64] {
        self.row(i - 1)
    }

    pub fn view(&self) -> SeriesView<'_> {
        SeriesView {
            data: &self.data,
            dim: self.dim,
        }
    }

    /// Observations `Z_from ..= Z_to` (1-based, inclusive).
    pub fn segment(&self, from: usize, to: usize) -> SeriesView<'_> {
        debug_assert!(from >= 1 && from <= to + 1 && to <= self.len);
        SeriesView {
            data: &self.data[(from - 1) * self.dim..to * self.dim],
            dim: self.dim,
        }
    }
}

/// Borrowed run of consecutive observations.
#[derive(Debug, Clone, Copy)]
pub struct SeriesView<'a> {
    data: &'a [f64],
    dim: usize,
}

impl<'a> SeriesView<'a> {
    pub fn univariate(values: &'a [f64]) -> Self {
        Self {
            data: values,
            dim: 1,
        }
    }

    pub fn from_flat(data: &'a [f64], dim: usize) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Cp3oError::input(format!(
                "{} values cannot be split into rows of width {dim}",
                data.len()
            )));
        }
        Ok(Self { data, dim })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, idx: usize) -> &'a [f64] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn flat(&self) -> &'a [f64] {
        self.data
    }
}

/// Ordered change points over a series of length `len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    change_points: Vec<usize>,
    len: usize,
}

impl Segmentation {
    /// Change points must be strictly increasing and lie in `2..=len`.
    pub fn new(change_points: Vec<usize>, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Cp3oError::input("segmentation over an empty series"));
        }
        if change_points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Cp3oError::input(format!(
                "change points must be strictly increasing: {change_points:?}"
            )));
        }
        if let Some(&bad) = change_points.iter().find(|&&cp| cp < 2 || cp > len) {
            return Err(Cp3oError::input(format!(
                "change point {bad} outside 2..={len}"
            )));
        }
        Ok(Self { change_points, len })
    }

    pub fn empty(len: usize) -> Self {
        Self {
            change_points: Vec::new(),
            len,
        }
    }

    pub fn change_points(&self) -> &[usize] {
        &self.change_points
    }

    pub fn num_changes(&self) -> usize {
        self.change_points.len()
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    /// Segment boundaries including the sentinels `1` and `T + 1`.
    pub fn boundaries(&self) -> Vec<usize> {
        let mut b = Vec::with_capacity(self.change_points.len() + 2);
        b.push(1);
        b.extend_from_slice(&self.change_points);
        b.push(self.len + 1);
        b
    }

    /// Segment label (0-based) of every observation, in time order.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = Vec::with_capacity(self.len);
        for (label, pair) in self.boundaries().windows(2).enumerate() {
            labels.extend(std::iter::repeat_n(label, pair[1] - pair[0]));
        }
        labels
    }

    /// Checks the bound `tau in [1+w, T-w+1]` and the gap `tau_{i+1} - tau_i >= w`.
    pub fn check_min_size(&self, min_size: usize) -> Result<()> {
        let lo = 1 + min_size;
        let hi = (self.len + 1).saturating_sub(min_size);
        for &cp in &self.change_points {
            if cp < lo || cp > hi {
                return Err(Cp3oError::input(format!(
                    "change point {cp} outside [{lo}, {hi}] for min_size {min_size}"
                )));
            }
        }
        if let Some(w) = self
            .change_points
            .windows(2)
            .find(|w| w[1] - w[0] < min_size)
        {
            return Err(Cp3oError::input(format!(
                "change points {} and {} closer than min_size {min_size}",
                w[0], w[1]
            )));
        }
        Ok(())
    }
}

/// Detection parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cp3oConfig {
    /// Upper bound `K` on the number of change points.
    pub max_changes: usize,
    /// Minimum segment length `w`.
    pub min_size: usize,
    pub metric: GofMetric,
    pub pruning: bool,
}

impl Cp3oConfig {
    pub fn new(max_changes: usize, min_size: usize, metric: GofMetric) -> Self {
        Self {
            max_changes,
            min_size,
            metric,
            pruning: true,
        }
    }

    pub fn with_pruning(mut self, pruning: bool) -> Self {
        self.pruning = pruning;
        self
    }
}

/// A configuration that passed [`validate_config`] against a particular series.
/// Windowed metrics always carry a resolved `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig(Cp3oConfig);

impl ValidatedConfig {
    pub fn config(&self) -> &Cp3oConfig {
        &self.0
    }

    pub fn into_inner(self) -> Cp3oConfig {
        self.0
    }
}

impl std::ops::Deref for ValidatedConfig {
    type Target = Cp3oConfig;
    fn deref(&self) -> &Cp3oConfig {
        &self.0
    }
}

pub fn validate_config(ts: &TimeSeries, cfg: &Cp3oConfig) -> Result<ValidatedConfig> {
    if cfg.max_changes == 0 {
        return Err(Cp3oError::config("max_changes must be at least 1"));
    }
    // Within-segment pair terms need two points; delta = w - 1 needs w >= 2.
    if cfg.min_size < 2 {
        return Err(Cp3oError::config(format!(
            "min_size must be at least 2, got {}",
            cfg.min_size
        )));
    }
    if ts.len() < 2 * cfg.min_size {
        return Err(Cp3oError::SeriesTooShort {
            len: ts.len(),
            min_size: cfg.min_size,
        });
    }
    let mut metric = cfg.metric.clone();
    metric.validate()?;
    match metric.kind {
        MetricKind::Ks | MetricKind::KsWindowed if ts.dim() > 1 => {
            return Err(Cp3oError::UnivariateOnly { dim: ts.dim() });
        }
        _ => {}
    }
    if metric.kind.is_windowed() {
        let delta = *metric.delta.get_or_insert(cfg.min_size - 1);
        if delta >= cfg.min_size {
            return Err(Cp3oError::config(format!(
                "delta ({delta}) must be smaller than min_size ({})",
                cfg.min_size
            )));
        }
    } else {
        metric.delta = None;
    }
    Ok(ValidatedConfig(Cp3oConfig {
        metric,
        ..cfg.clone()
    }))
}

/// Candidate-set sizes `|S_t(kappa)|`, one row per iteration `kappa`,
/// one column per prefix length `t = 0..=T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneStats {
    pub rows: Vec<Vec<usize>>,
}

impl PruneStats {
    pub fn size(&self, kappa: usize, t: usize) -> usize {
        self.rows[kappa - 1][t]
    }

    pub fn num_iterations(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// Selected number of change points `kappa*`.
    pub selected_k: usize,
    pub change_points: Segmentation,
    /// `G_T(kappa, w)` for `kappa = 1..=K`.
    pub gof_curve: Vec<f64>,
    /// `segmentations[kappa - 1]` holds the `kappa` estimated change points.
    pub segmentations: Vec<Segmentation>,
    pub prune_stats: PruneStats,
    /// Every goodness-of-fit value is zero; the reported points are arbitrary.
    pub degenerate: bool,
    /// Fewer than three curve points; `selected_k` is the largest `kappa` rather than a knee.
    pub knee_fallback: bool,
    /// `K` after capping at the largest `kappa` that fits in the series.
    pub effective_max_k: usize,
    pub runtime_s: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(len: usize) -> TimeSeries {
        TimeSeries::from_values((0..len).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        let err = TimeSeries::new(vec![1.0, f64::NAN, 2.0, 3.0], 2).unwrap_err();
        assert_eq!(err, Cp3oError::NonFinite { row: 1, col: 2 });
        assert!(TimeSeries::from_values(vec![f64::INFINITY]).is_err());
        assert!(TimeSeries::from_values(vec![]).is_err());
    }

    #[test]
    fn one_based_access() {
        let ts = TimeSeries::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.obs(2), &[3.0, 4.0]);
        let seg = ts.segment(2, 3);
        assert_eq!(seg.len(), 2);
        assert_eq!(seg.row(1), &[5.0, 6.0]);
    }

    #[test]
    fn validate_fills_delta() {
        let cfg = Cp3oConfig::new(5, 30, GofMetric::energy(1.0));
        let v = validate_config(&series(400), &cfg).unwrap();
        assert_eq!(v.metric.delta, Some(29));
    }

    #[test]
    fn validate_rejects_short_series() {
        let cfg = Cp3oConfig::new(5, 30, GofMetric::energy(1.0));
        let err = validate_config(&series(50), &cfg).unwrap_err();
        assert!(matches!(
            err,
            Cp3oError::SeriesTooShort {
                len: 50,
                min_size: 30
            }
        ));
        assert!(err.to_string().contains("series too short"));
    }

    #[test]
    fn validate_rejects_bad_alpha_and_delta() {
        let ts = series(400);
        let cfg = Cp3oConfig::new(5, 30, GofMetric::energy(2.5));
        assert!(validate_config(&ts, &cfg).is_err());
        let cfg = Cp3oConfig::new(5, 30, GofMetric::energy(0.0));
        assert!(validate_config(&ts, &cfg).is_err());
        let cfg = Cp3oConfig::new(5, 30, GofMetric::energy(2.0));
        assert!(validate_config(&ts, &cfg).is_ok());
        let cfg = Cp3oConfig::new(5, 30, GofMetric::energy(1.0).with_delta(30));
        assert!(validate_config(&ts, &cfg).is_err());
        let cfg = Cp3oConfig::new(5, 30, GofMetric::ks_windowed().with_delta(0));
        assert!(validate_config(&ts, &cfg).is_err());
    }

    #[test]
    fn validate_rejects_multivariate_ks() {
        let ts = TimeSeries::new(vec![0.0; 200], 2).unwrap();
        let cfg = Cp3oConfig::new(2, 10, GofMetric::ks());
        assert_eq!(
            validate_config(&ts, &cfg).unwrap_err(),
            Cp3oError::UnivariateOnly { dim: 2 }
        );
        let cfg = Cp3oConfig::new(2, 10, GofMetric::energy(1.0));
        assert!(validate_config(&ts, &cfg).is_ok());
    }

    #[test]
    fn validate_rejects_tiny_min_size() {
        let cfg = Cp3oConfig::new(2, 1, GofMetric::ks());
        assert!(validate_config(&series(20), &cfg).is_err());
    }

    #[test]
    fn segmentation_invariants() {
        let seg = Segmentation::new(vec![3, 6], 8).unwrap();
        assert_eq!(seg.labels(), vec![0, 0, 1, 1, 1, 2, 2, 2]);
        assert_eq!(seg.boundaries(), vec![1, 3, 6, 9]);
        assert!(seg.check_min_size(2).is_ok());
        assert!(seg.check_min_size(3).is_err());
        assert!(Segmentation::new(vec![4, 4], 8).is_err());
        assert!(Segmentation::new(vec![1], 8).is_err());
        assert!(Segmentation::new(vec![9], 8).is_err());
        assert_eq!(Segmentation::empty(4).labels(), vec![0; 4]);
    }
}
