//! Two-sample divergences and the segment goodness-of-fit
//! `g(a, b, c) = R(Z_a..Z_{b-1}, Z_b..Z_{c-1})` used by the search.
//!
//! Every divergence is scaled by `nm / (n + m)^2`, so a split that leaves one
//! side tiny is penalised relative to a balanced split.

mod energy;
mod ks;

pub use energy::{
    energy_divergence, energy_incomplete, energy_stat, EnergyIndexSets, PreparedEnergy,
};
pub use ks::{ks_divergence, ks_stat, ks_windowed, PreparedKs, PreparedKsWindowed};

use serde::{Deserialize, Serialize};

use crate::error::{Cp3oError, Result};
use crate::model::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Full pairwise energy statistic, `O((n + m)^2)` per evaluation.
    EnergyComplete,
    /// Incomplete U-statistic over a window of size `delta` around the split.
    EnergyIncomplete,
    /// Two-sample Kolmogorov-Smirnov over the full segments.
    Ks,
    /// Kolmogorov-Smirnov restricted to `delta` points either side of the split.
    KsWindowed,
}

impl MetricKind {
    pub fn is_energy(self) -> bool {
        matches!(self, Self::EnergyComplete | Self::EnergyIncomplete)
    }

    pub fn is_windowed(self) -> bool {
        matches!(self, Self::EnergyIncomplete | Self::KsWindowed)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::EnergyComplete => "energy-complete",
            Self::EnergyIncomplete => "energy",
            Self::Ks => "ks",
            Self::KsWindowed => "ks-windowed",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Cp3oError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "energy" | "energy-incomplete" => Ok(Self::EnergyIncomplete),
            "energy-complete" => Ok(Self::EnergyComplete),
            "ks" => Ok(Self::Ks),
            "ks-windowed" => Ok(Self::KsWindowed),
            other => Err(Cp3oError::config(format!(
                "unknown metric '{other}'; expected energy, energy-complete, ks or ks-windowed"
            ))),
        }
    }
}

/// Divergence configuration.
///
/// `alpha` is the distance exponent of the energy statistic, in `(0, 2]`.
/// With `alpha = 2` the statistic only responds to changes in mean.
/// `delta` is the locality window of the windowed kinds; `None` means
/// `min_size - 1` once validated against a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofMetric {
    pub kind: MetricKind,
    pub alpha: f64,
    pub delta: Option<usize>,
}

impl GofMetric {
    /// Incomplete energy statistic, the default for detection.
    pub fn energy(alpha: f64) -> Self {
        Self {
            kind: MetricKind::EnergyIncomplete,
            alpha,
            delta: None,
        }
    }

    pub fn energy_complete(alpha: f64) -> Self {
        Self {
            kind: MetricKind::EnergyComplete,
            alpha,
            delta: None,
        }
    }

    pub fn ks() -> Self {
        Self {
            kind: MetricKind::Ks,
            alpha: 1.0,
            delta: None,
        }
    }

    pub fn ks_windowed() -> Self {
        Self {
            kind: MetricKind::KsWindowed,
            alpha: 1.0,
            delta: None,
        }
    }

    pub fn with_delta(mut self, delta: usize) -> Self {
        self.delta = Some(delta);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.kind.is_energy() && !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Cp3oError::config(format!(
                "alpha must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if let Some(0) = self.delta {
            return Err(Cp3oError::config("delta must be at least 1"));
        }
        Ok(())
    }

    fn resolved_delta(&self) -> Result<usize> {
        self.delta
            .ok_or_else(|| Cp3oError::config(format!("metric {} requires delta", self.kind.name())))
    }

    /// Builds an evaluator bound to `seq`, with whatever per-series caches the
    /// metric benefits from. Windowed kinds need `delta` set.
    pub fn prepare<'a>(&self, seq: &'a TimeSeries) -> Result<PreparedGof<'a>> {
        self.validate()?;
        if matches!(self.kind, MetricKind::Ks | MetricKind::KsWindowed) && seq.dim() != 1 {
            return Err(Cp3oError::UnivariateOnly { dim: seq.dim() });
        }
        Ok(match self.kind {
            MetricKind::EnergyComplete => PreparedGof::EnergyComplete {
                seq,
                alpha: self.alpha,
            },
            MetricKind::EnergyIncomplete => PreparedGof::EnergyIncomplete(PreparedEnergy::new(
                seq,
                self.alpha,
                self.resolved_delta()?,
            )),
            MetricKind::Ks => PreparedGof::Ks(PreparedKs::new(seq)),
            MetricKind::KsWindowed => {
                PreparedGof::KsWindowed(PreparedKsWindowed::new(seq, self.resolved_delta()?))
            }
        })
    }
}

/// Segment goodness-of-fit over a fixed series.
///
/// Indices are 1-based with `a < b < c`: the left segment is `Z_a..Z_{b-1}`,
/// the right segment `Z_b..Z_{c-1}`. Callers guarantee both segments have at
/// least two points.
pub trait SegmentGof {
    fn series_len(&self) -> usize;

    fn gof(&self, a: usize, b: usize, c: usize) -> f64;

    /// Evaluates `g(a, b, c)` for every `(a, b)` in `splits`, writing into `out`.
    /// Results are bit-identical to calling [`SegmentGof::gof`] one by one.
    fn gof_batch(&self, c: usize, splits: &[(usize, usize)], out: &mut Vec<f64>) {
        out.clear();
        out.extend(splits.iter().map(|&(a, b)| self.gof(a, b, c)));
    }
}

pub enum PreparedGof<'a> {
    EnergyComplete { seq: &'a TimeSeries, alpha: f64 },
    EnergyIncomplete(PreparedEnergy<'a>),
    Ks(PreparedKs<'a>),
    KsWindowed(PreparedKsWindowed<'a>),
}

impl SegmentGof for PreparedGof<'_> {
    fn series_len(&self) -> usize {
        match self {
            Self::EnergyComplete { seq, .. } => seq.len(),
            Self::EnergyIncomplete(e) => e.series_len(),
            Self::Ks(k) => k.series_len(),
            Self::KsWindowed(k) => k.series_len(),
        }
    }

    fn gof(&self, a: usize, b: usize, c: usize) -> f64 {
        match self {
            Self::EnergyComplete { seq, alpha } => energy::energy_divergence_unchecked(
                seq.segment(a, b - 1),
                seq.segment(b, c - 1),
                *alpha,
            ),
            Self::EnergyIncomplete(e) => e.gof(a, b, c),
            Self::Ks(k) => k.gof(a, b, c),
            Self::KsWindowed(k) => k.gof(a, b, c),
        }
    }

    fn gof_batch(&self, c: usize, splits: &[(usize, usize)], out: &mut Vec<f64>) {
        match self {
            Self::Ks(k) => k.gof_batch(c, splits, out),
            _ => {
                out.clear();
                out.extend(splits.iter().map(|&(a, b)| self.gof(a, b, c)));
            }
        }
    }
}

/// One-shot `g(a, b, c)` for `metric` on `seq`, with full argument checking.
pub fn gof_eval(metric: &GofMetric, seq: &TimeSeries, a: usize, b: usize, c: usize) -> Result<f64> {
    metric.validate()?;
    if !(1 <= a && a < b && b < c && c <= seq.len() + 1) {
        return Err(Cp3oError::OutOfBounds(format!(
            "need 1 <= a < b < c <= T+1, got a={a}, b={b}, c={c}, T={}",
            seq.len()
        )));
    }
    let left = seq.segment(a, b - 1);
    let right = seq.segment(b, c - 1);
    match metric.kind {
        MetricKind::EnergyComplete => energy_divergence(left, right, metric.alpha),
        MetricKind::EnergyIncomplete => {
            energy_incomplete(seq, a, b - a, c - b, metric.alpha, metric.resolved_delta()?)
        }
        MetricKind::Ks => ks_divergence(left, right),
        MetricKind::KsWindowed => ks_windowed(seq, a, b, c, metric.resolved_delta()?),
    }
}

/// `nm / (n + m)^2`.
#[inline]
pub(crate) fn balance_scale(n: usize, m: usize) -> f64 {
    let total = (n + m) as f64;
    (n as f64 * m as f64) / (total * total)
}

/// `|x - y|^alpha` under the Euclidean norm. Zero distance maps to zero for
/// every `alpha`; other powers go through `exp(alpha * ln d)`.
#[inline]
pub(crate) fn dist_pow(x: &[f64], y: &[f64], alpha: f64) -> f64 {
    let d = if x.len() == 1 {
        let d = (x[0] - y[0]).abs();
        if alpha == 2.0 {
            return d * d;
        }
        d
    } else {
        let sq: f64 = x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum();
        if alpha == 2.0 {
            return sq;
        }
        sq.sqrt()
    };
    if alpha == 1.0 {
        d
    } else if d == 0.0 {
        0.0
    } else {
        (alpha * d.ln()).exp()
    }
}
