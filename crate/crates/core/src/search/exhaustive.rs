//! Exact maximization of the segmentation objective by enumeration. Only
//! usable on tiny inputs; serves as the reference the dynamic program is
//! checked against.

use crate::divergence::{GofMetric, SegmentGof};
use crate::error::{Cp3oError, Result};
use crate::model::{validate_config, Cp3oConfig, Segmentation, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveLimits {
    pub max_len: usize,
    pub max_changes: usize,
}

impl Default for ExhaustiveLimits {
    fn default() -> Self {
        Self {
            max_len: 60,
            max_changes: 2,
        }
    }
}

/// Best `kappa`-segmentation of `seq` with spacing `min_size`, under the
/// default size guard.
pub fn exhaustive_best_segmentation(
    seq: &TimeSeries,
    metric: &GofMetric,
    kappa: usize,
    min_size: usize,
) -> Result<(f64, Segmentation)> {
    let cfg = validate_config(
        seq,
        &Cp3oConfig::new(kappa.max(1), min_size, metric.clone()),
    )?;
    let eval = cfg.metric.prepare(seq)?;
    exhaustive_search(&eval, kappa, min_size, ExhaustiveLimits::default())
}

/// Enumerates every `tau_1 < ... < tau_kappa` with `tau_1 >= 1 + w`,
/// `tau_kappa <= T - w + 1` and gaps of at least `w`, maximizing
/// `sum_j g(tau_{j-1}, tau_j, tau_{j+1})` with sentinels `1` and `T + 1`.
/// Ties go to the lexicographically smallest tuple.
pub fn exhaustive_search<G: SegmentGof + ?Sized>(
    eval: &G,
    kappa: usize,
    min_size: usize,
    limits: ExhaustiveLimits,
) -> Result<(f64, Segmentation)> {
    let len = eval.series_len();
    if len > limits.max_len || kappa > limits.max_changes {
        return Err(Cp3oError::InstanceTooLarge(format!(
            "T={len}, kappa={kappa} exceeds limits T<={}, kappa<={}",
            limits.max_len, limits.max_changes
        )));
    }
    if kappa == 0 {
        return Ok((0.0, Segmentation::empty(len)));
    }
    let mut search = Enumeration {
        eval,
        len,
        min_size,
        kappa,
        current: Vec::with_capacity(kappa),
        best: None,
    };
    search.descend(1 + min_size);
    let (value, cps) = search
        .best
        .ok_or(Cp3oError::NoSegmentation { kappa, t: len })?;
    Ok((value, Segmentation::new(cps, len)?))
}

struct Enumeration<'e, G: ?Sized> {
    eval: &'e G,
    len: usize,
    min_size: usize,
    kappa: usize,
    current: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl<G: SegmentGof + ?Sized> Enumeration<'_, G> {
    fn descend(&mut self, from: usize) {
        if self.current.len() == self.kappa {
            let value = self.objective();
            if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                self.best = Some((value, self.current.clone()));
            }
            return;
        }
        let remaining = self.kappa - self.current.len() - 1;
        let Some(hi) = (self.len + 1).checked_sub(self.min_size * (remaining + 1)) else {
            return;
        };
        for tau in from..=hi {
            self.current.push(tau);
            self.descend(tau + self.min_size);
            self.current.pop();
        }
    }

    /// Summed left to right from zero, the same order in which the dynamic
    /// program accumulates it.
    fn objective(&self) -> f64 {
        let mut bounds = Vec::with_capacity(self.kappa + 2);
        bounds.push(1);
        bounds.extend_from_slice(&self.current);
        bounds.push(self.len + 1);
        let mut total = 0.0;
        for w in bounds.windows(3) {
            total += self.eval.gof(w[0], w[1], w[2]);
        }
        total
    }
}
