//! Approximate goodness-of-fit dynamic program with candidate pruning.
//!
//! Tables are indexed by iteration `kappa` and prefix length `t`
//! (`Z_1..Z_t`). For a candidate last change point `tau`,
//!
//! ```text
//! H_t(kappa, tau) = G_{tau-1}(kappa-1) + g(A_{tau-1}(kappa-1), tau, t+1)
//! ```
//!
//! so the final segment is `Z_tau..Z_t` and `G_T(kappa)` is the objective of
//! the reconstructed `kappa`-segmentation of the whole series.

use crate::divergence::SegmentGof;
use crate::error::{Cp3oError, Result};
use crate::model::{
    validate_config, Cp3oConfig, DetectionResult, PruneStats, Segmentation, TimeSeries,
};
use crate::search::knee::select_num_changes;

const UNDEFINED: f64 = f64::NEG_INFINITY;

#[derive(Debug, Clone)]
pub struct DpState {
    len: usize,
    min_size: usize,
    max_k: usize,
    pruning: bool,
    /// `gof[kappa][t]`, `-inf` where no valid segmentation exists.
    gof: Vec<Vec<f64>>,
    /// `last_cp[kappa][t]`, 0 where undefined.
    last_cp: Vec<Vec<usize>>,
    /// Candidate set `S_t(kappa)` for the next iteration, with the `H` values
    /// computed when it was pruned (they are final once level `kappa - 1` is).
    next: Vec<Vec<(usize, f64)>>,
    /// `prune_log[kappa - 1][t]`: candidates searched at `(t, kappa)`.
    prune_log: Vec<Vec<usize>>,
    completed: usize,
}

impl DpState {
    /// Fresh tables with `G_t(0) = 0` and `A_t(0) = 1` for every `t`.
    pub fn new(len: usize, min_size: usize, max_k: usize, pruning: bool) -> Self {
        let mut gof = vec![vec![UNDEFINED; len + 1]; max_k + 1];
        gof[0].fill(0.0);
        let mut last_cp = vec![vec![0; len + 1]; max_k + 1];
        last_cp[0].fill(1);
        Self {
            len,
            min_size,
            max_k,
            pruning,
            gof,
            last_cp,
            next: vec![Vec::new(); len + 1],
            prune_log: Vec::with_capacity(max_k),
            completed: 0,
        }
    }

    pub fn series_len(&self) -> usize {
        self.len
    }

    pub fn min_size(&self) -> usize {
        self.min_size
    }

    pub fn completed_iterations(&self) -> usize {
        self.completed
    }

    /// `G_t(kappa, w)`; `None` when undefined.
    pub fn gof(&self, kappa: usize, t: usize) -> Option<f64> {
        let v = self.gof[kappa][t];
        v.is_finite().then_some(v)
    }

    /// `A_t(kappa)`; `None` when undefined.
    pub fn last_change(&self, kappa: usize, t: usize) -> Option<usize> {
        self.gof(kappa, t).map(|_| self.last_cp[kappa][t])
    }

    /// Candidate set `S_t(kappa)` prepared for the next iteration.
    pub fn pending_candidates(&self, t: usize) -> Vec<usize> {
        self.next[t].iter().map(|&(tau, _)| tau).collect()
    }

    pub fn prune_stats(&self) -> PruneStats {
        PruneStats {
            rows: self.prune_log.clone(),
        }
    }

    /// Smallest admissible last change point at iteration `kappa`.
    fn lower_bound(&self, kappa: usize) -> usize {
        1 + kappa * self.min_size
    }

    /// Largest admissible last change point for prefix length `t`.
    fn upper_bound(&self, t: usize) -> Option<usize> {
        (t + 1).checked_sub(self.min_size)
    }

    /// Full candidate range `{1 + w, ..., t - w + 1}`.
    fn initial_candidates(&self, t: usize) -> Vec<usize> {
        match self.upper_bound(t) {
            Some(hi) => (1 + self.min_size..=hi).collect(),
            None => Vec::new(),
        }
    }

    /// Prior-level `(a, G_{tau-1}(kappa-1))`, or `None` if undefined.
    fn prior(&self, kappa: usize, tau: usize) -> Option<(usize, f64)> {
        let g = self.gof[kappa - 1][tau - 1];
        g.is_finite().then(|| (self.last_cp[kappa - 1][tau - 1], g))
    }

    /// `H_t(kappa, tau)` for every candidate, in order. Out-of-range and
    /// undefined candidates get `-inf`.
    fn h_values<G: SegmentGof + ?Sized>(
        &self,
        eval: &G,
        kappa: usize,
        t: usize,
        taus: &[usize],
    ) -> Vec<f64> {
        let lo = self.lower_bound(kappa);
        let hi = self.upper_bound(t).unwrap_or(0);
        let mut splits = Vec::with_capacity(taus.len());
        let mut priors = Vec::with_capacity(taus.len());
        let mut slots = Vec::with_capacity(taus.len());
        for (k, &tau) in taus.iter().enumerate() {
            if tau < lo || tau > hi {
                continue;
            }
            if let Some((a, g)) = self.prior(kappa, tau) {
                splits.push((a, tau));
                priors.push(g);
                slots.push(k);
            }
        }
        let mut fits = Vec::with_capacity(splits.len());
        eval.gof_batch(t + 1, &splits, &mut fits);
        let mut out = vec![UNDEFINED; taus.len()];
        for ((slot, prior), fit) in slots.into_iter().zip(priors).zip(fits) {
            out[slot] = prior + fit;
        }
        out
    }
}

/// `H_t(kappa, w, tau)`. Requires iteration `kappa - 1` to be complete for
/// prefixes shorter than `tau`; returns `-inf` outside
/// `1 + kappa*w <= tau <= t - w + 1` or when the prior entry is undefined.
pub fn h_value<G: SegmentGof + ?Sized>(
    state: &DpState,
    eval: &G,
    kappa: usize,
    tau: usize,
    t: usize,
) -> f64 {
    assert!(
        kappa >= 1 && kappa <= state.max_k,
        "kappa {kappa} out of range"
    );
    state.h_values(eval, kappa, t, &[tau])[0]
}

/// `S_t(kappa + 1)`: members of `current` whose `H_t(kappa + 1, tau)` is at
/// least that of the benchmark `t - w + 1`. The benchmark is always kept.
pub fn prune_step<G: SegmentGof + ?Sized>(
    state: &DpState,
    eval: &G,
    kappa: usize,
    t: usize,
    current: &[usize],
) -> Vec<usize> {
    prune_with_values(state, eval, kappa, t, current)
        .into_iter()
        .map(|(tau, _)| tau)
        .collect()
}

fn prune_with_values<G: SegmentGof + ?Sized>(
    state: &DpState,
    eval: &G,
    kappa: usize,
    t: usize,
    current: &[usize],
) -> Vec<(usize, f64)> {
    let Some(bench_tau) = state.upper_bound(t) else {
        return Vec::new();
    };
    let bench = state.h_values(eval, kappa + 1, t, &[bench_tau])[0];
    let values = state.h_values(eval, kappa + 1, t, current);
    current
        .iter()
        .zip(values)
        .filter(|&(&tau, h)| tau == bench_tau || h >= bench)
        .map(|(&tau, h)| (tau, h))
        .collect()
}

/// Runs iteration `kappa` over every prefix length `t = 2w..=T`, filling
/// `G_t(kappa)` and `A_t(kappa)` and, when pruning, preparing `S_t(kappa+1)`.
pub fn dp_iterate<G: SegmentGof + ?Sized>(
    state: &mut DpState,
    eval: &G,
    kappa: usize,
) -> Result<()> {
    if kappa != state.completed + 1 || kappa > state.max_k {
        return Err(Cp3oError::config(format!(
            "iteration {kappa} requested after {} completed (max {})",
            state.completed, state.max_k
        )));
    }
    let len = state.len;
    let mut log = vec![0usize; len + 1];
    for t in 2 * state.min_size..=len {
        let (taus, values): (Vec<usize>, Vec<f64>) = if kappa == 1 || !state.pruning {
            let taus = state.initial_candidates(t);
            let values = state.h_values(eval, kappa, t, &taus);
            (taus, values)
        } else {
            std::mem::take(&mut state.next[t]).into_iter().unzip()
        };

        let mut best: Option<(usize, f64)> = None;
        let mut searched = 0;
        for (&tau, &h) in taus.iter().zip(&values) {
            if !h.is_finite() {
                continue;
            }
            searched += 1;
            if best.is_none_or(|(_, v)| h > v) {
                best = Some((tau, h));
            }
        }
        log[t] = searched;
        if let Some((tau, h)) = best {
            state.gof[kappa][t] = h;
            state.last_cp[kappa][t] = tau;
        }

        if state.pruning && kappa < state.max_k {
            state.next[t] = prune_with_values(state, eval, kappa, t, &taus);
        }
    }
    state.prune_log.push(log);
    state.completed = kappa;
    Ok(())
}

/// `cps_t(kappa)` by following `A` back from `(kappa, t)`.
pub fn reconstruct_cps(state: &DpState, kappa: usize, t: usize) -> Result<Segmentation> {
    if kappa == 0 {
        return Ok(Segmentation::empty(t.max(1)));
    }
    if kappa > state.completed || state.gof(kappa, t).is_none() {
        return Err(Cp3oError::NoSegmentation { kappa, t });
    }
    let mut cps = Vec::with_capacity(kappa);
    let mut end = t;
    for k in (1..=kappa).rev() {
        let tau = state
            .last_change(k, end)
            .ok_or(Cp3oError::NoSegmentation { kappa: k, t: end })?;
        cps.push(tau);
        end = tau - 1;
    }
    cps.reverse();
    Segmentation::new(cps, t)
}

/// Largest `kappa` for which a `kappa`-segmentation with spacing `w` fits in `T`.
pub fn max_feasible_changes(len: usize, min_size: usize) -> usize {
    (len / min_size).saturating_sub(1)
}

/// Wall-clock timer. `std::time::Instant` panics on wasm32 without WASI, so
/// there the reading is always zero.
struct Stopwatch {
    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
            start: std::time::Instant::now(),
        }
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
        return self.start.elapsed().as_secs_f64();
        #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
        0.0
    }
}

/// Change point detection: iterations `kappa = 1..=K`, then knee selection
/// of `kappa*` on the curve `G_T(kappa)`.
pub fn run_cp3o(seq: &TimeSeries, cfg: &Cp3oConfig) -> Result<DetectionResult> {
    let start = Stopwatch::start();
    let cfg = validate_config(seq, cfg)?;
    let eval = cfg.metric.prepare(seq)?;
    let (state, max_k) = run_dp(seq.len(), cfg.min_size, cfg.max_changes, cfg.pruning, &eval)?;
    let len = seq.len();

    let mut gof_curve = Vec::with_capacity(max_k);
    let mut segmentations = Vec::with_capacity(max_k);
    for kappa in 1..=max_k {
        gof_curve.push(
            state
                .gof(kappa, len)
                .ok_or(Cp3oError::NoSegmentation { kappa, t: len })?,
        );
        segmentations.push(reconstruct_cps(&state, kappa, len)?);
    }
    let knee = select_num_changes(&gof_curve);
    let degenerate = gof_curve.iter().all(|&g| g == 0.0);
    Ok(DetectionResult {
        selected_k: knee.kappa,
        change_points: segmentations[knee.kappa - 1].clone(),
        gof_curve,
        segmentations,
        prune_stats: state.prune_stats(),
        degenerate,
        knee_fallback: knee.fallback,
        effective_max_k: max_k,
        runtime_s: start.seconds(),
    })
}

/// Runs all iterations on a prepared evaluator. Returns the final tables and
/// the number of iterations actually run (capped by what fits in the series).
pub fn run_dp<G: SegmentGof + ?Sized>(
    len: usize,
    min_size: usize,
    max_changes: usize,
    pruning: bool,
    eval: &G,
) -> Result<(DpState, usize)> {
    let max_k = max_changes.min(max_feasible_changes(len, min_size));
    if max_k == 0 {
        return Err(Cp3oError::SeriesTooShort { len, min_size });
    }
    let mut state = DpState::new(len, min_size, max_k, pruning);
    for kappa in 1..=max_k {
        dp_iterate(&mut state, eval, kappa)?;
    }
    Ok((state, max_k))
}

/// Recomputes every defined `G_t(kappa)` from the stored `A` entries and
/// fresh evaluations. Returns the first `(kappa, t)` that does not reproduce.
pub fn check_recurrence<G: SegmentGof + ?Sized>(
    state: &DpState,
    eval: &G,
) -> Option<(usize, usize)> {
    for kappa in 1..=state.completed {
        for t in 0..=state.len {
            let Some(g) = state.gof(kappa, t) else {
                continue;
            };
            let tau = state.last_cp[kappa][t];
            let again = state
                .prior(kappa, tau)
                .map(|(a, prior)| prior + eval.gof(a, tau, t + 1));
            if again != Some(g) {
                return Some((kappa, t));
            }
        }
    }
    None
}
