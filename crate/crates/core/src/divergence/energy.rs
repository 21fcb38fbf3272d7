//! Energy statistics: the complete two-sample U-statistic and the windowed
//! incomplete variant that only looks at `delta` points around the split
//! plus a chain of adjacent pairs.

use super::{balance_scale, dist_pow};
use crate::error::{Cp3oError, Result};
use crate::model::{SeriesView, TimeSeries};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Cp3oError::config(format!(
            "alpha must lie in (0, 2], got {alpha}"
        )))
    }
}

fn check_samples(x: SeriesView<'_>, y: SeriesView<'_>) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Cp3oError::input(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    if x.len() < 2 || y.len() < 2 {
        return Err(Cp3oError::input(format!(
            "energy statistic needs at least two points per sample, got n={}, m={}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// Empirical energy distance
/// `2 mean|x - y|^a - mean_{i<j}|x_i - x_j|^a - mean_{i<j}|y_i - y_j|^a`.
/// Can be negative for finite samples.
pub fn energy_stat(x: SeriesView<'_>, y: SeriesView<'_>, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_samples(x, y)?;
    Ok(energy_stat_unchecked(x, y, alpha))
}

/// `nm / (n + m)^2` times [`energy_stat`].
pub fn energy_divergence(x: SeriesView<'_>, y: SeriesView<'_>, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_samples(x, y)?;
    Ok(energy_divergence_unchecked(x, y, alpha))
}

pub(crate) fn energy_divergence_unchecked(x: SeriesView<'_>, y: SeriesView<'_>, alpha: f64) -> f64 {
    balance_scale(x.len(), y.len()) * energy_stat_unchecked(x, y, alpha)
}

fn energy_stat_unchecked(x: SeriesView<'_>, y: SeriesView<'_>, alpha: f64) -> f64 {
    let (n, m) = (x.len(), y.len());
    let (within_x, within_y, cross) = if x.dim() == 1 && alpha == 1.0 {
        sorted_abs_sums(x.flat(), y.flat())
    } else {
        pairwise_sums(x, y, alpha)
    };
    let pairs = |k: usize| (k * (k - 1) / 2) as f64;
    // Adding the within terms first keeps the statistic exactly symmetric.
    2.0 * cross / (n as f64 * m as f64) - (within_x / pairs(n) + within_y / pairs(m))
}

/// Fixed order of two samples, so the cross sum runs the same way for
/// `(x, y)` and `(y, x)`.
fn precedes(x: SeriesView<'_>, y: SeriesView<'_>) -> bool {
    let (xf, yf) = (x.flat(), y.flat());
    xf.len()
        .cmp(&yf.len())
        .then_with(|| {
            xf.iter()
                .zip(yf)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .is_le()
}

fn pairwise_sums(x: SeriesView<'_>, y: SeriesView<'_>, alpha: f64) -> (f64, f64, f64) {
    let within = |s: SeriesView<'_>| {
        let mut acc = 0.0;
        for i in 0..s.len() {
            let zi = s.row(i);
            for j in i + 1..s.len() {
                acc += dist_pow(zi, s.row(j), alpha);
            }
        }
        acc
    };
    let (outer, inner) = if precedes(x, y) { (x, y) } else { (y, x) };
    let mut cross = 0.0;
    for i in 0..outer.len() {
        let oi = outer.row(i);
        for j in 0..inner.len() {
            cross += dist_pow(oi, inner.row(j), alpha);
        }
    }
    (within(x), within(y), cross)
}

/// `sum_{i<j} |v_i - v_j|` from sorted order: each element contributes
/// `v_(k) * k - (sum of the k smaller elements)`.
fn sorted_pair_sum(sorted: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut acc = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        acc += v * k as f64 - prefix;
        prefix += v;
    }
    acc
}

/// Univariate `alpha = 1` sums in `O((n + m) log(n + m))`.
fn sorted_abs_sums(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let sort = |v: &mut Vec<f64>| v.sort_unstable_by(|a, b| a.total_cmp(b));
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    sort(&mut xs);
    sort(&mut ys);
    let mut pooled = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            pooled.push(xs[i]);
            i += 1;
        } else {
            pooled.push(ys[j]);
            j += 1;
        }
    }
    pooled.extend_from_slice(&xs[i..]);
    pooled.extend_from_slice(&ys[j..]);
    let wx = sorted_pair_sum(&xs);
    let wy = sorted_pair_sum(&ys);
    let all = sorted_pair_sum(&pooled);
    (wx, wy, all - (wx + wy))
}

/// The three index sets of the incomplete statistic for
/// `X = Z_a..Z_{a+n-1}` and `Y = Z_{a+n}..Z_{a+n+m-1}`, as absolute
/// 1-based `(i, j)` pairs with `i < j`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyIndexSets {
    pub within_x: Vec<(usize, usize)>,
    pub within_y: Vec<(usize, usize)>,
    pub between: Vec<(usize, usize)>,
}

impl EnergyIndexSets {
    pub fn build(a: usize, n: usize, m: usize, delta: usize) -> Self {
        let split = a + n;
        let end = split + m; // exclusive
        let mut within_x = Vec::new();
        let x_win = split.saturating_sub(delta).max(a);
        for i in x_win..split {
            for j in i + 1..split {
                within_x.push((i, j));
            }
        }
        for i in 0..n.saturating_sub(delta) {
            within_x.push((a + i, a + i + 1));
        }

        let mut within_y = Vec::new();
        let y_win = (split + delta).min(end);
        for i in split..y_win {
            for j in i + 1..y_win {
                within_y.push((i, j));
            }
        }
        if m >= 1 {
            for i in delta.saturating_sub(1)..m.saturating_sub(1) {
                within_y.push((split + i, split + i + 1));
            }
        }

        let mut between = Vec::new();
        for i in x_win..split {
            for j in split..y_win {
                between.push((i, j));
            }
        }
        for i in delta + 1..=m.min(n) {
            between.push((split - i, split + i - 1));
        }

        for set in [&mut within_x, &mut within_y, &mut between] {
            set.sort_unstable();
            set.dedup();
        }
        Self {
            within_x,
            within_y,
            between,
        }
    }
}

/// Scaled incomplete energy divergence `nm/(n+m)^2 * E~(X, Y | alpha, delta)`
/// for `X = Z_a..Z_{a+n-1}`, `Y = Z_{a+n}..Z_{a+n+m-1}` (1-based `a`).
///
/// All pairs within `delta` of the split are used; further out only adjacent
/// pairs (within a sample) and mirrored pairs `(split - i, split + i - 1)`
/// (across the split) contribute. Cost is `O(delta^2 + max(n, m))`.
pub fn energy_incomplete(
    seq: &TimeSeries,
    a: usize,
    n: usize,
    m: usize,
    alpha: f64,
    delta: usize,
) -> Result<f64> {
    check_alpha(alpha)?;
    if delta == 0 {
        return Err(Cp3oError::config("delta must be at least 1"));
    }
    if a == 0 || a + n + m - 1 > seq.len() {
        return Err(Cp3oError::OutOfBounds(format!(
            "segments a={a}, n={n}, m={m} exceed series of length {}",
            seq.len()
        )));
    }
    if n < 2 || m < 2 {
        return Err(Cp3oError::EmptyIndexSet(format!(
            "within-sample pair sets need n, m >= 2 (n={n}, m={m})"
        )));
    }
    Ok(energy_incomplete_unchecked(seq, a, n, m, alpha, delta))
}

struct IncompleteSums {
    within_x: f64,
    count_x: usize,
    within_y: f64,
    count_y: usize,
    between: f64,
    count_b: usize,
}

impl IncompleteSums {
    fn scaled(&self, n: usize, m: usize) -> f64 {
        let stat = 2.0 * self.between / self.count_b as f64
            - self.within_x / self.count_x as f64
            - self.within_y / self.count_y as f64;
        balance_scale(n, m) * stat
    }
}

fn window_pairs(seq: &TimeSeries, from: usize, to: usize, alpha: f64) -> f64 {
    let mut acc = 0.0;
    for i in from..to {
        let zi = seq.obs(i);
        for j in i + 1..to {
            acc += dist_pow(zi, seq.obs(j), alpha);
        }
    }
    acc
}

fn rect_pairs(seq: &TimeSeries, left: (usize, usize), right: (usize, usize), alpha: f64) -> f64 {
    let mut acc = 0.0;
    for i in left.0..left.1 {
        let zi = seq.obs(i);
        for j in right.0..right.1 {
            acc += dist_pow(zi, seq.obs(j), alpha);
        }
    }
    acc
}

fn mirrored_pairs(seq: &TimeSeries, split: usize, from: usize, to: usize, alpha: f64) -> f64 {
    let mut acc = 0.0;
    for i in from..=to {
        acc += dist_pow(seq.obs(split - i), seq.obs(split + i - 1), alpha);
    }
    acc
}

pub(crate) fn energy_incomplete_unchecked(
    seq: &TimeSeries,
    a: usize,
    n: usize,
    m: usize,
    alpha: f64,
    delta: usize,
) -> f64 {
    let split = a + n;
    let x_win = split.saturating_sub(delta).max(a);
    let y_win = (split + delta).min(split + m);
    let wx = split - x_win;
    let wy = y_win - split;

    let chain = |from: usize, to: usize| {
        let mut acc = 0.0;
        for j in from..to {
            acc += dist_pow(seq.obs(j), seq.obs(j + 1), alpha);
        }
        acc
    };

    let x_chain_len = n.saturating_sub(delta);
    let y_chain_start = split + delta - 1;
    let y_chain_len = m.saturating_sub(delta);
    let diag_hi = n.min(m);
    let diag_len = diag_hi.saturating_sub(delta);

    let sums = IncompleteSums {
        within_x: window_pairs(seq, x_win, split, alpha) + chain(a, a + x_chain_len),
        count_x: wx * (wx - 1) / 2 + x_chain_len,
        within_y: window_pairs(seq, split, y_win, alpha)
            + chain(y_chain_start, y_chain_start + y_chain_len),
        count_y: wy * (wy - 1) / 2 + y_chain_len,
        between: rect_pairs(seq, (x_win, split), (split, y_win), alpha)
            + mirrored_pairs(seq, split, delta + 1, diag_hi, alpha),
        count_b: wx * wy + diag_len,
    };
    sums.scaled(n, m)
}

/// Incomplete energy evaluator with per-split window sums cached.
///
/// For splits with at least `delta` points on each side, the within-window and
/// cross-window sums depend only on the split, so they are computed once per
/// split. Results are bit-identical to [`energy_incomplete`].
pub struct PreparedEnergy<'a> {
    seq: &'a TimeSeries,
    alpha: f64,
    delta: usize,
    /// `window[s]`: pair sum over `Z_s..Z_{s+delta-1}`.
    window: Vec<f64>,
    /// `rect[b]`: cross sum between `Z_{b-delta}..Z_{b-1}` and `Z_b..Z_{b+delta-1}`.
    rect: Vec<f64>,
    /// `adjacent[j] = |Z_j - Z_{j+1}|^alpha`.
    adjacent: Vec<f64>,
}

impl<'a> PreparedEnergy<'a> {
    pub fn new(seq: &'a TimeSeries, alpha: f64, delta: usize) -> Self {
        let len = seq.len();
        let mut window = vec![0.0; len + 2];
        let mut rect = vec![0.0; len + 2];
        if delta <= len {
            for s in 1..=len + 1 - delta {
                window[s] = window_pairs(seq, s, s + delta, alpha);
            }
            for b in delta + 1..=(len + 1).saturating_sub(delta) {
                rect[b] = rect_pairs(seq, (b - delta, b), (b, b + delta), alpha);
            }
        }
        let mut adjacent = vec![0.0; len + 1];
        for j in 1..len {
            adjacent[j] = dist_pow(seq.obs(j), seq.obs(j + 1), alpha);
        }
        Self {
            seq,
            alpha,
            delta,
            window,
            rect,
            adjacent,
        }
    }

    pub fn series_len(&self) -> usize {
        self.seq.len()
    }

    pub fn gof(&self, a: usize, b: usize, c: usize) -> f64 {
        let (n, m, delta) = (b - a, c - b, self.delta);
        if n < delta || m < delta {
            return energy_incomplete_unchecked(self.seq, a, n, m, self.alpha, delta);
        }
        let chain = |from: usize, len: usize| {
            let mut acc = 0.0;
            for v in &self.adjacent[from..from + len] {
                acc += v;
            }
            acc
        };
        let pairs = delta * (delta - 1) / 2;
        let diag_hi = n.min(m);
        let sums = IncompleteSums {
            within_x: self.window[b - delta] + chain(a, n - delta),
            count_x: pairs + n - delta,
            within_y: self.window[b] + chain(b + delta - 1, m - delta),
            count_y: pairs + m - delta,
            between: self.rect[b] + mirrored_pairs(self.seq, b, delta + 1, diag_hi, self.alpha),
            count_b: delta * delta + diag_hi - delta,
        };
        sums.scaled(n, m)
    }
}
