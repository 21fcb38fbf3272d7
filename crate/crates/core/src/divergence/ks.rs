//! Two-sample Kolmogorov-Smirnov divergence (the A-distance over half-lines).
//!
//! The supremum of `|F_X - F_Y|` is taken over the pooled sample points with
//! closed ECDFs. Counts are kept as the integer `m * #X<=r - n * #Y<=r` so
//! the statistic is exact up to one final division.

use super::balance_scale;
use crate::error::{Cp3oError, Result};
use crate::model::{SeriesView, TimeSeries};

/// `2 * max_r |F_X(r) - F_Y(r)|` given the scaled integer maximum.
#[inline]
fn stat_from_count(max_count: u64, n: usize, m: usize) -> f64 {
    2.0 * (max_count as f64 / (n as f64 * m as f64))
}

fn univariate<'a>(s: SeriesView<'a>) -> Result<&'a [f64]> {
    if s.dim() != 1 {
        return Err(Cp3oError::UnivariateOnly { dim: s.dim() });
    }
    Ok(s.flat())
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_unstable_by(|a, b| a.total_cmp(b));
    s
}

/// Maximum of `|m * #{x <= r} - n * #{y <= r}|` over all sample points `r`.
fn max_count_sorted(xs: &[f64], ys: &[f64]) -> u64 {
    let (n, m) = (xs.len() as i64, ys.len() as i64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0i64;
    while i < xs.len() || j < ys.len() {
        let r = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] <= r {
            i += 1;
        }
        while j < ys.len() && ys[j] <= r {
            j += 1;
        }
        best = best.max((m * i as i64 - n * j as i64).abs());
    }
    best as u64
}

/// `2 sup_r |F_X(r) - F_Y(r)|`, in `[0, 2]`. Univariate only.
pub fn ks_stat(x: SeriesView<'_>, y: SeriesView<'_>) -> Result<f64> {
    let (xv, yv) = (univariate(x)?, univariate(y)?);
    if xv.is_empty() || yv.is_empty() {
        return Err(Cp3oError::input("KS statistic needs non-empty samples"));
    }
    Ok(stat_from_count(
        max_count_sorted(&sorted(xv), &sorted(yv)),
        xv.len(),
        yv.len(),
    ))
}

/// `nm / (n + m)^2` times [`ks_stat`]; never exceeds `0.5`.
pub fn ks_divergence(x: SeriesView<'_>, y: SeriesView<'_>) -> Result<f64> {
    let stat = ks_stat(x, y)?;
    Ok(balance_scale(x.len(), y.len()) * stat)
}

/// KS divergence between `Z_{max(a, b-delta)}..Z_{b-1}` and
/// `Z_b..Z_{min(c-1, b+delta-1)}`.
pub fn ks_windowed(seq: &TimeSeries, a: usize, b: usize, c: usize, delta: usize) -> Result<f64> {
    if seq.dim() != 1 {
        return Err(Cp3oError::UnivariateOnly { dim: seq.dim() });
    }
    if delta == 0 {
        return Err(Cp3oError::config("delta must be at least 1"));
    }
    if a == 0 || c > seq.len() + 1 {
        return Err(Cp3oError::OutOfBounds(format!(
            "a={a}, c={c} outside series of length {}",
            seq.len()
        )));
    }
    if !(a < b && b < c) {
        return Err(Cp3oError::EmptyIndexSet(format!(
            "empty window for a={a}, b={b}, c={c}"
        )));
    }
    let (left, right) = window_bounds(a, b, c, delta);
    ks_divergence(seq.segment(left.0, left.1), seq.segment(right.0, right.1))
}

fn window_bounds(a: usize, b: usize, c: usize, delta: usize) -> ((usize, usize), (usize, usize)) {
    (
        (b.saturating_sub(delta).max(a), b - 1),
        (b, (c - 1).min(b + delta - 1)),
    )
}

/// Full-segment KS evaluator for the dynamic program.
///
/// Holds the global value order of the series; the pooled order of any
/// `Z_a..Z_{c-1}` is then a filter of it, and one filtered list serves every
/// split `b` sharing the same `(a, c)`.
pub struct PreparedKs<'a> {
    seq: &'a TimeSeries,
    /// 1-based indices sorted by value.
    order: Vec<u32>,
}

/// Indices of one `Z_a..Z_{c-1}` range in value order, with tie-group ends.
struct PooledRange {
    indices: Vec<u32>,
    /// `None` when all values are distinct.
    group_end: Option<Vec<bool>>,
}

impl<'a> PreparedKs<'a> {
    pub fn new(seq: &'a TimeSeries) -> Self {
        let values = seq.as_slice();
        let mut order: Vec<u32> = (1..=seq.len() as u32).collect();
        order.sort_by(|&i, &j| values[i as usize - 1].total_cmp(&values[j as usize - 1]));
        Self { seq, order }
    }

    pub fn series_len(&self) -> usize {
        self.seq.len()
    }

    fn pooled(&self, a: usize, c: usize) -> PooledRange {
        let values = self.seq.as_slice();
        let (lo, hi) = (a as u32, c as u32);
        let indices: Vec<u32> = self
            .order
            .iter()
            .copied()
            .filter(|&i| i >= lo && i < hi)
            .collect();
        let value = |p: usize| values[indices[p] as usize - 1];
        let has_ties = (1..indices.len()).any(|p| value(p) == value(p - 1));
        let group_end = has_ties.then(|| {
            (0..indices.len())
                .map(|p| p + 1 == indices.len() || value(p + 1) != value(p))
                .collect()
        });
        PooledRange { indices, group_end }
    }

    fn split_count(range: &PooledRange, b: usize, n: usize, m: usize) -> u64 {
        let b = b as u32;
        let (step_x, step_y) = (m as i64, n as i64);
        let (mut d, mut hi, mut lo) = (0i64, 0i64, 0i64);
        match &range.group_end {
            None => {
                for &idx in &range.indices {
                    d += if idx < b { step_x } else { -step_y };
                    hi = hi.max(d);
                    lo = lo.min(d);
                }
            }
            Some(ends) => {
                for (&idx, &end) in range.indices.iter().zip(ends) {
                    d += if idx < b { step_x } else { -step_y };
                    if end {
                        hi = hi.max(d);
                        lo = lo.min(d);
                    }
                }
            }
        }
        hi.max(-lo) as u64
    }

    fn eval_on(range: &PooledRange, a: usize, b: usize, c: usize) -> f64 {
        let (n, m) = (b - a, c - b);
        balance_scale(n, m) * stat_from_count(Self::split_count(range, b, n, m), n, m)
    }

    pub fn gof(&self, a: usize, b: usize, c: usize) -> f64 {
        Self::eval_on(&self.pooled(a, c), a, b, c)
    }

    pub fn gof_batch(&self, c: usize, splits: &[(usize, usize)], out: &mut Vec<f64>) {
        out.clear();
        out.resize(splits.len(), 0.0);
        let mut order: Vec<usize> = (0..splits.len()).collect();
        order.sort_by_key(|&k| splits[k]);
        for group in order.chunk_by(|&p, &q| splits[p].0 == splits[q].0) {
            let a = splits[group[0]].0;
            let range = self.pooled(a, c);
            let first = splits[group[0]].1;
            let last = splits[group[group.len() - 1]].1;
            // Moving one observation costs far less than a scalar evaluation.
            if 16 * group.len() > last - first && c - a <= SWEEP_MAX_LEN {
                self.sweep(&range, a, c, group.iter().map(|&k| (k, splits[k].1)), out);
            } else {
                for &k in group {
                    out[k] = Self::eval_on(&range, a, splits[k].1, c);
                }
            }
        }
    }

    /// Evaluates increasing splits `b` over one pooled range by moving one
    /// observation at a time from the right sample to the left.
    ///
    /// `counts[j]` is the number of left-sample values in tie classes `0..=j`
    /// and `cumulative[j]` the number of pooled values in those classes, so
    /// `(n + m) * counts[j] - n * cumulative[j]` is the same integer the
    /// scalar walk produces at the end of class `j`.
    fn sweep(
        &self,
        range: &PooledRange,
        a: usize,
        c: usize,
        splits: impl Iterator<Item = (usize, usize)>,
        out: &mut [f64],
    ) {
        let total = c - a;
        let mut class_of = vec![0u32; total];
        let mut cumulative: Vec<i32> = Vec::with_capacity(total);
        for (p, &idx) in range.indices.iter().enumerate() {
            class_of[idx as usize - a] = cumulative.len() as u32;
            let end = range.group_end.as_ref().is_none_or(|ends| ends[p]);
            if end {
                cumulative.push(p as i32 + 1);
            }
        }
        let mut counts = vec![0i32; cumulative.len()];
        let mut splits = splits.peekable();
        let mut moved = splits.peek().map_or(a, |&(_, b)| b);
        for &class in &class_of[..moved - a] {
            counts[class as usize] += 1;
        }
        for j in 1..counts.len() {
            counts[j] += counts[j - 1];
        }
        for (slot, b) in splits {
            while moved < b {
                let class = class_of[moved - a] as usize;
                for v in &mut counts[class..] {
                    *v = v.wrapping_add(1);
                }
                moved += 1;
            }
            let (n, m) = (b - a, c - b);
            let (hi, lo) = extremes(&counts, &cumulative, total as i32, n as i32);
            let max_count = hi.max(-lo) as u64;
            out[slot] = balance_scale(n, m) * stat_from_count(max_count, n, m);
        }
    }
}

/// Longest range the `i32` sweep handles without overflow (`len^2 < 2^31`).
const SWEEP_MAX_LEN: usize = 46_000;

/// Max and min over `j` of `scale * counts[j] - left * cumulative[j]`, both
/// clamped at zero. Callers keep every term inside `i32`, so the wrapping
/// operations never wrap; they only let the loop vectorise.
fn extremes(counts: &[i32], cumulative: &[i32], scale: i32, left: i32) -> (i32, i32) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: AVX2 support was just detected.
        return unsafe { extremes_avx2(counts, cumulative, scale, left) };
    }
    extremes_body(counts, cumulative, scale, left)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn extremes_avx2(counts: &[i32], cumulative: &[i32], scale: i32, left: i32) -> (i32, i32) {
    extremes_body(counts, cumulative, scale, left)
}

#[inline(always)]
fn extremes_body(counts: &[i32], cumulative: &[i32], scale: i32, left: i32) -> (i32, i32) {
    let (mut hi, mut lo) = (0i32, 0i32);
    for (&k, &cum) in counts.iter().zip(cumulative) {
        let d = scale.wrapping_mul(k).wrapping_sub(left.wrapping_mul(cum));
        hi = hi.max(d);
        lo = lo.min(d);
    }
    (hi, lo)
}

/// Windowed KS evaluator; full windows depend only on the split and are cached.
pub struct PreparedKsWindowed<'a> {
    seq: &'a TimeSeries,
    delta: usize,
    by_split: Vec<f64>,
}

impl<'a> PreparedKsWindowed<'a> {
    pub fn new(seq: &'a TimeSeries, delta: usize) -> Self {
        let len = seq.len();
        let mut by_split = vec![0.0; len + 2];
        for b in delta + 1..=(len + 1).saturating_sub(delta) {
            by_split[b] = windowed_unchecked(seq, b - delta, b, b + delta, delta);
        }
        Self {
            seq,
            delta,
            by_split,
        }
    }

    pub fn series_len(&self) -> usize {
        self.seq.len()
    }

    pub fn gof(&self, a: usize, b: usize, c: usize) -> f64 {
        if b - a >= self.delta && c - b >= self.delta {
            self.by_split[b]
        } else {
            windowed_unchecked(self.seq, a, b, c, self.delta)
        }
    }
}

fn windowed_unchecked(seq: &TimeSeries, a: usize, b: usize, c: usize, delta: usize) -> f64 {
    let (left, right) = window_bounds(a, b, c, delta);
    let x = seq.segment(left.0, left.1).flat();
    let y = seq.segment(right.0, right.1).flat();
    balance_scale(x.len(), y.len())
        * stat_from_count(max_count_sorted(&sorted(x), &sorted(y)), x.len(), y.len())
}
