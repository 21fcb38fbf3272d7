use crate::error::{Cp3oError, Result};
use crate::model::Segmentation;

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Adjusted Rand index between two segmentations viewed as labelings of
/// `1..=len`. Equals 1 exactly when the segmentations coincide.
///
/// Computed from integer pair counts with a single final division.
pub fn adjusted_rand(a: &Segmentation, b: &Segmentation, len: usize) -> Result<f64> {
    if len < 2 {
        return Err(Cp3oError::input(
            "adjusted Rand index needs at least two observations",
        ));
    }
    if a.series_len() != len || b.series_len() != len {
        return Err(Cp3oError::input(format!(
            "segmentations cover {} and {} observations, expected {len}",
            a.series_len(),
            b.series_len()
        )));
    }
    let (la, lb) = (a.labels(), b.labels());
    let (ka, kb) = (a.num_changes() + 1, b.num_changes() + 1);
    let mut table = vec![0u64; ka * kb];
    for (&x, &y) in la.iter().zip(&lb) {
        table[x * kb + y] += 1;
    }
    let index: u64 = table.iter().map(|&c| pairs(c)).sum();
    let sum_a: u64 = (0..ka)
        .map(|i| pairs(table[i * kb..(i + 1) * kb].iter().sum()))
        .sum();
    let sum_b: u64 = (0..kb)
        .map(|j| pairs((0..ka).map(|i| table[i * kb + j]).sum()))
        .sum();
    Ok(ratio_from_pair_sums(index, sum_a, sum_b, pairs(len as u64)))
}

/// `(index - E) / (max - E)` with `E = sum_a * sum_b / total` and
/// `max = (sum_a + sum_b) / 2`, cleared of fractions.
fn ratio_from_pair_sums(index: u64, sum_a: u64, sum_b: u64, total: u64) -> f64 {
    let (index, sum_a, sum_b, total) = (index as i128, sum_a as i128, sum_b as i128, total as i128);
    let num = 2 * (total * index - sum_a * sum_b);
    let den = total * (sum_a + sum_b) - 2 * sum_a * sum_b;
    if den == 0 {
        // Only reachable when both labelings are all-one-segment or all-singletons.
        return 1.0;
    }
    num as f64 / den as f64
}

fn nearest(point: usize, targets: &[usize]) -> usize {
    targets
        .iter()
        .map(|&t| point.abs_diff(t))
        .min()
        .expect("non-empty targets")
}

fn mean_nearest(sources: &[usize], targets: &[usize]) -> f64 {
    sources
        .iter()
        .map(|&s| nearest(s, targets) as f64)
        .sum::<f64>()
        / sources.len() as f64
}

/// Mean distance from each true change point to the closest estimate;
/// `+inf` when there are no estimates, `0` when there are no true points.
pub fn t2e(true_cps: &[usize], est_cps: &[usize]) -> f64 {
    match (true_cps.is_empty(), est_cps.is_empty()) {
        (true, _) => 0.0,
        (false, true) => f64::INFINITY,
        _ => mean_nearest(true_cps, est_cps),
    }
}

/// Mean distance from each estimate to the closest true change point;
/// `0` when either side is empty (check [`Segmentation::num_changes`] to
/// tell an empty estimate apart from a perfect one).
pub fn e2t(true_cps: &[usize], est_cps: &[usize]) -> f64 {
    if est_cps.is_empty() || true_cps.is_empty() {
        0.0
    } else {
        mean_nearest(est_cps, true_cps)
    }
}
