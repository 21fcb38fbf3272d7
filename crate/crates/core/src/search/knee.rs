//! Picks the number of change points at the kink of the goodness-of-fit curve.

#[derive(Debug, Clone, PartialEq)]
pub struct KneeSelection {
    /// Selected `kappa*` (1-based).
    pub kappa: usize,
    /// Total squared error of the two-piece fit for each knee `c = 2..=K-1`.
    pub sse: Vec<f64>,
    /// Curve too short for a two-piece fit; `kappa` is simply `K`.
    pub fallback: bool,
}

/// Least-squares line through `(x, ys[x - first])`, returning the residual sum of squares.
fn line_sse(first: usize, ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let xs = (0..ys.len()).map(|i| (first + i) as f64);
    let mean_x = xs.clone().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, &y) in xs.clone().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    xs.zip(ys)
        .map(|(x, &y)| {
            let r = y - mean_y - slope * (x - mean_x);
            r * r
        })
        .sum()
}

/// Fits two least-squares lines to `(kappa, G(kappa))`, one over `1..=c` and
/// one over `c..=K` (the knee is shared), and returns the `c` with the
/// smallest total error. Ties go to the smaller `c`.
pub fn select_num_changes(curve: &[f64]) -> KneeSelection {
    let k = curve.len();
    if k < 3 {
        return KneeSelection {
            kappa: k.max(1),
            sse: Vec::new(),
            fallback: true,
        };
    }
    let sse: Vec<f64> = (2..k)
        .map(|c| line_sse(1, &curve[..c]) + line_sse(c, &curve[c - 1..]))
        .collect();
    // Errors this close to each other are rounding noise, not a better fit.
    let scale: f64 = curve.iter().map(|y| y * y).sum();
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let mut best = 0;
    for (i, &e) in sse.iter().enumerate() {
        if e < sse[best] - tol {
            best = i;
        }
    }
    KneeSelection {
        kappa: best + 2,
        sse,
        fallback: false,
    }
}
