//! Nonparametric multiple change point detection by a pruned dynamic
//! program over a goodness-of-fit objective.
//!
//! A `kappa`-segmentation is scored by summing a two-sample divergence
//! between every pair of adjacent segments. [`search::run_cp3o`] approximates
//! the best score for every `kappa` up to a bound, discarding candidate
//! change points that are dominated by the latest admissible one, and then
//! picks the number of changes at the knee of the score curve. No penalty
//! parameter is involved.
//!
//! Two divergences are provided: the energy statistic (any dimension, with a
//! windowed incomplete variant for speed) and the Kolmogorov-Smirnov
//! statistic (univariate).
//!
//! ```
//! use cp3o::{run_cp3o, Cp3oConfig, GofMetric, TimeSeries};
//!
//! let mut values = vec![0.0; 40];
//! values.extend(vec![5.0; 40]);
//! let series = TimeSeries::from_values(values).unwrap();
//! let result = run_cp3o(&series, &Cp3oConfig::new(3, 10, GofMetric::energy(1.0))).unwrap();
//! assert_eq!(result.segmentations[0].change_points(), &[41]);
//! ```

pub mod divergence;
pub mod error;
pub mod eval;
pub mod model;
pub mod search;

pub use divergence::{gof_eval, GofMetric, MetricKind, SegmentGof};
pub use error::{Cp3oError, Result};
pub use model::{
    validate_config, Cp3oConfig, DetectionResult, PruneStats, Segmentation, TimeSeries,
};
pub use search::run_cp3o;
