//! Segmentation quality metrics, simulation scenarios and the seeded
//! benchmark harness.

mod benchmark;
mod metrics;
mod scenario;

pub use benchmark::{run_benchmark, run_trial, trial_seed, BenchmarkSummary, TrialReport};
pub use metrics::{adjusted_rand, e2t, t2e};
pub use scenario::{generate_scenario, ScenarioKind, ScenarioSpec};
