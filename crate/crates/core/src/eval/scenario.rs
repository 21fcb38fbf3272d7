//! Seeded generators for the three univariate simulation scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Exp, Normal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Cp3oError, Result};
use crate::model::{Segmentation, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Gaussian segments with `mu ~ U(-10, 10)`, `sigma^2 ~ U(0, 5)`.
    GaussianMeanVar,
    /// Exponential (mean 3), N(3, 1), N(0, 1), Student t with 2.01 df.
    DistMeanTail,
    /// Student t with 0.1 df, t with 1.9 df, Cauchy(-2, 1), Cauchy(0, 1).
    HeavyTail,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::GaussianMeanVar => "gaussian",
            Self::DistMeanTail => "dist-mean-tail",
            Self::HeavyTail => "heavytail",
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Cp3oError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::GaussianMeanVar),
            "dist-mean-tail" | "distmeantail" => Ok(Self::DistMeanTail),
            "heavytail" | "heavy-tail" => Ok(Self::HeavyTail),
            other => Err(Cp3oError::config(format!(
                "unknown scenario '{other}'; expected gaussian, dist-mean-tail or heavytail"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub len: usize,
    /// Number of true change points, evenly spaced.
    pub changes: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, len: usize, seed: u64) -> Self {
        Self {
            kind,
            len,
            changes: 3,
            seed,
        }
    }

    /// `floor(i T / (k + 1)) + 1` for `i = 1..=k`.
    pub fn true_change_points(&self) -> Vec<usize> {
        let k = self.changes;
        (1..=k).map(|i| i * self.len / (k + 1) + 1).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.changes == 0 {
            return Err(Cp3oError::config(
                "scenario needs at least one change point",
            ));
        }
        if matches!(
            self.kind,
            ScenarioKind::DistMeanTail | ScenarioKind::HeavyTail
        ) && self.changes != 3
        {
            return Err(Cp3oError::config(format!(
                "scenario {} has exactly 3 change points, got {}",
                self.kind.name(),
                self.changes
            )));
        }
        if self.len < 2 * (self.changes + 1) {
            return Err(Cp3oError::config(format!(
                "length {} too short for {} segments of at least 2 points",
                self.len,
                self.changes + 1
            )));
        }
        Ok(())
    }
}

enum Law {
    Normal(Normal<f64>),
    Exp(Exp<f64>),
    StudentT(StudentT<f64>),
    Cauchy(Cauchy<f64>),
}

impl Law {
    /// Redraws the (vanishingly rare) non-finite heavy-tail draws.
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        loop {
            let v = match self {
                Self::Normal(d) => d.sample(rng),
                Self::Exp(d) => d.sample(rng),
                Self::StudentT(d) => d.sample(rng),
                Self::Cauchy(d) => d.sample(rng),
            };
            if v.is_finite() {
                return v;
            }
        }
    }
}

const MIN_VARIANCE: f64 = 1e-3;

fn gaussian_laws(count: usize, rng: &mut ChaCha8Rng) -> Vec<Law> {
    let mut params: Vec<(f64, f64)> = Vec::with_capacity(count);
    while params.len() < count {
        let mu = rng.gen_range(-10.0..10.0);
        let var = rng.gen_range(0.0..5.0_f64).max(MIN_VARIANCE);
        // Adjacent segments must actually differ.
        if let Some(&(pm, pv)) = params.last() {
            if (mu - pm).abs() < 0.5 && (var - pv).abs() < 0.25 {
                continue;
            }
        }
        params.push((mu, var));
    }
    params
        .into_iter()
        .map(|(mu, var)| Law::Normal(Normal::new(mu, var.sqrt()).expect("positive sd")))
        .collect()
}

/// Draws a series and its ground-truth segmentation. The same spec always
/// produces the same series.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<(TimeSeries, Segmentation)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let segments = spec.changes + 1;
    let laws = match spec.kind {
        ScenarioKind::GaussianMeanVar => gaussian_laws(segments, &mut rng),
        ScenarioKind::DistMeanTail => vec![
            Law::Exp(Exp::new(1.0 / 3.0).expect("rate")),
            Law::Normal(Normal::new(3.0, 1.0).expect("sd")),
            Law::Normal(Normal::new(0.0, 1.0).expect("sd")),
            Law::StudentT(StudentT::new(2.01).expect("df")),
        ],
        ScenarioKind::HeavyTail => vec![
            Law::StudentT(StudentT::new(0.1).expect("df")),
            Law::StudentT(StudentT::new(1.9).expect("df")),
            Law::Cauchy(Cauchy::new(-2.0, 1.0).expect("scale")),
            Law::Cauchy(Cauchy::new(0.0, 1.0).expect("scale")),
        ],
    };
    let truth = Segmentation::new(spec.true_change_points(), spec.len)?;
    let bounds = truth.boundaries();
    let mut values = Vec::with_capacity(spec.len);
    for (law, pair) in laws.iter().zip(bounds.windows(2)) {
        for _ in pair[0]..pair[1] {
            values.push(law.sample(&mut rng));
        }
    }
    Ok((TimeSeries::from_values(values)?, truth))
}
