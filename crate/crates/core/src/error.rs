use thiserror::Error;

pub type Result<T, E = Cp3oError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Cp3oError {
    #[error("series too short for one change: length {len} < 2 * min_size ({min_size})")]
    SeriesTooShort { len: usize, min_size: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("KS metric is univariate; use energy metric for d>1 (got d={dim})")]
    UnivariateOnly { dim: usize },

    #[error("empty index set: {0}")]
    EmptyIndexSet(String),

    #[error("index out of bounds: {0}")]
    OutOfBounds(String),

    #[error("no valid {kappa}-segmentation of the first {t} observations")]
    NoSegmentation { kappa: usize, t: usize },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),
}

impl Cp3oError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Self::InvalidConfig(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }

    /// True for errors caused by the configuration rather than the data.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Self::SeriesTooShort { .. }
                | Self::InvalidConfig(_)
                | Self::UnivariateOnly { .. }
                | Self::InstanceTooLarge(_)
        )
    }
}
