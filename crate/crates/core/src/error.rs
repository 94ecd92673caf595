use thiserror::Error;

#[derive(Debug, Error)]
pub enum PricingError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("price {price} outside (0, {p_max})")]
    PriceOutOfRange { price: f64, p_max: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty action set")]
    EmptyActionSet,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("unknown environment preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("replication {replication} (seed {seed}) failed: {source}")]
    Replication {
        replication: usize,
        seed: u64,
        #[source]
        source: Box<PricingError>,
    },
    #[error("data error: {0}")]
    Data(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = PricingError> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(PricingError::NonFinite(what))
    }
}
