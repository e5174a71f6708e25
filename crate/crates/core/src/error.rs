use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("message index {index} out of range for {n} messages")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// The exact solver refuses instances above its configured size bound.
    #[error("exact solver supports at most {bound} messages, problem has {n}")]
    CapabilityExceeded { n: usize, bound: usize },

    #[error("grouping failed: {0}")]
    Grouping(String),

    #[error("group minimum gains must satisfy near > intermediate > far, got ({near}, {intermediate}, {far})")]
    GainOrdering {
        near: f64,
        intermediate: f64,
        far: f64,
    },

    #[error("invalid power profile: {0}")]
    Profile(String),

    #[error("equal-rate root not bracketed in (0, {p_ic}]")]
    RootNotBracketed { p_ic: f64 },

    #[error("transmission plan is empty")]
    EmptyPlan,

    #[error("scenario {field}: {message}")]
    Scenario { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn scenario(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Whether the error reflects a solver capability limit rather than bad
    /// input.
    pub fn is_capability(&self) -> bool {
        matches!(self, Error::CapabilityExceeded { .. })
    }
}
