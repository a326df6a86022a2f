use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph failed validation: {0}")]
    InvalidGraph(String),

    #[error("group too large or infinite: more than {0} elements")]
    GroupTooLarge(usize),

    #[error("graph too large for search: {vertices} vertices exceeds cap {cap}")]
    GraphTooLarge { vertices: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("party {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },

    #[error("contraction plan needs {needed} entries, cap is {cap}")]
    PlanTooLarge { needed: usize, cap: usize },

    #[error("invariant is not real: {re} + {im}i")]
    NonRealInvariant { re: f64, im: f64 },

    #[error("value {0} outside the admissible range")]
    OutOfRange(f64),

    #[error("certificate does not match graph: {0}")]
    CertificateMismatch(String),

    #[error("missing vertex certificate for a factor with {0} vertices")]
    MissingVertexCertificate(usize),

    #[error("singular matrix for party {0}")]
    SingularMatrix(usize),

    #[error("state annihilated (squared norm {0:e})")]
    Annihilated(f64),

    #[error("target state is unentangled per this monotone")]
    TargetUnentangled,

    #[error("ratio is indeterminate: both monotone values vanish")]
    Indeterminate,

    #[error("numeric invariant violated: {0}")]
    InvariantViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
