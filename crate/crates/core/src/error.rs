use thiserror::Error;

pub type Result<T, E = OgjError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum OgjError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid weight function: {0}")]
    InvalidWeights(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("zero total mass")]
    ZeroMass,

    #[error("graph is not fully supported: vertex {0:?} has zero marginal")]
    NotFullySupported(String),

    #[error("vertex set mismatch: {0}")]
    VertexMismatch(String),

    #[error("scheme not applicable: {0}")]
    SchemeInapplicable(String),

    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("not a bijection: {0}")]
    NotBijective(String),

    #[error("map does not preserve weights: {0}")]
    NotWeightPreserving(String),

    #[error("not a factor map: {0}")]
    NotFactorMap(String),

    #[error("invalid joining: {0}")]
    InvalidJoining(String),

    #[error("support condition violated: {0}")]
    SupportViolation(String),

    #[error("not a coupling: {0}")]
    NotCoupling(String),

    #[error("joining is not deterministic: {0}")]
    NotDeterministic(String),

    #[error("cost is not a metric: {0}")]
    NotAMetric(String),

    #[error("invalid gluing specification: {0}")]
    InvalidGluing(String),

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("unknown sweep {0:?}")]
    UnknownSweep(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
