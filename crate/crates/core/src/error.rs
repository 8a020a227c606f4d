use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse: {0}")]
    Parse(String),

    #[error("model: {0}")]
    InvalidModel(String),

    #[error("model: objects belong to different models ({0})")]
    MismatchedModel(String),

    #[error("exterior: {0}")]
    Exterior(String),

    #[error("distribution: flag did not stabilize within {max_step} steps (growth so far {growth:?})")]
    NotStabilized { max_step: usize, growth: Vec<usize> },

    #[error("distribution: {0}")]
    NotEquiregular(String),

    #[error("distribution: frame is singular at the requested point")]
    SingularFrame,

    #[error("selector: no adapted frame: {0}")]
    NoAdaptedFrame(String),

    #[error("selector: axiom ({axiom}) violated at level {level}: {detail}")]
    SelectorViolation { axiom: String, level: usize, detail: String },

    #[error("connection: postcondition failed: {0}")]
    PostconditionFailed(String),

    #[error("holonomy: numeric oracle unavailable: {0}")]
    OracleUnsupported(String),

    #[error("holonomy: integration step too coarse (discrepancy {discrepancy:e} exceeds {tolerance:e})")]
    StepTooCoarse { discrepancy: f64, tolerance: f64 },

    #[error("holonomy: {0}")]
    Holonomy(String),

    #[error("decide: normalization failed: {0}")]
    NormalizationFailed(String),

    #[error("decide: {0}")]
    Decide(String),

    #[error("liegroups: not a Carnot algebra: {0}")]
    NotCarnot(String),

    #[error("liegroups: {0}")]
    Lie(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
