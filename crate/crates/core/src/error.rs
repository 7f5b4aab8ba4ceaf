use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A point (or field value) outside the admissible cone.
    #[error("inadmissible: {0}")]
    Inadmissible(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("no sample found in band: {0}")]
    EmptyBand(String),
    #[error("level not attained: {0}")]
    Range(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("lemma violation: {0}")]
    LemmaViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("stencil error: {0}")]
    Stencil(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("newton stalled: {0}")]
    Stall(String),
    #[error("iterate left the cone: {0}")]
    ConeExit(String),
    #[error("gauge error: {0}")]
    Gauge(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error reports a violated lemma conclusion rather than a
    /// failure of the computation itself.
    pub fn is_finding(&self) -> bool {
        matches!(self, Error::LemmaViolation(_))
    }

    /// Process exit status: 2 findings, 4 configuration or I/O, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LemmaViolation(_) => 2,
            Error::Config(_) | Error::Io(_) => 4,
            _ => 3,
        }
    }
}
