use crate::interval::IntervalError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("order too low: {0}")]
    OrderTooLow(String),
    #[error("rough enclosure failed after {attempts} attempts (last candidate [{y_lo}, {y_hi}])")]
    EnclosureFailure { attempts: usize, y_lo: f64, y_hi: f64 },
    #[error("eps [{0}, {1}] is not inside [0, h]")]
    EpsilonOutOfRange(f64, f64),
    #[error("transversality not verified: lower bound {0}")]
    TransversalityFailure(f64),
    #[error("no bracketed crossing: {0}")]
    NoCrossing(String),
    #[error("return after {q} steps is earlier than (n+1)τ = {min_steps} steps")]
    RegularityGateViolated { q: usize, min_steps: usize },
    #[error("inclusion failed: worst coordinate {index} (margin {margin:e})")]
    InclusionFailed { index: usize, margin: f64 },
    #[error("newton did not converge: {0}")]
    NoConvergence(String),
    #[error("singular jacobian: {0}")]
    SingularJacobian(String),
    #[error("eigen solver failed: {0}")]
    EigSolverFailure(String),
    #[error("no eigenvalue within 0.2 of 1 (closest {0})")]
    Eigenvalue1Missing(f64),
    #[error("degenerate section normal")]
    DegenerateNormal,
    #[error("no invariant set after {0} iterations")]
    NoInvariance(usize),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
