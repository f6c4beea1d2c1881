use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty labeling")]
    EmptyLabeling,
    #[error("labelings differ in n: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least two objects")]
    TooFewObjects,
    #[error("marginal counts sum to zero")]
    ZeroTotal,
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("inconsistent marginals: rows sum to {rows}, columns sum to {cols}")]
    InconsistentMarginals { rows: u64, cols: u64 },
    #[error("exact Omega infeasible for n={n}, {rows}x{cols} table")]
    ExactOmegaInfeasible { n: u64, rows: usize, cols: usize },
    #[error("numeric overflow in {0}")]
    NumericOverflow(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot split beyond singletons: requested {requested} clusters for {n} objects")]
    CannotSplitBeyondSingletons { requested: usize, n: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(
        "leading eigenvector vanishes at node {node}; the graph is disconnected, \
         restrict the analysis to its largest connected component"
    )]
    DisconnectedGraph { node: usize },
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
