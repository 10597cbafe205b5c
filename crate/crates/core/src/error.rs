use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("self-loop on vertex {0}")]
    SelfLoop(u64),
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("graph needs at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    EigenNoConvergence(usize),
    #[error("matrix order {order} exceeds cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("norm estimate failed: {0}")]
    NormEstimate(String),
    #[error("eigenvalues of the symmetrized coefficient matrix lie below the certified window: {value:.6e} < {lower:.6e}")]
    SpectrumWindow { value: f64, lower: f64 },
    #[error("required order {needed} exceeds cap {cap}")]
    DegreeCap { needed: usize, cap: usize },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("no sweep prefix has volume inside the window")]
    EmptyWindow,
    #[error("degenerate embedding: {0}")]
    Degenerate(String),
    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::Iteration { iteration, source: Box::new(self) }
    }
}
