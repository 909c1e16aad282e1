use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("unknown group family `{0}`")]
    UnknownFamily(String),
    #[error("group family `{0}` needs the `rototranslation` feature")]
    FeatureDisabled(String),
    #[error("node {node} out of range for a lattice with {len} nodes")]
    InvalidNode { node: usize, len: usize },
    #[error("field index {index} out of range, lattice has {k} generating fields")]
    FieldIndex { index: usize, k: usize },
    #[error("grid function does not live on this lattice")]
    LatticeMismatch,
    #[error("grid function has {got} values, lattice has {expected} nodes")]
    LengthMismatch { got: usize, expected: usize },
    #[error("grid function value at node {0} is not finite")]
    NonFinite(usize),
    #[error("dense decomposition is limited to {limit} nodes, lattice has {nodes}")]
    SizeLimit { nodes: usize, limit: usize },
    #[error("fourier symbol mode needs a euclidean lattice")]
    NonAbelian,
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("zero-mode obstruction: {0}")]
    ZeroMode(String),
    #[error("chebyshev approximation error {achieved:e} above tolerance {tol:e} at degree {degree}")]
    Chebyshev { tol: f64, achieved: f64, degree: usize },
    #[error("negative time t = {0}")]
    NegativeTime(f64),
    #[error("spectral argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("derivative order {requested} not available (max {available})")]
    DerivativeOrder { requested: usize, available: usize },
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
