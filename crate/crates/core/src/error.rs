use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("stub count p*k is odd (p = {p}, k = {k})")]
    OddStubCount { p: usize, k: usize },

    #[error("no simple {k}-regular graph on {p} vertices found after {restarts} restarts")]
    GraphSampling { p: usize, k: usize, restarts: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("symmetric eigensolver did not converge")]
    EigenConvergence,

    #[error("matrix is not positive semi-definite (eigenvalue {0:e})")]
    NotPositiveSemiDefinite(f64),

    #[error("tied eigenvalues at index {0}")]
    TiedEigenvalues(usize),

    #[error("eigenvalues are not in ascending order at index {0}")]
    NotAscending(usize),

    #[error("sample count n = {n} is below the dimension p = {p}")]
    TooFewSamples { n: u64, p: usize },

    #[error("vector is not unit norm (norm = {0})")]
    NotUnitNorm(f64),

    #[error("eigengap must be positive (got {0})")]
    NonPositiveGap(f64),

    #[error("no positive root: s_plus = {s_plus} does not exceed s0(h) = {s0}")]
    NoPositiveRoot { s_plus: f64, s0: f64 },

    #[error("quadrature did not converge (estimate {value:e}, error {error:e})")]
    Quadrature { value: f64, error: f64 },

    #[error("eigenvalue pool is empty")]
    EmptyPool,

    #[error("h grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
