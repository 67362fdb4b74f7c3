use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix has no entries")]
    Empty,
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("generator indices must satisfy 1 <= j < k <= n, got n={n}, j={j}, k={k}")]
    GeneratorIndex { n: usize, j: usize, k: usize },
    #[error("matrix is not skew-Hermitian")]
    NotSkewHermitian,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("operation requires n >= {min}, got n={n}")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("y={y} outside [1, {max}]")]
    YOutOfRange { y: f64, max: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("operation requires n >= {min}, got n={n}")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("decomposition has {got} {what}, expected {expected}")]
    Length {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("|v_{index}| = {modulus}, expected 1/sqrt(n) = {expected}")]
    VectorModulus {
        index: usize,
        modulus: f64,
        expected: f64,
    },
    #[error("phase sum is not congruent to alpha: |e^(i sum) - e^(i alpha)| = {mismatch:e}")]
    PhaseSum { mismatch: f64 },
    #[error("omega={omega} outside [0, {max}]")]
    OmegaOutOfRange { omega: f64, max: f64 },
    #[error("|z| = {modulus} exceeds 1")]
    OutsideUnitDisk { modulus: f64 },
    #[error("|z|^2 + |w|^2 = {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("matrix is not unitary within {tol:e}")]
    NotUnitary { tol: f64 },
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("operation requires n >= {min}, got n={n}")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("target point lies outside the region (margin {margin:e})")]
    OutsideRegion { margin: f64 },
    #[error("preimage solver did not converge: best residual {best_residual:e}")]
    NonConvergence { best_residual: f64 },
    #[error("invalid optimizer configuration: {0}")]
    BadConfig(&'static str),
}
