use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names are stable: the CLI prints them verbatim as the error kind.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: deviation {deviation:e} exceeds {allowed:e}")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("operator is not positive: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("eigensolver did not converge")]
    ConvergenceFailure,

    #[error("vector lies outside the range of the operator (residual {residual:e})")]
    VectorOutsideRange { residual: f64 },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("isometry shape {rows}x{cols} does not fit an operator of rank {rank}")]
    IsometryShapeMismatch { rows: usize, cols: usize, rank: usize },

    #[error("rows are not orthonormal (deviation {deviation:e})")]
    NotIsometry { deviation: f64 },

    #[error("p must satisfy 0 < p < 1 and p != 1/2, got {p}")]
    InvalidP { p: f64 },

    #[error("decomposition is invalid: {reason}")]
    InvalidDecomposition { reason: String },

    #[error("decompositions resolve different operators (gap {gap:e})")]
    DifferentTargets { gap: f64 },

    #[error("weights sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("weight {weight} is negative or not finite")]
    InvalidWeight { weight: f64 },

    #[error("measure has no atoms with positive weight")]
    EmptyMeasure,

    #[error("barycenters differ (gap {gap:e})")]
    BarycentersDiffer { gap: f64 },

    #[error("coin types are identical; repeated tosses carry no information (prior accuracy {prior_accuracy})")]
    DegenerateCoins { prior_accuracy: f64 },

    #[error("single-toss head probabilities differ: {first} vs {second}")]
    BarycenterMismatch { first: f64, second: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("energy {energy} outside the open interval ({min}, {max})")]
    EnergyOutOfRange { energy: f64, min: f64, max: f64 },

    #[error("Hamiltonian is proportional to the identity")]
    DegenerateHamiltonian,

    #[error("inverse temperature could not be bracketed for energy {energy}")]
    BetaNotBracketed { energy: f64 },

    #[error("integration step rejected at t = {time}: positivity lost after repeated halving")]
    StepRejected { time: f64 },

    #[error("{0}")]
    ParseError(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Variant name, used as the error kind in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::EmptyMatrix => "EmptyMatrix",
            Error::NonFinite { .. } => "NonFinite",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPositive { .. } => "NotPositive",
            Error::TraceNotOne { .. } => "TraceNotOne",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ConvergenceFailure => "ConvergenceFailure",
            Error::VectorOutsideRange { .. } => "VectorOutsideRange",
            Error::ZeroVector => "ZeroVector",
            Error::IsometryShapeMismatch { .. } => "IsometryShapeMismatch",
            Error::NotIsometry { .. } => "NotIsometry",
            Error::InvalidP { .. } => "InvalidP",
            Error::InvalidDecomposition { .. } => "InvalidDecomposition",
            Error::DifferentTargets { .. } => "DifferentTargets",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::InvalidWeight { .. } => "InvalidWeight",
            Error::EmptyMeasure => "EmptyMeasure",
            Error::BarycentersDiffer { .. } => "BarycentersDiffer",
            Error::DegenerateCoins { .. } => "DegenerateCoins",
            Error::BarycenterMismatch { .. } => "BarycenterMismatch",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::EnergyOutOfRange { .. } => "EnergyOutOfRange",
            Error::DegenerateHamiltonian => "DegenerateHamiltonian",
            Error::BetaNotBracketed { .. } => "BetaNotBracketed",
            Error::StepRejected { .. } => "StepRejected",
            Error::ParseError(_) => "ParseError",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
