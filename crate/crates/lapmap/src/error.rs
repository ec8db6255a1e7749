use thiserror::Error;

/// Errors for every operation in the crate. Variant names match the failure
/// cases they report so that callers (and the CLI) can name them directly.
#[derive(Debug, Error)]
pub enum Error {
    #[error("NonSymmetric: matrix asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NonSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("NonFinite: input contains NaN or infinite entries")]
    NonFinite,

    #[error("NotPositiveDefinite: factorization of the constraint matrix failed even after ridge regularization")]
    NotPositiveDefinite,

    #[error("NotEnoughTrivialPairs: requested {requested} near-zero eigenpairs but only {available} available")]
    NotEnoughTrivialPairs { requested: usize, available: usize },

    #[error("ConvergenceFailure: eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),

    #[error("InvalidSigma: sigma squared must be positive, got {0}")]
    InvalidSigma(f64),

    #[error("IsolatedVertex: vertex {0} has zero degree")]
    IsolatedVertex(usize),

    #[error("EmptySide: a cut requires both sides of the partition to be nonempty")]
    EmptySide,

    #[error("DisconnectedGraph: {0} near-zero eigenvalues found; cluster or embed each component separately")]
    DisconnectedGraph(usize),

    #[error("TooManyClusters: requested {requested} clusters for {samples} samples")]
    TooManyClusters { requested: usize, samples: usize },

    #[error("DegenerateVector: all entries have the same sign, no two-way split exists")]
    DegenerateVector,

    #[error("TooManyDimensions: requested {requested} dimensions but at most {available} are available")]
    TooManyDimensions { requested: usize, available: usize },

    #[error("DimensionMismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("ZeroExpectation: test point {0} has zero similarity to every training point")]
    ZeroExpectation(usize),

    #[error("NearZeroEigenvalue: kernel eigenvalue {value:e} at dimension {index} is below 1e-12")]
    NearZeroEigenvalue { index: usize, value: f64 },

    #[error("NonOrthonormal: projection directions are not orthonormal (deviation {0:e})")]
    NonOrthonormal(f64),

    #[error("NotPSD: kernel matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPSD(f64),

    #[error("MissingParameter: {0}")]
    MissingParameter(&'static str),

    #[error("LabelMismatch: {labels} labels for {samples} samples")]
    LabelMismatch { labels: usize, samples: usize },

    #[error("RowSumViolation: row {row} sums to {sum} instead of {expected}")]
    RowSumViolation { row: usize, sum: f64, expected: f64 },

    #[error("BadDistanceMatrix: {0}")]
    BadDistanceMatrix(String),

    #[error("IndexOutOfRange: index {index} out of range for {bound} elements")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("UnknownDataset: {0:?} (expected two_moons, blobs, swiss_roll, or s_curve)")]
    UnknownDataset(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("PersistenceFormat: {0}")]
    PersistenceFormat(String),

    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
