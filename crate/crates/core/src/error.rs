use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("row {row} sums to zero")]
    ZeroRow { row: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("matrix has zero grand total")]
    ZeroMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("rank {k} outside 1..={max}")]
    RankOutOfRange { k: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("row {row} sums to {sum}, expected 1")]
    NotComposition { row: usize, sum: f64 },

    #[error("entries sum to {sum}, expected 1")]
    NotJointProbability { sum: f64 },

    #[error("column {col} of the profile matrix sums to {sum}, expected 1")]
    NotColumnStochastic { col: usize, sum: f64 },

    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    #[error("latent class {class} has zero mass")]
    ZeroClassMass { class: usize },

    #[error("basis row {row} sums to zero")]
    ZeroRowBasis { row: usize },

    #[error("row {row} of the reconstructed product sums to zero")]
    ZeroRowProduct { row: usize },

    #[error("transformation is infeasible: {0}")]
    InfeasibleTransform(String),

    #[error("matrix is singular")]
    Singular,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("selection exhausted the residual after {picked} of {k} rows")]
    RankDeficientSelection { picked: usize, k: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("operation not available for K = {k}")]
    UnsupportedK { k: usize },

    #[error("column {col} has zero mass")]
    ZeroColumn { col: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line} has {found} fields, expected {expected}")]
    RaggedRow {
        line: usize,
        found: usize,
        expected: usize,
    },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroRow { .. } => "ZeroRow",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::ZeroMatrix => "ZeroMatrix",
            Error::NonFinite { .. } => "NonFinite",
            Error::RankOutOfRange { .. } => "RankOutOfRange",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotComposition { .. } => "NotComposition",
            Error::NotJointProbability { .. } => "NotJointProbability",
            Error::NotColumnStochastic { .. } => "NotColumnStochastic",
            Error::DegenerateBasis(_) => "DegenerateBasis",
            Error::ZeroClassMass { .. } => "ZeroClassMass",
            Error::ZeroRowBasis { .. } => "ZeroRowBasis",
            Error::ZeroRowProduct { .. } => "ZeroRowProduct",
            Error::InfeasibleTransform(_) => "InfeasibleTransform",
            Error::Singular => "Singular",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::RankDeficientSelection { .. } => "RankDeficientSelection",
            Error::DegenerateFit(_) => "DegenerateFit",
            Error::UnsupportedK { .. } => "UnsupportedK",
            Error::ZeroColumn { .. } => "ZeroColumn",
            Error::Parse { .. } => "ParseError",
            Error::RaggedRow { .. } => "RaggedRow",
            Error::UnknownDataset(_) => "UnknownDataset",
            Error::Io(_) => "Io",
        }
    }
}
