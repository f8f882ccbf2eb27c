use std::path::PathBuf;

use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },

    #[error("dataset failed validation ({} violation(s)): {}", .0.len(), summarize(.0))]
    Validation(Vec<Violation>),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid tiers: {0}")]
    InvalidTiers(String),

    #[error("jurisdiction {jurisdiction:?} has a zero score in {category:?}; geometric aggregation is undefined")]
    GeometricZeroScore {
        jurisdiction: String,
        category: String,
    },

    #[error("jurisdiction {0:?} has no reported overall score")]
    MissingReportedOverall(String),

    #[error("jurisdiction {jurisdiction:?} has no score for category {category:?}")]
    MissingScore {
        jurisdiction: String,
        category: String,
    },

    #[error("unknown category {0:?}")]
    UnknownCategory(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("vectors must have equal length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("too few observations: need at least {needed}, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("constant vector: correlation undefined")]
    ConstantVector,

    #[error("column {0:?} is constant")]
    ConstantColumn(String),

    #[error("sample size {0} outside the supported range 3..=5000")]
    SampleSizeOutOfRange(usize),

    #[error("paired differences have zero variance")]
    DegenerateVariance,

    #[error("all paired differences are zero")]
    AllZeroDifferences,

    #[error("empty group")]
    EmptyGroup,

    #[error("only one group label present in dimension {0:?}")]
    SingleGroup(String),

    #[error("unknown tag dimension {0:?}")]
    UnknownDimension(String),

    #[error("category sets overlap on {0:?}")]
    OverlappingSets(String),

    #[error("invalid degrees of freedom: {0}")]
    InvalidDf(f64),

    #[error("perturbation produced a negative weight for {0:?}")]
    NegativeWeightProduced(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("nothing to plot")]
    EmptyData,
}

impl Error {
    /// Stable machine-readable name used by the CLI's `ERROR:<kind>:` prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FileNotFound(_) => "FileNotFound",
            Error::Io(_) => "Io",
            Error::Parse { .. } => "ParseError",
            Error::Validation(_) => "ValidationError",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::InvalidTiers(_) => "InvalidTiers",
            Error::GeometricZeroScore { .. } => "GeometricZeroScore",
            Error::MissingReportedOverall(_) => "MissingReportedOverall",
            Error::MissingScore { .. } => "MissingScore",
            Error::UnknownCategory(_) => "UnknownCategory",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::TooFewObservations { .. } => "TooFewObservations",
            Error::ConstantVector => "ConstantVector",
            Error::ConstantColumn(_) => "ConstantColumn",
            Error::SampleSizeOutOfRange(_) => "SampleSizeOutOfRange",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::AllZeroDifferences => "AllZeroDifferences",
            Error::EmptyGroup => "EmptyGroup",
            Error::SingleGroup(_) => "SingleGroup",
            Error::UnknownDimension(_) => "UnknownDimension",
            Error::OverlappingSets(_) => "OverlappingSets",
            Error::InvalidDf(_) => "InvalidDf",
            Error::NegativeWeightProduced(_) => "NegativeWeightProduced",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::EmptyData => "EmptyData",
        }
    }
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .take(3)
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
