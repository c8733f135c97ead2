use thiserror::Error;

/// Everything that can go wrong inside the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chart evaluation failed at {point:?}: {reason}")]
    ChartEvaluation { point: Vec<f64>, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("validation failed: {0}")]
    Validation(String),

    /// The requested logarithm branch passes through an eigenvalue.
    #[error("branch point: {lambda_arg} is within {distance:e} of the spectrum")]
    BranchPoint { lambda_arg: f64, distance: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("path too coarse: eigenvalue moved {step:.3} > 1/4 between samples {index} and {next}", next = index + 1)]
    Resolution { index: usize, step: f64 },

    #[error("could not sample a point of overlap {indices:?} after {attempts} proposals")]
    Sampler {
        indices: Vec<usize>,
        attempts: usize,
    },

    /// A value fed to the principal logarithm sits too close to the cut at -1.
    #[error("value {value} is within {tolerance:e} of the logarithm cut")]
    BranchCut { value: String, tolerance: f64 },

    #[error("implementability failure: {0}")]
    Implementability(String),

    #[error("dimension {requested} exceeds cap {cap}")]
    DimensionCap { requested: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
