//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Column-role schema problems: unknown roles, missing columns, duplicates.
    #[error("schema error: {0}")]
    Schema(String),

    /// Data fails a structural invariant (non-binary treatment, empty arm, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Design matrix is rank deficient; names the offending columns.
    #[error("rank deficiency: collinear columns {0:?}")]
    RankDeficient(Vec<String>),

    /// Complete or quasi-separation in a logistic fit.
    #[error("separation detected: {0}")]
    Separation(String),

    /// An iterative solver exhausted its iteration budget.
    #[error("failed to converge: {0}")]
    NonConvergence(String),

    /// Cross-validation could not produce a usable fold partition or fit.
    #[error("cross-validation error: {0}")]
    CrossValidation(String),

    /// A Monte Carlo estimand left the domain of the requested link.
    #[error("estimand outside link domain: {0}")]
    LinkDomain(String),

    /// Bootstrap failed (too many failed replicates, bad arguments).
    #[error("bootstrap error: {0}")]
    Bootstrap(String),

    /// Configuration file or flag values out of range.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
