//! Patient attribute distributions.
//!
//! Log-normal parameters are the mean and standard deviation of the
//! distribution itself; the parameters of the underlying normal are derived
//! from them. Integer quantities (age, LOS, LOR) round real draws to the
//! nearest integer.

mod choice;
mod lognormal;
pub mod placeholders;
mod rate;
mod table;

pub use choice::{
    AgeBounds, AgeLosChoice, DistSpec, DistributionChoice, PatientSampler, TableStore,
};
pub use lognormal::{sample_lognormal, LogNormalSampler, LogNormalSpec, MAX_REJECTIONS};
pub use rate::{fit_rate_from_classes, AttributeRates, RateFit, RatePolynomial, MIN_FIT_POINTS};
pub use table::{
    DiscreteSampler, EmpiricalTable, JointSampler, TableCell, TableHeader, TableKind,
    DEFAULT_AGE_CLASS_WIDTH, DEFAULT_AGE_RANGE, DEFAULT_LOS_RANGE,
};

#[derive(Debug, thiserror::Error)]
pub enum DistributionError {
    #[error("invalid distribution parameters: {0}")]
    InvalidParameters(String),
    #[error("rate fit needs at least {required} points, got {given}")]
    TooFewPoints { given: usize, required: usize },
    #[error("rate {0} is outside [0, 1]")]
    RateOutOfRange(f64),
    #[error("malformed table (line {line}): {reason}")]
    MalformedTable { line: usize, reason: String },
    #[error("negative weight {weight} on line {line}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error("cell outside the declared support (line {line}): {reason}")]
    OutOfSupport { line: usize, reason: String },
    #[error("table has no probability mass")]
    EmptySupport,
    #[error("unknown table '{0}'")]
    UnknownTable(String),
    #[error("expected a {} table, found a {} table", .expected.name(), .found.name())]
    KindMismatch {
        expected: TableKind,
        found: TableKind,
    },
    #[error("{0}")]
    Unsupported(String),
    #[error("cannot read table {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
