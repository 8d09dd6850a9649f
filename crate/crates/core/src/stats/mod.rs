//! Two-sample tests, rank correlation and power-law fits for group and
//! performance comparisons.

mod compare;
mod correlate;
mod powerlaw;
pub mod special;
mod spearman;
mod ttest;

pub use compare::{compare_matrix, CellStatus, ComparisonCell, ComparisonMatrix, Observation, DEFAULT_ALPHA};
pub use correlate::{correlate_metrics, CorrelationRow, MetricObservation, Stratum, DEFAULT_METRICS, MIN_STRATUM_SIZE};
pub use powerlaw::{engagement_rates, powerlaw_fit, powerlaw_fit_f64, PowerLawFit, MIN_POWERLAW_POINTS};
pub use spearman::{average_ranks, spearman, SpearmanResult};
pub use ttest::{normalized_diff, welch_t, TTestResult};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} samples, have {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("sample lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-finite sample value")]
    NonFinite,
    #[error("views must be at least 1")]
    NonPositive,
    #[error("expected exactly two groups, found {0:?}")]
    Groups(Vec<String>),
    #[error("group {0:?} not present in the data")]
    UnknownGroup(String),
}
