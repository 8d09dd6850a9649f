//! Content-controlled aesthetics analysis for thumbnail corpora.
//!
//! - [`imgcore`]: decoding, letterbox removal, HSV and L\*a\*b\* planes
//! - [`features`]: the 19 scalar aesthetic features
//! - [`themes`]: visual-theme clustering, cluster tagging, Gini purity
//! - [`stats`]: Welch tests, Spearman correlation, power-law fits

pub mod features;
pub mod imgcore;
pub mod stats;
pub mod themes;
