//! Visual themes: clustering image embeddings, naming clusters with tags,
//! and checking cluster purity against a categorical annotation.

mod cluster;
mod dispersion;
mod embedding;
mod tagging;

pub use cluster::{cluster, silhouette, KRange, ThemeModel};
pub use dispersion::{gini, theme_distribution, CategoricalDistribution, ThemeDistribution};
pub use embedding::{fallback_embedding, EmbeddingSet, FALLBACK_DIM};
pub use tagging::{tag_clusters, tag_weights, TagWeight, TaggingMethod, DEFAULT_UBIQUITY_CAP, TAGS_PER_CLUSTER};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ThemeError {
    #[error("embedding for {id:?} has dimension {found}, expected {expected}")]
    Dimension { id: String, expected: usize, found: usize },
    #[error("duplicate image id {0:?}")]
    DuplicateId(String),
    #[error("non-finite embedding for {0:?}")]
    NonFinite(String),
    #[error("need at least {needed} embeddings for k up to {k_max}, have {found}")]
    TooFewPoints { needed: usize, found: usize, k_max: usize },
    #[error("invalid k range {0}..={1}")]
    BadRange(usize, usize),
    #[error("clustering is degenerate: fewer distinct points than any k in range")]
    Degenerate,
    #[error("image {0:?} is assigned to a cluster but has no tag list")]
    MissingTags(String),
    #[error("empty distribution")]
    EmptyDistribution,
}
