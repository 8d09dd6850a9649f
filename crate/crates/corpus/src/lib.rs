//! Corpus plumbing for thumbscope: the JSON Lines manifest of thumbnails and
//! their platform metadata, sidecar files produced by external annotators,
//! and a YouTube Data API client for building a corpus.

pub mod fetch;
pub mod manifest;
pub mod sidecar;
pub mod transport;
pub mod youtube;

pub use fetch::{fetch_thumbnails, FetchFailure, FetchReport, DEFAULT_PARALLELISM};
pub use manifest::{load_manifest, save_manifest, Manifest, ManifestError, Provenance, ThumbnailRecord};
pub use sidecar::{
    load_annotations, load_embeddings, load_tags, validate_sidecar, Annotation, Setting, ShotScale, Sidecar,
    SidecarError, SidecarKind, SidecarSummary,
};
pub use transport::{HttpResponse, Transport, TransportError, UreqTransport};
pub use youtube::{ApiError, VideoHit, VideoStats, YouTubeClient, API_KEY_ENV};
