use std::path::Path;

use thumbscope_corpus::{validate_sidecar, SidecarKind, SidecarSummary};

use super::load_corpus;
use crate::config::RunConfig;
use crate::error::Result;

/// Checks a sidecar file against the manifest.
pub fn cmd_validate_sidecar(config: &RunConfig, kind: SidecarKind, path: &Path) -> Result<SidecarSummary> {
    let manifest = load_corpus(config)?;
    Ok(validate_sidecar(path, kind, &manifest)?)
}
