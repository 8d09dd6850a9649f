//! One function per subcommand, plus the file formats they share.

mod compare;
mod extract;
mod ingest;
mod inspect;
mod performance;
mod temporal;
mod themes;
mod validate;

pub use compare::cmd_compare;
pub use extract::{cmd_extract, ExtractSummary, FEATURES_FILE};
pub use ingest::{cmd_ingest, cmd_ingest_synthetic};
pub use inspect::{cmd_inspect, Ranking};
pub use performance::{cmd_performance, PerformanceSummary};
pub use temporal::{cmd_temporal, MonthCount};
pub use themes::{cmd_themes, ThemesSummary, ASSIGNMENTS_FILE};
pub use validate::cmd_validate_sidecar;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thumbscope_core::features::{FEATURE_COUNT, FEATURE_NAMES};
use thumbscope_corpus::{load_manifest, Manifest};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub(crate) fn load_corpus(config: &RunConfig) -> Result<Manifest> {
    let path = config.manifest_path();
    if !path.exists() {
        return Err(CliError::Config(format!("manifest {} does not exist", path.display())));
    }
    Ok(load_manifest(&path)?)
}

pub(crate) fn output_file(config: &RunConfig, name: &str) -> Result<PathBuf> {
    let path = config.output_dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(path)
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?)
}

/// Empty string for a missing value.
pub(crate) fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Feature rows keyed by image id, as written by `extract`.
pub(crate) fn read_features(config: &RunConfig) -> Result<BTreeMap<String, [f64; FEATURE_COUNT]>> {
    let path = config.output_dir.join(FEATURES_FILE);
    if !path.exists() {
        return Err(CliError::Config(format!("{} not found; run extract first", path.display())));
    }
    let mut reader = csv::Reader::from_path(&path)?;
    let headers = reader.headers()?.clone();
    let expected: Vec<&str> = std::iter::once("image_id").chain(FEATURE_NAMES).collect();
    if headers.iter().take(expected.len()).ne(expected.iter().copied()) {
        return Err(CliError::Validation(format!("{} has unexpected columns", path.display())));
    }
    let mut out = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let mut values = [0.0; FEATURE_COUNT];
        for (f, v) in values.iter_mut().enumerate() {
            *v = row[f + 1].parse().map_err(|_| {
                CliError::Validation(format!("{} row {}: bad value {:?}", path.display(), i + 2, &row[f + 1]))
            })?;
        }
        out.insert(row[0].to_string(), values);
    }
    Ok(out)
}

/// Theme label per image id, as written by `themes`.
pub(crate) fn read_assignments(config: &RunConfig) -> Result<BTreeMap<String, String>> {
    let path = config.output_dir.join(ASSIGNMENTS_FILE);
    if !path.exists() {
        return Err(CliError::Config(format!("{} not found; run themes first", path.display())));
    }
    let mut reader = csv::Reader::from_path(&path)?;
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        out.insert(row[0].to_string(), row[3].to_string());
    }
    Ok(out)
}

/// Image path from a manifest entry; relative paths are taken relative to
/// the manifest's directory.
pub(crate) fn resolve_thumbnail(config: &RunConfig, stored: &str) -> PathBuf {
    let p = Path::new(stored);
    if p.is_absolute() {
        return p.to_path_buf();
    }
    config
        .manifest_path()
        .parent()
        .map(|d| d.join(p))
        .unwrap_or_else(|| p.to_path_buf())
}

/// File-name-safe form of a label.
pub(crate) fn file_slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}
