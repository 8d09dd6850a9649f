use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One thumbnail and the metadata of the video it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThumbnailRecord {
    pub image_id: String,
    pub channel: String,
    /// Cultural group of the channel, e.g. "us" or "cn".
    pub group: String,
    /// Query label the video was retrieved under.
    pub event: String,
    pub published_at: DateTime<Utc>,
    pub views: u64,
    pub likes: u64,
    pub comments: u64,
    /// Local image file, relative to the manifest's directory or absolute.
    pub thumbnail_path: Option<String>,
    pub url: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub query: String,
    pub channel_ids: Vec<String>,
    pub published_after: Option<DateTime<Utc>>,
    pub retrieved_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub provenance: Provenance,
    pub records: Vec<ThumbnailRecord>,
}

impl Manifest {
    pub fn get(&self, id: &str) -> Option<&ThumbnailRecord> {
        self.records.iter().find(|r| r.image_id == id)
    }

    pub fn ids(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.image_id.as_str()).collect()
    }

    /// Checks the invariants `load_manifest` enforces; `Err` holds the
    /// 0-based record index and a message.
    pub fn validate(&self) -> Result<(), (usize, String)> {
        let mut seen = BTreeSet::new();
        for (i, r) in self.records.iter().enumerate() {
            if r.image_id.is_empty() {
                return Err((i, "empty image_id".into()));
            }
            if !seen.insert(r.image_id.as_str()) {
                return Err((i, format!("duplicate image_id {:?}", r.image_id)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("manifest line {line}: {message}")]
    Line { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProvenanceLine {
    provenance: Provenance,
}

/// Writes the provenance header line followed by one line per record.
pub fn save_manifest(path: &Path, manifest: &Manifest) -> Result<(), ManifestError> {
    if let Err((i, message)) = manifest.validate() {
        return Err(ManifestError::Line { line: i + 2, message });
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    let header = ProvenanceLine {
        provenance: manifest.provenance.clone(),
    };
    writeln!(out, "{}", serde_json::to_string(&header).map_err(io::Error::other)?)?;
    for r in &manifest.records {
        writeln!(out, "{}", serde_json::to_string(r).map_err(io::Error::other)?)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads and validates a manifest. Line numbers in errors are 1-based.
pub fn load_manifest(path: &Path) -> Result<Manifest, ManifestError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut manifest = Manifest::default();
    let mut header_seen = false;
    let mut ids = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| ManifestError::Line { line: line_no, message };
        if !header_seen {
            header_seen = true;
            if line.trim_start().starts_with("{\"provenance\"") {
                let p: ProvenanceLine = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
                manifest.provenance = p.provenance;
                continue;
            }
            return Err(bad("first line must be the provenance header".into()));
        }
        let record: ThumbnailRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        if record.image_id.is_empty() {
            return Err(bad("empty image_id".into()));
        }
        if !ids.insert(record.image_id.clone()) {
            return Err(bad(format!("duplicate image_id {:?}", record.image_id)));
        }
        manifest.records.push(record);
    }
    if !header_seen {
        log::warn!("manifest {} is empty", path.display());
    }
    Ok(manifest)
}
