use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SidecarKind {
    Embeddings,
    Tags,
    Annotations,
}

impl FromStr for SidecarKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "embeddings" => Ok(Self::Embeddings),
            "tags" => Ok(Self::Tags),
            "annotations" => Ok(Self::Annotations),
            other => Err(format!("unknown sidecar kind {other:?} (embeddings, tags, annotations)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShotScale {
    Close,
    Medium,
    Long,
}

impl ShotScale {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Close => "close",
            Self::Medium => "medium",
            Self::Long => "long",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Indoor,
    Outdoor,
}

impl Setting {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Indoor => "indoor",
            Self::Outdoor => "outdoor",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shot_scale: Option<ShotScale>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objects: Option<BTreeMap<String, u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<Setting>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingLine {
    image_id: String,
    embedding: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TagLine {
    image_id: String,
    tags: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationLine {
    image_id: String,
    #[serde(default)]
    shot_scale: Option<ShotScale>,
    #[serde(default)]
    objects: Option<BTreeMap<String, u32>>,
    #[serde(default)]
    setting: Option<Setting>,
}

/// Validated sidecar entries keyed by image id.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar<T> {
    pub entries: BTreeMap<String, T>,
    /// Fraction of manifest images with an entry.
    pub coverage: f64,
}

#[derive(Debug, Error)]
pub enum SidecarError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("sidecar line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("sidecar line {line}: image_id {id:?} is not in the manifest")]
    Orphan { line: usize, id: String },
    #[error("sidecar line {line}: duplicate image_id {id:?}")]
    Duplicate { line: usize, id: String },
    #[error("sidecar line {line}: embedding for {id:?} has dimension {found}, expected {expected}")]
    Dimension {
        line: usize,
        id: String,
        expected: usize,
        found: usize,
    },
}

fn read_lines<L, T>(
    path: &Path,
    manifest: &Manifest,
    mut check: impl FnMut(usize, L) -> Result<(String, T), SidecarError>,
) -> Result<Sidecar<T>, SidecarError>
where
    L: DeserializeOwned,
{
    let ids = manifest.ids();
    let mut entries = BTreeMap::new();
    for (i, line) in BufReader::new(fs::File::open(path)?).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: L = serde_json::from_str(&line).map_err(|e| SidecarError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let (id, value) = check(line_no, parsed)?;
        if !ids.contains(id.as_str()) {
            return Err(SidecarError::Orphan { line: line_no, id });
        }
        if entries.contains_key(&id) {
            return Err(SidecarError::Duplicate { line: line_no, id });
        }
        entries.insert(id, value);
    }
    let coverage = if ids.is_empty() {
        0.0
    } else {
        entries.len() as f64 / ids.len() as f64
    };
    if coverage < 1.0 {
        log::warn!(
            "sidecar {} covers {} of {} manifest images ({:.1}%)",
            path.display(),
            entries.len(),
            ids.len(),
            coverage * 100.0
        );
    }
    Ok(Sidecar { entries, coverage })
}

pub fn load_embeddings(path: &Path, manifest: &Manifest) -> Result<Sidecar<Vec<f64>>, SidecarError> {
    let mut dim = None;
    read_lines(path, manifest, |line, l: EmbeddingLine| {
        if l.embedding.is_empty() {
            return Err(SidecarError::Malformed {
                line,
                message: "empty embedding".into(),
            });
        }
        if l.embedding.iter().any(|v| !v.is_finite()) {
            return Err(SidecarError::Malformed {
                line,
                message: "non-finite embedding value".into(),
            });
        }
        let expected = *dim.get_or_insert(l.embedding.len());
        if l.embedding.len() != expected {
            return Err(SidecarError::Dimension {
                line,
                id: l.image_id,
                expected,
                found: l.embedding.len(),
            });
        }
        Ok((l.image_id, l.embedding))
    })
}

pub fn load_tags(path: &Path, manifest: &Manifest) -> Result<Sidecar<Vec<String>>, SidecarError> {
    read_lines(path, manifest, |_, l: TagLine| Ok((l.image_id, l.tags)))
}

pub fn load_annotations(path: &Path, manifest: &Manifest) -> Result<Sidecar<Annotation>, SidecarError> {
    read_lines(path, manifest, |_, l: AnnotationLine| {
        let annotation = Annotation {
            shot_scale: l.shot_scale,
            objects: l.objects,
            setting: l.setting,
        };
        Ok((l.image_id, annotation))
    })
}

/// Summary of a sidecar that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct SidecarSummary {
    pub entries: usize,
    pub coverage: f64,
    pub dimension: Option<usize>,
    pub missing: BTreeSet<String>,
}

pub fn validate_sidecar(path: &Path, kind: SidecarKind, manifest: &Manifest) -> Result<SidecarSummary, SidecarError> {
    let (ids, coverage, dimension): (BTreeSet<String>, f64, Option<usize>) = match kind {
        SidecarKind::Embeddings => {
            let s = load_embeddings(path, manifest)?;
            let dim = s.entries.values().next().map(Vec::len);
            (s.entries.into_keys().collect(), s.coverage, dim)
        }
        SidecarKind::Tags => {
            let s = load_tags(path, manifest)?;
            (s.entries.into_keys().collect(), s.coverage, None)
        }
        SidecarKind::Annotations => {
            let s = load_annotations(path, manifest)?;
            (s.entries.into_keys().collect(), s.coverage, None)
        }
    };
    let missing = manifest
        .ids()
        .into_iter()
        .filter(|id| !ids.contains(*id))
        .map(String::from)
        .collect();
    Ok(SidecarSummary {
        entries: ids.len(),
        coverage,
        dimension,
        missing,
    })
}
