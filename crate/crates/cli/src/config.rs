use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thumbscope_core::features::{ExtractorConfig, SpectralOptions};
use thumbscope_core::imgcore::DEFAULT_BAR_THRESHOLD;
use thumbscope_core::stats::{DEFAULT_ALPHA, DEFAULT_METRICS};
use thumbscope_core::themes::{KRange, TaggingMethod, DEFAULT_UBIQUITY_CAP};

use crate::error::{CliError, Result};

/// Whole-run configuration, read from a TOML file. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Named ingest preset applied before the `[ingest]` table.
    pub preset: Option<String>,
    pub paths: Paths,
    pub extract: ExtractSettings,
    pub themes: ThemeSettings,
    pub compare: CompareSettings,
    pub performance: PerformanceSettings,
    pub ingest: IngestSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("thumbscope-out"),
            preset: None,
            paths: Paths::default(),
            extract: ExtractSettings::default(),
            themes: ThemeSettings::default(),
            compare: CompareSettings::default(),
            performance: PerformanceSettings::default(),
            ingest: IngestSettings::default(),
        }
    }
}

/// Input files. Unset paths fall back to the conventional file names inside
/// the output directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub manifest: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub filter_bank: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractSettings {
    pub bar_threshold: f64,
    pub spectral_resize: bool,
    pub fit_range: (f64, f64),
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Fraction of failed images above which extraction exits with code 2.
    pub max_failure_fraction: f64,
}

impl Default for ExtractSettings {
    fn default() -> Self {
        let spectral = SpectralOptions::default();
        Self {
            bar_threshold: DEFAULT_BAR_THRESHOLD,
            spectral_resize: spectral.resize,
            fit_range: spectral.fit_range,
            workers: 0,
            max_failure_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThemeSettings {
    pub k_min: usize,
    pub k_max: usize,
    pub method: TaggingMethod,
    pub ubiquity_cap: f64,
    /// Build embeddings from the images when no embedding sidecar exists.
    pub fallback_embedding: bool,
}

impl Default for ThemeSettings {
    fn default() -> Self {
        let k = KRange::default();
        Self {
            k_min: k.min,
            k_max: k.max,
            method: TaggingMethod::default(),
            ubiquity_cap: DEFAULT_UBIQUITY_CAP,
            fallback_embedding: false,
        }
    }
}

impl ThemeSettings {
    pub fn k_range(&self) -> KRange {
        KRange::new(self.k_min, self.k_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareSettings {
    pub alpha: f64,
    /// Group whose mean is the minuend of every difference.
    pub group_a: Option<String>,
}

impl Default for CompareSettings {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            group_a: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerformanceSettings {
    pub metrics: Vec<String>,
    pub histogram_bins: usize,
}

impl Default for PerformanceSettings {
    fn default() -> Self {
        Self {
            metrics: DEFAULT_METRICS.iter().map(|m| m.to_string()).collect(),
            histogram_bins: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub name: String,
    /// Platform channel id; must be filled in before a live ingest.
    #[serde(default)]
    pub id: String,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSettings {
    pub events: Vec<String>,
    pub channels: Vec<ChannelConfig>,
    pub published_after: Option<DateTime<Utc>>,
    pub limit: usize,
    pub parallelism: usize,
}

impl Default for IngestSettings {
    fn default() -> Self {
        Self {
            events: Vec::new(),
            channels: Vec::new(),
            published_after: None,
            limit: 300,
            parallelism: thumbscope_corpus::DEFAULT_PARALLELISM,
        }
    }
}

/// Two events, four channels, 300 videos each. Channel ids are left empty.
fn paper_2400() -> IngestSettings {
    let channel = |name: &str, group: &str| ChannelConfig {
        name: name.into(),
        id: String::new(),
        group: group.into(),
    };
    IngestSettings {
        events: vec!["covid 19".into(), "ukraine war".into()],
        channels: vec![
            channel("ABC News", "us"),
            channel("CBS News", "us"),
            channel("CGTN", "cn"),
            channel("New China TV", "cn"),
        ],
        published_after: None,
        limit: 300,
        parallelism: thumbscope_corpus::DEFAULT_PARALLELISM,
    }
}

pub const PRESETS: [&str; 1] = ["paper-2400"];

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let preset = raw.get("preset").and_then(|v| v.as_str()).map(String::from);
        let mut config: RunConfig = raw.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        if let Some(name) = preset {
            let base = match name.as_str() {
                "paper-2400" => paper_2400(),
                other => return Err(CliError::Config(format!("unknown preset {other:?}; known: {PRESETS:?}"))),
            };
            // Explicit [ingest] entries override the preset.
            let explicit = text.parse::<toml::Table>().ok().and_then(|t| t.get("ingest").cloned());
            let ingest = explicit.as_ref().and_then(|v| v.as_table());
            let set = |key: &str| ingest.is_some_and(|t| t.contains_key(key));
            if !set("events") {
                config.ingest.events = base.events;
            }
            if !set("channels") {
                config.ingest.channels = base.channels;
            }
            if !set("limit") {
                config.ingest.limit = base.limit;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.compare.alpha;
        if !(a > 0.0 && a < 1.0) {
            return Err(CliError::Config(format!("alpha must lie in (0, 1), got {a}")));
        }
        if self.themes.k_min < 2 || self.themes.k_min > self.themes.k_max {
            return Err(CliError::Config(format!(
                "invalid k range {}..={}",
                self.themes.k_min, self.themes.k_max
            )));
        }
        if !(self.themes.ubiquity_cap > 0.0 && self.themes.ubiquity_cap <= 1.0) {
            return Err(CliError::Config("ubiquity_cap must lie in (0, 1]".into()));
        }
        let (lo, hi) = self.extract.fit_range;
        if !(lo > 0.0 && lo < hi) {
            return Err(CliError::Config(format!("invalid fit range ({lo}, {hi})")));
        }
        if self.performance.histogram_bins == 0 {
            return Err(CliError::Config("histogram_bins must be positive".into()));
        }
        for m in &self.performance.metrics {
            if !DEFAULT_METRICS.contains(&m.as_str()) {
                return Err(CliError::Config(format!("unknown metric {m:?}; known: {DEFAULT_METRICS:?}")));
            }
        }
        Ok(())
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.paths
            .manifest
            .clone()
            .unwrap_or_else(|| self.output_dir.join("manifest.jsonl"))
    }

    /// Configured sidecar, or `<output_dir>/<kind>.jsonl` if that file exists.
    pub fn sidecar_path(&self, kind: &str) -> Option<PathBuf> {
        let configured = match kind {
            "embeddings" => &self.paths.embeddings,
            "tags" => &self.paths.tags,
            "annotations" => &self.paths.annotations,
            _ => &None,
        };
        configured.clone().or_else(|| {
            let p = self.output_dir.join(format!("{kind}.jsonl"));
            p.exists().then_some(p)
        })
    }

    pub fn extractor(&self) -> Result<ExtractorConfig> {
        let bank = match &self.paths.filter_bank {
            Some(p) => thumbscope_core::features::load_filter_bank(p)
                .map_err(|e| CliError::Config(format!("filter bank {}: {e}", p.display())))?,
            None => thumbscope_core::features::FilterBank::default_bank(),
        };
        Ok(ExtractorConfig {
            bar_threshold: self.extract.bar_threshold,
            spectral: SpectralOptions {
                resize: self.extract.spectral_resize,
                fit_range: self.extract.fit_range,
            },
            bank,
        })
    }

    /// Channel display name to group, from the ingest channel list.
    pub fn group_map(&self) -> BTreeMap<String, String> {
        self.ingest
            .channels
            .iter()
            .map(|c| (c.name.clone(), c.group.clone()))
            .collect()
    }
}
