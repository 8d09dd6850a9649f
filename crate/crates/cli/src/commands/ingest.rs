use std::collections::BTreeSet;

use chrono::Utc;
use thumbscope_corpus::{
    fetch_thumbnails, save_manifest, Manifest, Provenance, UreqTransport, YouTubeClient,
};

use super::output_file;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::synth::{generate, PlantedImage, SynthSpec};

/// Builds a manifest from the YouTube Data API and downloads thumbnails
/// next to it.
pub fn cmd_ingest(config: &RunConfig) -> Result<Manifest> {
    let ingest = &config.ingest;
    if ingest.events.is_empty() || ingest.channels.is_empty() {
        return Err(CliError::Config("ingest needs at least one event and one channel".into()));
    }
    if let Some(c) = ingest.channels.iter().find(|c| c.id.is_empty()) {
        return Err(CliError::Config(format!("channel id for {:?} is not configured", c.name)));
    }
    let transport = UreqTransport::default();
    let client = YouTubeClient::from_env(&transport).map_err(|e| CliError::Config(e.to_string()))?;

    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for event in &ingest.events {
        for channel in &ingest.channels {
            let found = client
                .collect_records(event, &channel.id, &channel.group, ingest.published_after, ingest.limit)
                .map_err(|e| CliError::Validation(format!("{event} / {}: {e}", channel.name)))?;
            log::info!("{event} / {}: {} videos", channel.name, found.len());
            for mut r in found {
                // The same video can match two queries; the first one keeps it.
                if seen.insert(r.image_id.clone()) {
                    r.channel = channel.name.clone();
                    records.push(r);
                }
            }
        }
    }

    let manifest_path = config.manifest_path();
    let thumbs = manifest_path
        .parent()
        .map(|d| d.join("thumbnails"))
        .unwrap_or_else(|| "thumbnails".into());
    let report = fetch_thumbnails(&mut records, &thumbs, &transport, ingest.parallelism)?;
    for r in &mut records {
        if let Some(name) = r.thumbnail_path.take() {
            r.thumbnail_path = Some(format!("thumbnails/{name}"));
        }
    }
    log::info!(
        "thumbnails: {} downloaded, {} already present, {} failed",
        report.written,
        report.skipped,
        report.failures.len()
    );

    let manifest = Manifest {
        provenance: Provenance {
            query: ingest.events.join(" | "),
            channel_ids: ingest.channels.iter().map(|c| c.id.clone()).collect(),
            published_after: ingest.published_after,
            retrieved_at: Some(Utc::now()),
        },
        records,
    };
    if let Some(parent) = manifest_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    save_manifest(&manifest_path, &manifest)?;
    Ok(manifest)
}

/// Writes a synthetic corpus with planted structure into the output directory.
pub fn cmd_ingest_synthetic(config: &RunConfig, spec: &SynthSpec) -> Result<Vec<PlantedImage>> {
    let dir = output_file(config, "manifest.jsonl")?
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_default();
    generate(&dir, spec)
}
