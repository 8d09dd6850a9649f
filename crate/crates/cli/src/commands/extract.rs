use std::collections::BTreeMap;
use std::fs;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use thumbscope_core::features::{extract, ExtractorConfig, FeatureVector, FEATURE_NAMES};
use thumbscope_core::imgcore::decode;
use thumbscope_corpus::{load_annotations, Annotation, ThumbnailRecord};

use super::{csv_writer, load_corpus, output_file, resolve_thumbnail};
use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const FEATURES_FILE: &str = "features.csv";
pub const FAILURES_FILE: &str = "extract_failures.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractSummary {
    pub rows: usize,
    pub failures: Vec<(String, String)>,
}

fn extract_one(config: &RunConfig, extractor: &ExtractorConfig, record: &ThumbnailRecord) -> std::result::Result<FeatureVector, String> {
    let stored = record.thumbnail_path.as_deref().ok_or("no thumbnail file")?;
    let path = resolve_thumbnail(config, stored);
    let bytes = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let img = decode(&bytes).map_err(|e| e.to_string())?;
    extract(&img, extractor).map_err(|e| e.to_string())
}

fn objects_cell(a: &Annotation) -> String {
    a.objects
        .as_ref()
        .map(|o| o.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(";"))
        .unwrap_or_default()
}

/// Computes the feature table for every manifest image.
pub fn cmd_extract(config: &RunConfig) -> Result<ExtractSummary> {
    let manifest = load_corpus(config)?;
    let extractor = config.extractor()?;
    let annotations = match config.sidecar_path("annotations") {
        Some(p) => load_annotations(&p, &manifest)?.entries,
        None => BTreeMap::new(),
    };

    let mut records: Vec<&ThumbnailRecord> = manifest.records.iter().collect();
    records.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let workers = match config.extract.workers {
        0 => thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        n => n,
    }
    .min(records.len().max(1));

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<std::result::Result<FeatureVector, String>>>> =
        Mutex::new(vec![None; records.len()]);
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(record) = records.get(i) else { break };
                let r = extract_one(config, &extractor, record);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });

    let mut writer = csv_writer(&output_file(config, FEATURES_FILE)?)?;
    let mut header: Vec<&str> = vec!["image_id"];
    header.extend(FEATURE_NAMES);
    header.extend(["shot_scale", "setting", "objects"]);
    writer.write_record(&header)?;
    let mut failures = Vec::new();
    let mut rows = 0;
    for (record, result) in records.iter().zip(results.into_inner().unwrap()) {
        match result.expect("every record is processed") {
            Ok(features) => {
                let a = annotations.get(&record.image_id).cloned().unwrap_or_default();
                let mut row = vec![record.image_id.clone()];
                row.extend(features.values().iter().map(f64::to_string));
                row.push(a.shot_scale.map(|s| s.as_str().to_string()).unwrap_or_default());
                row.push(a.setting.map(|s| s.as_str().to_string()).unwrap_or_default());
                row.push(objects_cell(&a));
                writer.write_record(&row)?;
                rows += 1;
            }
            Err(e) => {
                log::error!("{}: {e}", record.image_id);
                failures.push((record.image_id.clone(), e));
            }
        }
    }
    writer.flush()?;

    let mut fw = csv_writer(&output_file(config, FAILURES_FILE)?)?;
    fw.write_record(["image_id", "error"])?;
    for (id, e) in &failures {
        fw.write_record([id, e])?;
    }
    fw.flush()?;

    let total = records.len();
    log::info!("extracted {rows} of {total} images");
    if total > 0 && failures.len() as f64 / total as f64 > config.extract.max_failure_fraction {
        return Err(CliError::DataQuality(format!(
            "{} of {total} images failed extraction (limit {:.0}%); see {FAILURES_FILE}",
            failures.len(),
            config.extract.max_failure_fraction * 100.0
        )));
    }
    Ok(ExtractSummary { rows, failures })
}
