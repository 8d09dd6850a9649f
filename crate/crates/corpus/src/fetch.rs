use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::transport::Transport;
use crate::ThumbnailRecord;

pub const DEFAULT_PARALLELISM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchFailure {
    pub image_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FetchReport {
    pub written: usize,
    pub skipped: usize,
    pub failures: Vec<FetchFailure>,
}

fn extension(url: &str) -> &str {
    let path = url.split(['?', '#']).next().unwrap_or(url);
    let last = path.rsplit('/').next().unwrap_or(path);
    match last.rsplit_once('.').map(|(_, e)| e.to_ascii_lowercase()) {
        Some(e) if e == "png" => "png",
        Some(e) if e == "webp" => "webp",
        _ => "jpg",
    }
}

enum Outcome {
    Written(String),
    Skipped(String),
    Failed(String),
}

fn fetch_one(record: &ThumbnailRecord, dest_dir: &Path, transport: &dyn Transport) -> Outcome {
    if record.url.is_empty() {
        return Outcome::Failed("record has no URL".into());
    }
    let name = format!("{}.{}", record.image_id, extension(&record.url));
    let target = dest_dir.join(&name);
    if fs::metadata(&target).map(|m| m.len() > 0).unwrap_or(false) {
        return Outcome::Skipped(name);
    }
    let response = match transport.get(&record.url) {
        Ok(r) => r,
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    if !(200..300).contains(&response.status) {
        return Outcome::Failed(format!("HTTP {}", response.status));
    }
    if response.body.is_empty() {
        return Outcome::Failed("empty response body".into());
    }
    // Write under a temporary name so an interrupted run never leaves a
    // partial file that a re-run would skip.
    let partial = dest_dir.join(format!(".{name}.part"));
    if let Err(e) = fs::write(&partial, &response.body).and_then(|_| fs::rename(&partial, &target)) {
        let _ = fs::remove_file(&partial);
        return Outcome::Failed(e.to_string());
    }
    Outcome::Written(name)
}

/// Downloads each record's thumbnail to `dest_dir/<image_id>.<ext>` with at
/// most `parallelism` requests in flight.
///
/// Successful records get `thumbnail_path` set to the file name, relative
/// to `dest_dir`. Existing non-empty files are not downloaded again.
/// Failures are collected in the report in record order.
pub fn fetch_thumbnails(
    records: &mut [ThumbnailRecord],
    dest_dir: &Path,
    transport: &dyn Transport,
    parallelism: usize,
) -> std::io::Result<FetchReport> {
    fs::create_dir_all(dest_dir)?;
    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<Option<Outcome>>> = Mutex::new((0..records.len()).map(|_| None).collect());
    let shared: &[ThumbnailRecord] = records;
    thread::scope(|s| {
        for _ in 0..parallelism.max(1).min(shared.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(record) = shared.get(i) else { break };
                let outcome = fetch_one(record, dest_dir, transport);
                outcomes.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    let mut report = FetchReport::default();
    for (record, outcome) in records.iter_mut().zip(outcomes.into_inner().unwrap()) {
        match outcome.expect("every record is visited") {
            Outcome::Written(name) => {
                report.written += 1;
                record.thumbnail_path = Some(name);
            }
            Outcome::Skipped(name) => {
                report.skipped += 1;
                record.thumbnail_path = Some(name);
            }
            Outcome::Failed(reason) => {
                log::warn!("thumbnail for {} not fetched: {reason}", record.image_id);
                report.failures.push(FetchFailure {
                    image_id: record.image_id.clone(),
                    reason,
                });
            }
        }
    }
    Ok(report)
}
