use std::collections::BTreeMap;
use std::fs;

use thumbscope_core::imgcore::{crop_black_bars, decode};
use thumbscope_core::themes::{
    cluster, fallback_embedding, gini, tag_clusters, theme_distribution, CategoricalDistribution, EmbeddingSet,
    ThemeModel, TAGS_PER_CLUSTER,
};
use thumbscope_corpus::{load_annotations, load_embeddings, load_tags, Manifest};

use super::{csv_writer, load_corpus, output_file, resolve_thumbnail};
use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const ASSIGNMENTS_FILE: &str = "themes/assignments.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ThemesSummary {
    /// Fitted model per event.
    pub models: BTreeMap<String, ThemeModel>,
}

pub fn theme_label(event: &str, cluster: usize) -> String {
    format!("{event}#{cluster}")
}

fn embeddings_by_id(config: &RunConfig, manifest: &Manifest) -> Result<BTreeMap<String, Vec<f64>>> {
    if let Some(path) = config.sidecar_path("embeddings") {
        return Ok(load_embeddings(&path, manifest)?.entries);
    }
    if !config.themes.fallback_embedding {
        return Err(CliError::Config(
            "no embeddings sidecar; supply one or enable themes.fallback_embedding".into(),
        ));
    }
    let mut out = BTreeMap::new();
    for r in &manifest.records {
        let Some(stored) = &r.thumbnail_path else { continue };
        let path = resolve_thumbnail(config, stored);
        let img = fs::read(&path)
            .map_err(|e| e.to_string())
            .and_then(|b| decode(&b).map_err(|e| e.to_string()))
            .and_then(|img| crop_black_bars(&img, config.extract.bar_threshold).map_err(|e| e.to_string()));
        match img {
            Ok(img) => {
                out.insert(r.image_id.clone(), fallback_embedding(&img));
            }
            Err(e) => log::warn!("{}: no fallback embedding: {e}", r.image_id),
        }
    }
    Ok(out)
}

/// Clusters each event's images into themes, tags the themes and reports
/// setting purity.
pub fn cmd_themes(config: &RunConfig) -> Result<ThemesSummary> {
    let manifest = load_corpus(config)?;
    let embeddings = embeddings_by_id(config, &manifest)?;
    let tags = match config.sidecar_path("tags") {
        Some(p) => Some(load_tags(&p, &manifest)?.entries),
        None => {
            log::warn!("no tags sidecar; themes will not be tagged");
            None
        }
    };

    let mut by_event: BTreeMap<&str, EmbeddingSet> = BTreeMap::new();
    for r in &manifest.records {
        if let Some(v) = embeddings.get(&r.image_id) {
            by_event
                .entry(r.event.as_str())
                .or_default()
                .insert(r.image_id.clone(), v.clone())
                .map_err(|e| CliError::Validation(e.to_string()))?;
        }
    }

    let mut models = BTreeMap::new();
    for (event, set) in &by_event {
        let model = cluster(set, config.themes.k_range(), config.seed)
            .map_err(|e| CliError::Validation(format!("event {event:?}: {e}")))?;
        let model = match &tags {
            Some(t) => tag_clusters(model, t, config.themes.method, config.themes.ubiquity_cap)
                .map_err(|e| CliError::Validation(format!("event {event:?}: {e}")))?,
            None => model,
        };
        log::info!("event {event:?}: k = {}", model.k);
        models.insert(event.to_string(), model);
    }

    write_assignments(config, &models)?;
    write_tags(config, &models)?;
    write_silhouettes(config, &models)?;
    write_distribution(config, &manifest, &models)?;
    if let Some(p) = config.sidecar_path("annotations") {
        write_gini(config, &models, &load_annotations(&p, &manifest)?.entries)?;
    }
    let json = serde_json::to_string_pretty(&models).map_err(std::io::Error::other)?;
    fs::write(output_file(config, "themes/model.json")?, json + "\n")?;
    Ok(ThemesSummary { models })
}

fn write_assignments(config: &RunConfig, models: &BTreeMap<String, ThemeModel>) -> Result<()> {
    let mut w = csv_writer(&output_file(config, ASSIGNMENTS_FILE)?)?;
    w.write_record(["image_id", "event", "theme", "theme_label"])?;
    let mut rows: Vec<(&String, &String, usize)> = models
        .iter()
        .flat_map(|(event, m)| m.assignment.iter().map(move |(id, &c)| (id, event, c)))
        .collect();
    rows.sort();
    for (id, event, c) in rows {
        w.write_record([id.as_str(), event, &c.to_string(), &theme_label(event, c)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_tags(config: &RunConfig, models: &BTreeMap<String, ThemeModel>) -> Result<()> {
    let mut w = csv_writer(&output_file(config, "themes/tags.csv")?)?;
    let mut header = vec!["event".to_string(), "theme_label".into(), "size".into(), "method".into()];
    header.extend((1..=TAGS_PER_CLUSTER).map(|i| format!("tag_{i}")));
    header.push("flagged".into());
    w.write_record(&header)?;
    for (event, m) in models {
        for (c, size) in m.sizes().into_iter().enumerate() {
            let mut row = vec![
                event.clone(),
                theme_label(event, c),
                size.to_string(),
                m.method.map(|x| u8::from(x).to_string()).unwrap_or_default(),
            ];
            for i in 0..TAGS_PER_CLUSTER {
                row.push(m.tags[c].get(i).cloned().unwrap_or_default());
            }
            row.push(m.tag_flags[c].to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_silhouettes(config: &RunConfig, models: &BTreeMap<String, ThemeModel>) -> Result<()> {
    let mut w = csv_writer(&output_file(config, "themes/silhouettes.csv")?)?;
    w.write_record(["event", "k", "silhouette", "chosen"])?;
    for (event, m) in models {
        for (k, s) in &m.silhouettes {
            w.write_record([event.as_str(), &k.to_string(), &s.to_string(), &(*k == m.k).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_distribution(config: &RunConfig, manifest: &Manifest, models: &BTreeMap<String, ThemeModel>) -> Result<()> {
    let mut w = csv_writer(&output_file(config, "themes/distribution.csv")?)?;
    w.write_record(["event", "group", "theme_label", "count", "proportion", "ratio"])?;
    for (event, m) in models {
        let pairs: Vec<(&str, &str)> = manifest
            .records
            .iter()
            .filter(|r| &r.event == event)
            .map(|r| (r.image_id.as_str(), r.group.as_str()))
            .chain(
                manifest
                    .records
                    .iter()
                    .filter(|r| &r.event == event)
                    .map(|r| (r.image_id.as_str(), "all")),
            )
            .collect();
        let d = theme_distribution(m, pairs);
        for (group, counts) in &d.counts {
            for (c, count) in counts.iter().enumerate() {
                w.write_record([
                    event.as_str(),
                    group,
                    &theme_label(event, c),
                    &count.to_string(),
                    &d.proportions[group][c].to_string(),
                    &d.ratios[group][c].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Per-theme setting Gini next to the event and corpus baselines.
fn write_gini(
    config: &RunConfig,
    models: &BTreeMap<String, ThemeModel>,
    annotations: &BTreeMap<String, thumbscope_corpus::Annotation>,
) -> Result<()> {
    let setting = |id: &str| annotations.get(id).and_then(|a| a.setting).map(|s| s.as_str());
    let mut rows: Vec<(String, String, CategoricalDistribution)> = Vec::new();
    let mut corpus = CategoricalDistribution::new();
    for (event, m) in models {
        let mut baseline = CategoricalDistribution::new();
        let mut per_theme = vec![CategoricalDistribution::new(); m.k];
        for (id, &c) in &m.assignment {
            if let Some(s) = setting(id) {
                baseline.add(s, 1);
                corpus.add(s, 1);
                per_theme[c].add(s, 1);
            }
        }
        rows.push(("event".into(), event.clone(), baseline));
        for (c, d) in per_theme.into_iter().enumerate() {
            rows.push(("theme".into(), theme_label(event, c), d));
        }
    }
    rows.insert(0, ("corpus".into(), "all".into(), corpus));

    let mut w = csv_writer(&output_file(config, "themes/gini.csv")?)?;
    w.write_record(["scope", "label", "indoor", "outdoor", "gini"])?;
    for (scope, label, d) in rows {
        let count = |k: &str| d.counts.get(k).copied().unwrap_or(0).to_string();
        let g = gini(&d).map(|g| g.to_string()).unwrap_or_default();
        w.write_record([scope.as_str(), &label, &count("indoor"), &count("outdoor"), &g])?;
    }
    w.flush()?;
    Ok(())
}
