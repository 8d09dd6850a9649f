use std::fs;

use thumbscope_core::features::{feature_index, FEATURE_NAMES};

use super::{csv_writer, load_corpus, output_file, read_features, resolve_thumbnail};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::svg::Svg;

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub top: Vec<(String, f64)>,
    pub bottom: Vec<(String, f64)>,
}

/// The `k` highest and lowest images by one feature, for eyeballing.
pub fn cmd_inspect(config: &RunConfig, feature: &str, k: usize) -> Result<Ranking> {
    let f = feature_index(feature).ok_or_else(|| {
        CliError::Validation(format!("unknown feature {feature:?}; valid names: {}", FEATURE_NAMES.join(", ")))
    })?;
    let features = read_features(config)?;
    let mut ranked: Vec<(String, f64)> = features.iter().map(|(id, v)| (id.clone(), v[f])).collect();
    // Descending by value; ids break ties.
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let k = k.min(ranked.len());
    let top = ranked[..k].to_vec();
    let bottom: Vec<(String, f64)> = ranked.iter().rev().take(k).cloned().collect();

    let mut w = csv_writer(&output_file(config, &format!("inspect/{feature}.csv"))?)?;
    w.write_record(["position", "rank", "image_id", "value"])?;
    for (pos, list) in [("top", &top), ("bottom", &bottom)] {
        for (i, (id, v)) in list.iter().enumerate() {
            w.write_record([pos, &(i + 1).to_string(), id, &v.to_string()])?;
        }
    }
    w.flush()?;

    let manifest = load_corpus(config)?;
    let href = |id: &str| {
        manifest
            .get(id)
            .and_then(|r| r.thumbnail_path.as_deref())
            .map(|p| resolve_thumbnail(config, p))
            .and_then(|p| std::path::absolute(p).ok())
            .map(|p| format!("file://{}", p.display()))
            .unwrap_or_default()
    };
    let (tw, th, gap) = (160.0, 90.0, 24.0);
    let width = 20.0 + (tw + 10.0) * k.max(1) as f64;
    let mut svg = Svg::new(width, 2.0 * (th + gap) + 60.0);
    svg.text(10.0, 20.0, 13.0, "start", &format!("{feature}: highest (top row) and lowest (bottom row)"));
    for (row, list) in [&top, &bottom].iter().enumerate() {
        let y = 40.0 + row as f64 * (th + gap);
        for (i, (id, v)) in list.iter().enumerate() {
            let x = 10.0 + i as f64 * (tw + 10.0);
            svg.image(x, y, tw, th, &href(id));
            svg.text(x, y + th + 14.0, 10.0, "start", &format!("{id} ({v:.3})"));
        }
    }
    fs::write(output_file(config, &format!("inspect/{feature}.svg"))?, svg.finish())?;
    Ok(Ranking { top, bottom })
}
