use std::collections::BTreeMap;
use std::fs;

use thumbscope_core::stats::{correlate_metrics, engagement_rates, powerlaw_fit, MetricObservation, PowerLawFit, Stratum};
use thumbscope_corpus::ThumbnailRecord;

use super::{csv_writer, load_corpus, opt, output_file, read_assignments, read_features};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::svg::{Svg, PALETTE};

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceSummary {
    /// Fit per (group, event); `None` where the stratum is too small.
    pub fits: BTreeMap<(String, String), Option<PowerLawFit>>,
    pub correlations: usize,
}

fn metric(r: &ThumbnailRecord, name: &str) -> f64 {
    match name {
        "views" => r.views as f64,
        "likes" => r.likes as f64,
        _ => r.comments as f64,
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// View power laws, engagement-rate distributions and the feature-metric
/// correlation table.
pub fn cmd_performance(config: &RunConfig) -> Result<PerformanceSummary> {
    let manifest = load_corpus(config)?;
    let mut records: Vec<&ThumbnailRecord> = manifest.records.iter().collect();
    records.sort_by(|a, b| a.image_id.cmp(&b.image_id));

    // Power law per (group, event).
    let mut strata: BTreeMap<(String, String), Vec<u64>> = BTreeMap::new();
    for r in &records {
        strata.entry((r.group.clone(), r.event.clone())).or_default().push(r.views);
    }
    let mut fits = BTreeMap::new();
    let mut w = csv_writer(&output_file(config, "performance/powerlaw.csv")?)?;
    w.write_record(["group", "event", "n", "slope", "intercept", "r_squared", "status"])?;
    for ((group, event), views) in &strata {
        let positive: Vec<u64> = views.iter().copied().filter(|&v| v > 0).collect();
        if positive.len() < views.len() {
            log::warn!("{group}/{event}: {} videos with zero views left out of the fit", views.len() - positive.len());
        }
        let fit = powerlaw_fit(&positive);
        let (status, f) = match &fit {
            Ok(f) => ("ok".to_string(), Some(*f)),
            Err(e) => (format!("insufficient: {e}"), None),
        };
        w.write_record([
            group.clone(),
            event.clone(),
            positive.len().to_string(),
            opt(f.map(|f| f.slope)),
            opt(f.map(|f| f.intercept)),
            opt(f.map(|f| f.r_squared)),
            status,
        ])?;
        fits.insert((group.clone(), event.clone()), f);
    }
    w.flush()?;
    fs::write(output_file(config, "performance/powerlaw.svg")?, powerlaw_chart(&strata))?;

    // Engagement rates.
    let mut w = csv_writer(&output_file(config, "performance/rates.csv")?)?;
    w.write_record(["image_id", "group", "event", "views", "like_rate", "comment_rate"])?;
    let mut by_group: BTreeMap<&str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in &records {
        let rates = engagement_rates(r.views, r.likes, r.comments);
        if let Some((l, c)) = rates {
            let e = by_group.entry(r.group.as_str()).or_default();
            e.0.push(l);
            e.1.push(c);
        }
        w.write_record([
            r.image_id.clone(),
            r.group.clone(),
            r.event.clone(),
            r.views.to_string(),
            opt(rates.map(|x| x.0)),
            opt(rates.map(|x| x.1)),
        ])?;
    }
    w.flush()?;

    let bins = config.performance.histogram_bins;
    let mut hist = csv_writer(&output_file(config, "performance/rate_histogram.csv")?)?;
    hist.write_record(["metric", "group", "bin", "lo", "hi", "count"])?;
    let mut summary = csv_writer(&output_file(config, "performance/rate_summary.csv")?)?;
    summary.write_record(["metric", "group", "n", "median", "mean"])?;
    for (m, name) in ["like_rate", "comment_rate"].iter().enumerate() {
        let pick = |v: &(Vec<f64>, Vec<f64>)| if m == 0 { v.0.clone() } else { v.1.clone() };
        let max = by_group
            .values()
            .flat_map(pick)
            .fold(0.0f64, f64::max);
        let width = if max > 0.0 { max / bins as f64 } else { 1.0 };
        for (group, v) in &by_group {
            let values = pick(v);
            let mut counts = vec![0usize; bins];
            for x in &values {
                counts[((x / width) as usize).min(bins - 1)] += 1;
            }
            for (b, c) in counts.iter().enumerate() {
                hist.write_record([
                    name.to_string(),
                    group.to_string(),
                    b.to_string(),
                    (b as f64 * width).to_string(),
                    ((b + 1) as f64 * width).to_string(),
                    c.to_string(),
                ])?;
            }
            let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
            summary.write_record([
                name.to_string(),
                group.to_string(),
                values.len().to_string(),
                opt(median(values)),
                mean.to_string(),
            ])?;
        }
    }
    hist.flush()?;
    summary.flush()?;

    // Feature against metric, within (group, event, theme).
    let features = read_features(config)?;
    let themes = read_assignments(config)?;
    let names: Vec<&str> = config.performance.metrics.iter().map(String::as_str).collect();
    let observations: Vec<MetricObservation> = records
        .iter()
        .filter_map(|r| {
            Some(MetricObservation {
                stratum: Stratum {
                    group: r.group.clone(),
                    event: r.event.clone(),
                    theme: themes.get(&r.image_id)?.clone(),
                },
                features: features.get(&r.image_id)?,
                metrics: names.iter().map(|n| metric(r, n)).collect(),
            })
        })
        .collect();
    let rows = correlate_metrics(&observations, &names).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut w = csv_writer(&output_file(config, "performance/correlations.csv")?)?;
    w.write_record(["metric", "group", "event", "theme", "feature", "n", "rho", "p", "significant", "insufficient"])?;
    for row in &rows {
        let significant = row.result.is_some_and(|r| r.p < config.compare.alpha);
        w.write_record([
            row.metric.clone(),
            row.stratum.group.clone(),
            row.stratum.event.clone(),
            row.stratum.theme.clone(),
            row.feature.clone(),
            row.n.to_string(),
            opt(row.result.map(|r| r.rho)),
            opt(row.result.map(|r| r.p)),
            significant.to_string(),
            row.insufficient.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(PerformanceSummary {
        fits,
        correlations: rows.len(),
    })
}

/// log10 views against log10 rank, one line per stratum.
fn powerlaw_chart(strata: &BTreeMap<(String, String), Vec<u64>>) -> String {
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let series: Vec<(String, Vec<(f64, f64)>)> = strata
        .iter()
        .map(|((g, e), views)| {
            let mut v: Vec<u64> = views.iter().copied().filter(|&x| x > 0).collect();
            v.sort_unstable_by(|a, b| b.cmp(a));
            let pts = v
                .iter()
                .enumerate()
                .map(|(i, &x)| (((i + 1) as f64).log10(), (x as f64).log10()))
                .collect();
            (format!("{g} / {e}"), pts)
        })
        .collect();
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (xmax, ymax) = all.fold((1e-9f64, 1e-9f64), |(a, b), &(x, y)| (a.max(x), b.max(y)));
    let mut svg = Svg::new(w, h);
    svg.line(pad, h - pad, w - 20.0, h - pad, "#000000");
    svg.line(pad, 20.0, pad, h - pad, "#000000");
    svg.text(w / 2.0, h - 20.0, 12.0, "middle", "log10 view rank");
    svg.text(16.0, h / 2.0, 12.0, "middle", "log10 views");
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let scaled: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(x, y)| (pad + x / xmax * (w - pad - 20.0), h - pad - y / ymax * (h - pad - 20.0)))
            .collect();
        svg.polyline(&scaled, color);
        svg.text(w - 160.0, 30.0 + 16.0 * i as f64, 11.0, "start", label);
        svg.rect(w - 175.0, 21.0 + 16.0 * i as f64, 10.0, 10.0, color, None);
    }
    svg.finish()
}
