use std::fmt::Write as _;
use std::fs;

use thumbscope_core::features::FEATURE_NAMES;
use thumbscope_core::stats::{compare_matrix, CellStatus, ComparisonMatrix, Observation};

use super::{csv_writer, load_corpus, opt, output_file, read_assignments, read_features};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::svg::{diverging, Svg};

pub const COMPARE_FILE: &str = "compare.csv";

/// Welch tests of every feature between the two groups within every theme.
pub fn cmd_compare(config: &RunConfig) -> Result<ComparisonMatrix> {
    let manifest = load_corpus(config)?;
    let features = read_features(config)?;
    let themes = read_assignments(config)?;
    let observations: Vec<Observation> = manifest
        .records
        .iter()
        .filter_map(|r| {
            Some(Observation {
                group: &r.group,
                theme: themes.get(&r.image_id)?,
                features: features.get(&r.image_id)?,
            })
        })
        .collect();
    let matrix = compare_matrix(&observations, config.compare.group_a.as_deref(), config.compare.alpha)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let mut w = csv_writer(&output_file(config, COMPARE_FILE)?)?;
    w.write_record([
        "feature",
        "theme",
        "n_a",
        "n_b",
        "mean_a",
        "mean_b",
        "normalized_diff",
        "t",
        "p",
        "significant",
        "larger_group",
        "status",
    ])?;
    for c in &matrix.cells {
        let status = match c.status {
            CellStatus::Ok => "ok",
            CellStatus::Degenerate => "degenerate",
            CellStatus::Insufficient => "insufficient",
        };
        w.write_record([
            c.feature.clone(),
            c.theme.clone(),
            c.n_a.to_string(),
            c.n_b.to_string(),
            opt(c.mean_a),
            opt(c.mean_b),
            opt(c.normalized_diff),
            opt(c.t),
            opt(c.p),
            c.significant.to_string(),
            c.larger_group.clone().unwrap_or_default(),
            status.to_string(),
        ])?;
    }
    w.flush()?;

    fs::write(output_file(config, "compare.svg")?, heatmap(&matrix))?;
    fs::write(output_file(config, "compare.md")?, summary(&matrix))?;
    Ok(matrix)
}

/// Features down, themes across. Blue: group A larger, red: group B larger,
/// thick border: significant, gray: insufficient data.
fn heatmap(m: &ComparisonMatrix) -> String {
    let (cell, left, top) = (36.0, 130.0, 110.0);
    let width = left + cell * m.themes.len() as f64 + 20.0;
    let height = top + cell * FEATURE_NAMES.len() as f64 + 50.0;
    let mut svg = Svg::new(width, height);
    svg.text(
        left,
        18.0,
        13.0,
        "start",
        &format!("Blue: {} is greater. Red: {} is greater. Bold: p < {}", m.group_a, m.group_b, m.alpha),
    );
    for (j, theme) in m.themes.iter().enumerate() {
        let x = left + cell * (j as f64 + 0.5);
        svg.text(x, top - 8.0, 10.0, "middle", theme);
    }
    for (i, feature) in FEATURE_NAMES.iter().enumerate() {
        let y = top + cell * i as f64;
        svg.text(left - 6.0, y + cell * 0.6, 11.0, "end", feature);
        for (j, theme) in m.themes.iter().enumerate() {
            let x = left + cell * j as f64;
            let Some(c) = m.cell(feature, theme) else { continue };
            if c.status == CellStatus::Insufficient {
                svg.rect(x, y, cell, cell, "#bdbdbd", Some(("#ffffff", 1.0)));
                continue;
            }
            let fill = diverging(c.normalized_diff.unwrap_or(0.0) * 4.0);
            let stroke = if c.significant { ("#000000", 3.0) } else { ("#ffffff", 1.0) };
            svg.rect(x, y, cell, cell, &fill, Some(stroke));
        }
    }
    svg.text(
        left,
        height - 16.0,
        11.0,
        "start",
        &format!("{} cells, no multiple-comparison correction", m.cells.len()),
    );
    svg.finish()
}

fn summary(m: &ComparisonMatrix) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Group comparison: {} vs {}\n", m.group_a, m.group_b);
    let _ = writeln!(
        s,
        "Welch two-sample t-test per feature and theme; normalized difference = (mean_{a} - mean_{b}) / (mean_{a} + mean_{b}).\n",
        a = m.group_a,
        b = m.group_b
    );
    let _ = writeln!(s, "| feature | significant themes | consistency | majority larger group |");
    let _ = writeln!(s, "|---|---|---|---|");
    for feature in FEATURE_NAMES {
        let cells: Vec<_> = m.cells.iter().filter(|c| c.feature == feature).collect();
        let significant = cells.iter().filter(|c| c.significant).count();
        let a = cells.iter().filter(|c| c.larger_group.as_deref() == Some(&m.group_a)).count();
        let b = cells.iter().filter(|c| c.larger_group.as_deref() == Some(&m.group_b)).count();
        let majority = match a.cmp(&b) {
            std::cmp::Ordering::Greater => m.group_a.as_str(),
            std::cmp::Ordering::Less => m.group_b.as_str(),
            std::cmp::Ordering::Equal => "tie",
        };
        let consistency = m.consistency(feature).map(|c| format!("{c:.2}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(s, "| {feature} | {significant}/{} | {consistency} | {majority} |", cells.len());
    }
    let insufficient = m.cells.iter().filter(|c| c.status == CellStatus::Insufficient).count();
    let _ = writeln!(
        s,
        "\n{} of {} cells significant at alpha = {}. P-values are not corrected for the {} comparisons; about {:.1} false positives are expected by chance. {} cells lacked two images per group.",
        m.significant_count(),
        m.cells.len(),
        m.alpha,
        m.cells.len(),
        m.alpha * (m.cells.len() - insufficient) as f64,
        insufficient
    );
    s
}
