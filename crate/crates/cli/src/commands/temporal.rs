use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use chrono::Datelike;

use super::{csv_writer, file_slug, load_corpus, output_file, read_assignments};
use crate::config::RunConfig;
use crate::error::Result;
use crate::svg::{Svg, PALETTE};

/// One cell of the monthly series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonthCount {
    pub month: String,
    pub theme: String,
    pub group: String,
    pub count: usize,
}

fn month_index(year: i32, month: u32) -> i64 {
    i64::from(year) * 12 + i64::from(month) - 1
}

fn month_label(index: i64) -> String {
    format!("{:04}-{:02}", index.div_euclid(12), index.rem_euclid(12) + 1)
}

/// Monthly image counts per theme and group, with empty months included.
pub fn cmd_temporal(config: &RunConfig) -> Result<Vec<MonthCount>> {
    let manifest = load_corpus(config)?;
    let themes = read_assignments(config)?;
    let mut counts: BTreeMap<(i64, &str, &str), usize> = BTreeMap::new();
    let mut theme_set = BTreeSet::new();
    let mut groups = BTreeSet::new();
    for r in &manifest.records {
        groups.insert(r.group.as_str());
        if let Some(t) = themes.get(&r.image_id) {
            theme_set.insert(t.as_str());
            let m = month_index(r.published_at.year(), r.published_at.month());
            *counts.entry((m, t.as_str(), r.group.as_str())).or_insert(0) += 1;
        }
    }
    let mut rows = Vec::new();
    if let (Some(first), Some(last)) = (counts.keys().map(|k| k.0).min(), counts.keys().map(|k| k.0).max()) {
        for m in first..=last {
            for &t in &theme_set {
                for &g in &groups {
                    rows.push(MonthCount {
                        month: month_label(m),
                        theme: t.to_string(),
                        group: g.to_string(),
                        count: counts.get(&(m, t, g)).copied().unwrap_or(0),
                    });
                }
            }
        }
    }

    let mut w = csv_writer(&output_file(config, "temporal/temporal.csv")?)?;
    w.write_record(["month", "theme", "group", "count"])?;
    for r in &rows {
        w.write_record([r.month.as_str(), &r.theme, &r.group, &r.count.to_string()])?;
    }
    w.flush()?;
    for &t in &theme_set {
        let chart = line_chart(t, &groups, &rows);
        fs::write(output_file(config, &format!("temporal/{}.svg", file_slug(t)))?, chart)?;
    }
    Ok(rows)
}

fn line_chart(theme: &str, groups: &BTreeSet<&str>, rows: &[MonthCount]) -> String {
    let (w, h, pad) = (640.0, 360.0, 50.0);
    let months: Vec<&str> = {
        let set: BTreeSet<&str> = rows.iter().map(|r| r.month.as_str()).collect();
        set.into_iter().collect()
    };
    let ymax = rows.iter().filter(|r| r.theme == theme).map(|r| r.count).max().unwrap_or(0).max(1) as f64;
    let xstep = (w - pad - 20.0) / (months.len().max(2) - 1) as f64;
    let mut svg = Svg::new(w, h);
    svg.text(w / 2.0, 20.0, 13.0, "middle", theme);
    svg.line(pad, h - pad, w - 20.0, h - pad, "#000000");
    svg.line(pad, 30.0, pad, h - pad, "#000000");
    svg.text(pad - 6.0, 40.0, 10.0, "end", &format!("{ymax}"));
    for (i, m) in months.iter().enumerate() {
        if months.len() <= 24 || i % 3 == 0 {
            svg.text(pad + xstep * i as f64, h - pad + 16.0, 9.0, "middle", m);
        }
    }
    for (gi, g) in groups.iter().enumerate() {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.theme == theme && r.group == *g)
            .enumerate()
            .map(|(i, r)| (pad + xstep * i as f64, h - pad - r.count as f64 / ymax * (h - pad - 40.0)))
            .collect();
        let color = PALETTE[gi % PALETTE.len()];
        svg.polyline(&pts, color);
        svg.text(w - 80.0, 40.0 + 14.0 * gi as f64, 11.0, "start", g);
        svg.rect(w - 95.0, 31.0 + 14.0 * gi as f64, 10.0, 10.0, color, None);
    }
    svg.finish()
}
