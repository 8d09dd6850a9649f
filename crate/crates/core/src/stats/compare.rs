use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{normalized_diff, welch_t, StatsError};
use crate::features::{FEATURE_COUNT, FEATURE_NAMES};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// One image as seen by the group comparison.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub group: &'a str,
    pub theme: &'a str,
    pub features: &'a [f64; FEATURE_COUNT],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// Both groups constant with different means.
    Degenerate,
    /// A group has fewer than two images in this theme.
    Insufficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub feature: String,
    pub theme: String,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: Option<f64>,
    pub mean_b: Option<f64>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub normalized_diff: Option<f64>,
    pub significant: bool,
    /// Group with the larger mean; `None` for ties or missing data.
    pub larger_group: Option<String>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMatrix {
    pub group_a: String,
    pub group_b: String,
    pub alpha: f64,
    pub themes: Vec<String>,
    /// Ordered by feature, then theme.
    pub cells: Vec<ComparisonCell>,
}

impl ComparisonMatrix {
    pub fn cell(&self, feature: &str, theme: &str) -> Option<&ComparisonCell> {
        self.cells.iter().find(|c| c.feature == feature && c.theme == theme)
    }

    pub fn significant_count(&self) -> usize {
        self.cells.iter().filter(|c| c.significant).count()
    }

    /// Fraction of themes with a usable comparison whose larger group is the
    /// feature's majority. `None` when no theme has one.
    pub fn consistency(&self, feature: &str) -> Option<f64> {
        let mut a = 0usize;
        let mut b = 0usize;
        for c in self.cells.iter().filter(|c| c.feature == feature && c.status != CellStatus::Insufficient) {
            match c.larger_group.as_deref() {
                Some(g) if g == self.group_a => a += 1,
                Some(_) => b += 1,
                None => {}
            }
        }
        let valid = self
            .cells
            .iter()
            .filter(|c| c.feature == feature && c.status != CellStatus::Insufficient)
            .count();
        (valid > 0).then(|| a.max(b) as f64 / valid as f64)
    }
}

/// Welch test of every feature between the two groups, within every theme.
///
/// Exactly two groups must be present. `group_a` defaults to the
/// lexicographically first.
pub fn compare_matrix(
    observations: &[Observation],
    group_a: Option<&str>,
    alpha: f64,
) -> Result<ComparisonMatrix, StatsError> {
    let groups: BTreeSet<&str> = observations.iter().map(|o| o.group).collect();
    if groups.len() != 2 {
        return Err(StatsError::Groups(groups.iter().map(|g| g.to_string()).collect()));
    }
    let mut ordered: Vec<&str> = groups.into_iter().collect();
    if let Some(a) = group_a {
        if !ordered.contains(&a) {
            return Err(StatsError::UnknownGroup(a.to_string()));
        }
        if ordered[0] != a {
            ordered.swap(0, 1);
        }
    }
    let (ga, gb) = (ordered[0], ordered[1]);

    type Rows<'r> = Vec<&'r [f64; FEATURE_COUNT]>;
    // theme -> (group a rows, group b rows)
    let mut by_theme: BTreeMap<&str, (Rows, Rows)> = BTreeMap::new();
    for o in observations {
        let entry = by_theme.entry(o.theme).or_default();
        if o.group == ga {
            entry.0.push(o.features);
        } else {
            entry.1.push(o.features);
        }
    }
    let themes: Vec<String> = by_theme.keys().map(|t| t.to_string()).collect();

    let mut cells = Vec::with_capacity(FEATURE_COUNT * themes.len());
    for (f, name) in FEATURE_NAMES.iter().enumerate() {
        for (theme, (rows_a, rows_b)) in &by_theme {
            let a: Vec<f64> = rows_a.iter().map(|r| r[f]).collect();
            let b: Vec<f64> = rows_b.iter().map(|r| r[f]).collect();
            let mut cell = ComparisonCell {
                feature: name.to_string(),
                theme: theme.to_string(),
                n_a: a.len(),
                n_b: b.len(),
                mean_a: None,
                mean_b: None,
                t: None,
                p: None,
                normalized_diff: None,
                significant: false,
                larger_group: None,
                status: CellStatus::Insufficient,
            };
            if a.len() >= 2 && b.len() >= 2 {
                let r = welch_t(&a, &b)?;
                cell.mean_a = Some(r.mean_a);
                cell.mean_b = Some(r.mean_b);
                cell.t = Some(r.t);
                cell.p = Some(r.p);
                cell.normalized_diff = normalized_diff(r.mean_a, r.mean_b);
                cell.significant = r.p < alpha;
                cell.larger_group = if r.mean_a > r.mean_b {
                    Some(ga.to_string())
                } else if r.mean_b > r.mean_a {
                    Some(gb.to_string())
                } else {
                    None
                };
                cell.status = if r.degenerate { CellStatus::Degenerate } else { CellStatus::Ok };
            }
            cells.push(cell);
        }
    }
    Ok(ComparisonMatrix {
        group_a: ga.to_string(),
        group_b: gb.to_string(),
        alpha,
        themes,
        cells,
    })
}
