use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ThemeError, ThemeModel};

/// Category label to count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalDistribution {
    pub counts: BTreeMap<String, u64>,
}

impl CategoricalDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, category: impl Into<String>, n: u64) {
        *self.counts.entry(category.into()).or_insert(0) += n;
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

impl<S: Into<String>> FromIterator<(S, u64)> for CategoricalDistribution {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut d = Self::new();
        for (c, n) in iter {
            d.add(c, n);
        }
        d
    }
}

/// Gini impurity `1 - Σ p²`.
pub fn gini(dist: &CategoricalDistribution) -> Result<f64, ThemeError> {
    let total = dist.total();
    if total == 0 {
        return Err(ThemeError::EmptyDistribution);
    }
    let t = total as f64;
    Ok(1.0 - dist.counts.values().map(|&n| (n as f64 / t).powi(2)).sum::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThemeDistribution {
    pub k: usize,
    /// Group label to images per theme.
    pub counts: BTreeMap<String, Vec<u64>>,
    /// Counts divided by the group total.
    pub proportions: BTreeMap<String, Vec<f64>>,
    /// Counts divided by the group's smallest non-zero theme count.
    pub ratios: BTreeMap<String, Vec<f64>>,
}

/// Tallies theme membership per group. Ids missing from the model are skipped.
pub fn theme_distribution<'a, I>(model: &ThemeModel, groups: I) -> ThemeDistribution
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let mut counts: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (id, group) in groups {
        if let Some(&c) = model.assignment.get(id) {
            counts.entry(group.to_string()).or_insert_with(|| vec![0; model.k])[c] += 1;
        }
    }
    let mut proportions = BTreeMap::new();
    let mut ratios = BTreeMap::new();
    for (g, row) in &counts {
        let total: u64 = row.iter().sum();
        let smallest = row.iter().copied().filter(|&n| n > 0).min().unwrap_or(1);
        proportions.insert(g.clone(), row.iter().map(|&n| n as f64 / total as f64).collect());
        ratios.insert(g.clone(), row.iter().map(|&n| n as f64 / smallest as f64).collect());
    }
    ThemeDistribution {
        k: model.k,
        counts,
        proportions,
        ratios,
    }
}
