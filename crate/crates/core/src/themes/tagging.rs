use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ThemeError, ThemeModel};

pub const TAGS_PER_CLUSTER: usize = 5;
pub const DEFAULT_UBIQUITY_CAP: f64 = 0.5;

/// How cluster tags are chosen. Serialized as the integers 1, 2, 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TaggingMethod {
    /// Most frequent tags in the cluster.
    Frequency = 1,
    /// Most frequent tags after dropping tags common across the whole corpus.
    #[default]
    ExcludeUbiquitous = 2,
    /// Highest tf-idf weight, with clusters as documents.
    TfIdf = 3,
}

impl TryFrom<u8> for TaggingMethod {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(Self::Frequency),
            2 => Ok(Self::ExcludeUbiquitous),
            3 => Ok(Self::TfIdf),
            other => Err(format!("tagging method must be 1, 2 or 3, got {other}")),
        }
    }
}

impl From<TaggingMethod> for u8 {
    fn from(m: TaggingMethod) -> u8 {
        m as u8
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagWeight {
    pub tag: String,
    pub cluster: usize,
    /// Images in the cluster carrying the tag.
    pub tf: usize,
    /// Clusters in which the tag occurs at least once.
    pub df: usize,
    pub n_clusters: usize,
    pub weight: f64,
}

/// Per-cluster image counts for every tag, keyed by tag.
fn cluster_counts(
    model: &ThemeModel,
    image_tags: &BTreeMap<String, Vec<String>>,
) -> Result<Vec<BTreeMap<String, usize>>, ThemeError> {
    let mut counts = vec![BTreeMap::new(); model.k];
    for (id, &c) in &model.assignment {
        let tags = image_tags.get(id).ok_or_else(|| ThemeError::MissingTags(id.clone()))?;
        let unique: BTreeSet<&String> = tags.iter().collect();
        for tag in unique {
            *counts[c].entry(tag.clone()).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// tf-idf weight `tf · ln(N / df)` of every tag occurring in every cluster,
/// ordered by cluster, then descending weight, then tag.
pub fn tag_weights(
    model: &ThemeModel,
    image_tags: &BTreeMap<String, Vec<String>>,
) -> Result<Vec<TagWeight>, ThemeError> {
    let counts = cluster_counts(model, image_tags)?;
    Ok(weights_from_counts(&counts))
}

fn weights_from_counts(counts: &[BTreeMap<String, usize>]) -> Vec<TagWeight> {
    let n = counts.len();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for cluster in counts {
        for tag in cluster.keys() {
            *df.entry(tag).or_insert(0) += 1;
        }
    }
    let mut out = Vec::new();
    for (c, cluster) in counts.iter().enumerate() {
        let mut rows: Vec<TagWeight> = cluster
            .iter()
            .map(|(tag, &tf)| {
                let d = df[tag.as_str()];
                TagWeight {
                    tag: tag.clone(),
                    cluster: c,
                    tf,
                    df: d,
                    n_clusters: n,
                    // Exactly zero when the tag is in every cluster.
                    weight: if d == n { 0.0 } else { tf as f64 * (n as f64 / d as f64).ln() },
                }
            })
            .collect();
        rows.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.tag.cmp(&b.tag)));
        out.extend(rows);
    }
    out
}

fn top_by_count<'a>(counts: impl Iterator<Item = (&'a String, usize)>, n: usize) -> Vec<String> {
    let mut v: Vec<(&String, usize)> = counts.collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    v.into_iter().take(n).map(|(t, _)| t.clone()).collect()
}

/// Fills `model.tags` with up to five tags per cluster.
///
/// Method 2 pads a cluster that has fewer than five non-ubiquitous tags with
/// the most frequent ubiquitous ones. Method 3 never pads with zero-weight
/// tags. Any cluster that ends up padded or short is flagged in
/// `model.tag_flags`.
pub fn tag_clusters(
    mut model: ThemeModel,
    image_tags: &BTreeMap<String, Vec<String>>,
    method: TaggingMethod,
    ubiquity_cap: f64,
) -> Result<ThemeModel, ThemeError> {
    let counts = cluster_counts(&model, image_tags)?;
    let mut tags = Vec::with_capacity(model.k);
    let mut flags = Vec::with_capacity(model.k);
    match method {
        TaggingMethod::Frequency => {
            for cluster in &counts {
                let top = top_by_count(cluster.iter().map(|(t, &n)| (t, n)), TAGS_PER_CLUSTER);
                flags.push(top.len() < TAGS_PER_CLUSTER);
                tags.push(top);
            }
        }
        TaggingMethod::ExcludeUbiquitous => {
            let total = model.assignment.len() as f64;
            let mut corpus: BTreeMap<&String, usize> = BTreeMap::new();
            for cluster in &counts {
                for (t, &n) in cluster {
                    *corpus.entry(t).or_insert(0) += n;
                }
            }
            let ubiquitous = |t: &String| corpus[t] as f64 >= ubiquity_cap * total;
            for cluster in &counts {
                let mut top = top_by_count(
                    cluster.iter().filter(|(t, _)| !ubiquitous(t)).map(|(t, &n)| (t, n)),
                    TAGS_PER_CLUSTER,
                );
                let padded = top.len() < TAGS_PER_CLUSTER;
                if padded {
                    let missing = TAGS_PER_CLUSTER - top.len();
                    top.extend(top_by_count(
                        cluster.iter().filter(|(t, _)| ubiquitous(t)).map(|(t, &n)| (t, n)),
                        missing,
                    ));
                }
                flags.push(padded);
                tags.push(top);
            }
        }
        TaggingMethod::TfIdf => {
            let weights = weights_from_counts(&counts);
            for c in 0..model.k {
                let top: Vec<String> = weights
                    .iter()
                    .filter(|w| w.cluster == c && w.weight > 0.0)
                    .take(TAGS_PER_CLUSTER)
                    .map(|w| w.tag.clone())
                    .collect();
                flags.push(top.len() < TAGS_PER_CLUSTER);
                tags.push(top);
            }
        }
    }
    model.tags = tags;
    model.tag_flags = flags;
    model.method = Some(method);
    Ok(model)
}
