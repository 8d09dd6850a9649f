use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EmbeddingSet, TaggingMethod, ThemeError};

const MAX_ITERATIONS: usize = 300;
const TOLERANCE: f64 = 1e-6;
const RESTARTS: u64 = 8;

/// Inclusive range of cluster counts to try.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRange {
    pub min: usize,
    pub max: usize,
}

impl KRange {
    pub fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }
}

impl Default for KRange {
    fn default() -> Self {
        Self { min: 2, max: 8 }
    }
}

/// Cluster assignment of one event corpus, plus tags once
/// [`super::tag_clusters`] has run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThemeModel {
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Mean silhouette for every k that was evaluated.
    pub silhouettes: BTreeMap<usize, f64>,
    pub tags: Vec<Vec<String>>,
    /// Clusters whose tag list had to be padded or is shorter than five.
    pub tag_flags: Vec<bool>,
    pub method: Option<TaggingMethod>,
}

impl ThemeModel {
    pub fn members(&self, cluster: usize) -> impl Iterator<Item = &str> {
        self.assignment
            .iter()
            .filter(move |(_, &c)| c == cluster)
            .map(|(id, _)| id.as_str())
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in self.assignment.values() {
            sizes[c] += 1;
        }
        sizes
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter().map(|x| x / norm).collect()
    } else {
        v.to_vec()
    }
}

struct KMeansRun {
    labels: Vec<usize>,
    centroids: Vec<Vec<f64>>,
    inertia: f64,
}

fn kmeans_pp_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..points.len())
        };
        centroids.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, centroids.last().unwrap()));
        }
    }
    centroids
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> KMeansRun {
    let dim = points[0].len();
    let mut centroids = kmeans_pp_init(points, k, rng);
    let mut labels = vec![0usize; points.len()];
    for _ in 0..MAX_ITERATIONS {
        for (label, p) in labels.iter_mut().zip(points) {
            *label = nearest(p, &centroids).0;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&label, p) in labels.iter().zip(points) {
            counts[label] += 1;
            for (s, v) in sums[label].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut shift = 0.0f64;
        for c in 0..k {
            let new = if counts[c] == 0 {
                // Re-seed an empty cluster at the point furthest from its centroid.
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        let da = sq_dist(&points[a], &centroids[labels[a]]);
                        let db = sq_dist(&points[b], &centroids[labels[b]]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .unwrap();
                labels[far] = c;
                points[far].clone()
            } else {
                sums[c].iter().map(|s| s / counts[c] as f64).collect()
            };
            shift = shift.max(sq_dist(&new, &centroids[c]).sqrt());
            centroids[c] = new;
        }
        if shift < TOLERANCE {
            break;
        }
    }
    let mut inertia = 0.0;
    for (label, p) in labels.iter_mut().zip(points) {
        let (c, d) = nearest(p, &centroids);
        *label = c;
        inertia += d;
    }
    KMeansRun {
        labels,
        centroids,
        inertia,
    }
}

/// Mean silhouette coefficient; singletons score 0. `None` unless there are
/// at least two non-empty clusters.
pub fn silhouette(points: &[Vec<f64>], labels: &[usize], k: usize) -> Option<f64> {
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let n = points.len();
    let mut total = 0.0;
    let mut dist_sums = vec![0.0; k];
    for i in 0..n {
        dist_sums.iter_mut().for_each(|d| *d = 0.0);
        for j in 0..n {
            if i != j {
                dist_sums[labels[j]] += sq_dist(&points[i], &points[j]).sqrt();
            }
        }
        let own = labels[i];
        if counts[own] <= 1 {
            continue;
        }
        let a = dist_sums[own] / (counts[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| dist_sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Some(total / n as f64)
}

fn distinct_points(points: &[Vec<f64>]) -> usize {
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    sorted.dedup();
    sorted.len()
}

/// k-means on L2-normalized embeddings for every k in range; keeps the k
/// with the highest mean silhouette (smaller k on ties).
///
/// Points are processed in ascending id order and clusters are numbered by
/// their first member in that order, so the result depends only on the set
/// of (id, vector) pairs and the seed.
pub fn cluster(embeddings: &EmbeddingSet, k_range: KRange, seed: u64) -> Result<ThemeModel, ThemeError> {
    if k_range.min < 2 || k_range.min > k_range.max {
        return Err(ThemeError::BadRange(k_range.min, k_range.max));
    }
    let needed = k_range.max * 3;
    if embeddings.len() < needed {
        return Err(ThemeError::TooFewPoints {
            needed,
            found: embeddings.len(),
            k_max: k_range.max,
        });
    }
    let ids: Vec<&String> = embeddings.iter().map(|(id, _)| id).collect();
    let points: Vec<Vec<f64>> = embeddings.iter().map(|(_, v)| normalized(v)).collect();
    let distinct = distinct_points(&points);

    let mut silhouettes = BTreeMap::new();
    let mut best: Option<(usize, f64, KMeansRun)> = None;
    for k in k_range.min..=k_range.max {
        if k > distinct {
            continue;
        }
        let mut run: Option<KMeansRun> = None;
        for restart in 0..RESTARTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 32) ^ restart);
            let candidate = lloyd(&points, k, &mut rng);
            if run.as_ref().is_none_or(|r| candidate.inertia < r.inertia - 1e-12) {
                run = Some(candidate);
            }
        }
        let run = run.expect("at least one restart");
        let Some(score) = silhouette(&points, &run.labels, k) else {
            continue;
        };
        silhouettes.insert(k, score);
        if best.as_ref().is_none_or(|(_, s, _)| score > *s + 1e-12) {
            best = Some((k, score, run));
        }
    }
    let (k, _, run) = best.ok_or(ThemeError::Degenerate)?;

    // Canonical cluster numbering: order of first appearance by id.
    let mut relabel = vec![usize::MAX; k];
    let mut next = 0;
    for &l in &run.labels {
        if relabel[l] == usize::MAX {
            relabel[l] = next;
            next += 1;
        }
    }
    // Clusters left empty after the final assignment keep trailing labels.
    for r in relabel.iter_mut().filter(|r| **r == usize::MAX) {
        *r = next;
        next += 1;
    }
    let mut centroids = vec![Vec::new(); k];
    for (old, c) in run.centroids.into_iter().enumerate() {
        centroids[relabel[old]] = c;
    }
    let assignment = ids
        .into_iter()
        .zip(&run.labels)
        .map(|(id, &l)| (id.clone(), relabel[l]))
        .collect();

    Ok(ThemeModel {
        k,
        assignment,
        centroids,
        silhouettes,
        tags: vec![Vec::new(); k],
        tag_flags: vec![false; k],
        method: None,
    })
}
