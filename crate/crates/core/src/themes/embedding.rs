use std::collections::BTreeMap;

use crate::features::hog::{gradient_field, orientation_bin, ORIENTATION_BINS};
use crate::imgcore::{hsv_pixel, lab_pixel, ImageBuffer};

use super::ThemeError;

const HIST_BINS: usize = 16;

/// Length of [`fallback_embedding`] vectors.
pub const FALLBACK_DIM: usize = 4 * HIST_BINS;

/// Image id → embedding, uniform dimension, ids unique and sorted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingSet {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<(), ThemeError> {
        let id = id.into();
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(ThemeError::NonFinite(id));
        }
        if self.vectors.is_empty() {
            self.dim = vector.len();
        } else if vector.len() != self.dim {
            return Err(ThemeError::Dimension {
                id,
                expected: self.dim,
                found: vector.len(),
            });
        }
        if self.vectors.contains_key(&id) {
            return Err(ThemeError::DuplicateId(id));
        }
        self.vectors.insert(id, vector);
        Ok(())
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, ThemeError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut set = Self::new();
        for (id, v) in pairs {
            set.insert(id, v)?;
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Entries in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<f64>)> {
        self.vectors.iter()
    }

    pub fn get(&self, id: &str) -> Option<&Vec<f64>> {
        self.vectors.get(id)
    }
}

fn l1_normalize(h: &mut [f64]) {
    let sum: f64 = h.iter().sum();
    if sum > 0.0 {
        h.iter_mut().for_each(|v| *v /= sum);
    }
}

#[inline]
fn bin16(v: f64, hi: f64) -> usize {
    ((v / hi * HIST_BINS as f64) as usize).min(HIST_BINS - 1)
}

/// Model-free 64-d descriptor: 16-bin histograms of H, S, L* and gradient
/// orientation, each L1-normalized, concatenated and L2-normalized.
pub fn fallback_embedding(img: &ImageBuffer) -> Vec<f64> {
    let mut h = [0.0; HIST_BINS];
    let mut s = [0.0; HIST_BINS];
    let mut l = [0.0; HIST_BINS];
    for &px in img.pixels() {
        let [hue, sat, _] = hsv_pixel(px);
        h[bin16(hue, 1.0)] += 1.0;
        s[bin16(sat, 1.0)] += 1.0;
        l[bin16(lab_pixel(px)[0], 100.0)] += 1.0;
    }
    let mut o = [0.0; ORIENTATION_BINS];
    if let Ok(field) = gradient_field(img) {
        for (&g, &theta) in field.magnitude.iter().zip(&field.orientation) {
            if g > 0.0 {
                o[orientation_bin(theta)] += g;
            }
        }
    }
    let mut out = Vec::with_capacity(FALLBACK_DIM);
    for hist in [&mut h, &mut s, &mut l, &mut o] {
        l1_normalize(hist);
        out.extend_from_slice(hist);
    }
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|v| *v /= norm);
    }
    out
}
