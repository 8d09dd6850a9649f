//! Color, Dimension and Lightness groups.

use crate::imgcore::{to_hsv, to_lab, ImageBuffer};

/// Number of histogram bins used by both entropy features.
pub const ENTROPY_BINS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorFeatures {
    pub hue: f64,
    pub saturation: f64,
    pub lab_a: f64,
    pub lab_b: f64,
    pub color_entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightnessFeatures {
    pub contrast: f64,
    pub luminance: f64,
    pub luminance_entropy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionFeatures {
    pub aspect_ratio: f64,
    pub image_size: f64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
    var.sqrt()
}

/// Base-2 Shannon entropy of a 256-bin histogram of `values` over `[lo, hi]`.
/// Values at `hi` fall in the last bin; `0 · log 0 = 0`.
pub fn histogram_entropy(values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut counts = [0u64; ENTROPY_BINS];
    let scale = ENTROPY_BINS as f64 / (hi - lo);
    for &v in values {
        let bin = (((v - lo) * scale).floor().max(0.0) as usize).min(ENTROPY_BINS - 1);
        counts[bin] += 1;
    }
    let total = values.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    // a single occupied bin yields -0.0
    h.max(0.0)
}

pub fn color_features(img: &ImageBuffer) -> ColorFeatures {
    let (h, s, _) = to_hsv(img);
    let (_, a, b) = to_lab(img);
    ColorFeatures {
        hue: mean(&h.data),
        saturation: mean(&s.data),
        lab_a: mean(&a.data),
        lab_b: mean(&b.data),
        color_entropy: histogram_entropy(&h.data, 0.0, 1.0),
    }
}

pub fn lightness_features(img: &ImageBuffer) -> LightnessFeatures {
    let (l, _, _) = to_lab(img);
    LightnessFeatures {
        contrast: std_dev(&l.data),
        luminance: mean(&l.data),
        luminance_entropy: histogram_entropy(&l.data, 0.0, 100.0),
    }
}

pub fn dimension_features(img: &ImageBuffer) -> DimensionFeatures {
    DimensionFeatures {
        aspect_ratio: img.width() as f64 / img.height() as f64,
        image_size: (img.width() + img.height()) as f64,
    }
}
