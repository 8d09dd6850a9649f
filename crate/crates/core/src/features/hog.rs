//! Histogram-of-oriented-gradients texture statistics.
//!
//! Gradients are taken on the L*, a* and b* planes with central differences
//! (one-sided on the border). Each pixel keeps the strongest channel. The
//! image is split into an 8×8 grid of cells, each holding a 16-bin unsigned
//! orientation histogram of gradient magnitude over `[0°, 180°)`.

use crate::imgcore::{to_lab, ImageBuffer, PlaneImage};

use super::FeatureError;

pub const GRID_CELLS: usize = 8;
pub const ORIENTATION_BINS: usize = 16;
const BIN_WIDTH_DEG: f64 = 180.0 / ORIENTATION_BINS as f64;

/// Per-pixel gradient magnitude and unsigned orientation in degrees.
///
/// `orientation` is meaningful only where `magnitude > 0`; it is stored as 0
/// elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub magnitude: Vec<f64>,
    pub orientation: Vec<f64>,
}

/// `rows × cols` cells of `ORIENTATION_BINS` magnitude sums each.
#[derive(Debug, Clone, PartialEq)]
pub struct CellHistogramGrid {
    pub rows: usize,
    pub cols: usize,
    pub bins: Vec<[f64; ORIENTATION_BINS]>,
}

impl CellHistogramGrid {
    pub fn cell(&self, row: usize, col: usize) -> &[f64; ORIENTATION_BINS] {
        &self.bins[row * self.cols + col]
    }

    pub fn total(&self) -> f64 {
        self.bins.iter().flat_map(|b| b.iter()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HogFeatures {
    pub self_similarity: f64,
    pub complexity: f64,
    pub anisotropy: f64,
}

#[inline]
fn diff(plane: &PlaneImage, x: usize, y: usize) -> (f64, f64) {
    let (w, h) = (plane.width, plane.height);
    let gx = if x == 0 {
        plane.get(1, y) - plane.get(0, y)
    } else if x == w - 1 {
        plane.get(w - 1, y) - plane.get(w - 2, y)
    } else {
        0.5 * (plane.get(x + 1, y) - plane.get(x - 1, y))
    };
    let gy = if y == 0 {
        plane.get(x, 1) - plane.get(x, 0)
    } else if y == h - 1 {
        plane.get(x, h - 1) - plane.get(x, h - 2)
    } else {
        0.5 * (plane.get(x, y + 1) - plane.get(x, y - 1))
    };
    (gx, gy)
}

/// Unsigned orientation of `(gx, gy)` folded into `[0, 180)`.
#[inline]
pub fn fold_orientation(gx: f64, gy: f64) -> f64 {
    let deg = gy.atan2(gx).to_degrees();
    let folded = if deg < 0.0 { deg + 180.0 } else { deg };
    if folded >= 180.0 {
        folded - 180.0
    } else {
        folded
    }
}

/// Gradient field of three planes, keeping the channel of largest magnitude
/// (first channel wins ties).
pub fn gradient_field_from_planes(planes: [&PlaneImage; 3]) -> Result<GradientField, FeatureError> {
    let (w, h) = (planes[0].width, planes[0].height);
    if w < 3 || h < 3 {
        return Err(FeatureError::TooSmall {
            width: w,
            height: h,
            min: 3,
        });
    }
    let mut magnitude = Vec::with_capacity(w * h);
    let mut orientation = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut best = (0.0f64, 0.0f64, 0.0f64);
            for plane in planes {
                let (gx, gy) = diff(plane, x, y);
                let g = gx.hypot(gy);
                if g > best.0 {
                    best = (g, gx, gy);
                }
            }
            let (g, gx, gy) = best;
            magnitude.push(g);
            orientation.push(if g > 0.0 { fold_orientation(gx, gy) } else { 0.0 });
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        magnitude,
        orientation,
    })
}

pub fn gradient_field(img: &ImageBuffer) -> Result<GradientField, FeatureError> {
    let (l, a, b) = to_lab(img);
    gradient_field_from_planes([&l, &a, &b])
}

#[inline]
pub fn orientation_bin(theta_deg: f64) -> usize {
    ((theta_deg / BIN_WIDTH_DEG) as usize).min(ORIENTATION_BINS - 1)
}

/// Accumulates magnitudes into the fixed cell grid with hard binning.
pub fn cell_histograms(field: &GradientField) -> CellHistogramGrid {
    let (rows, cols) = (GRID_CELLS, GRID_CELLS);
    let mut bins = vec![[0.0; ORIENTATION_BINS]; rows * cols];
    for y in 0..field.height {
        let row = y * rows / field.height;
        for x in 0..field.width {
            let i = y * field.width + x;
            let g = field.magnitude[i];
            if g > 0.0 {
                let col = x * cols / field.width;
                bins[row * cols + col][orientation_bin(field.orientation[i])] += g;
            }
        }
    }
    CellHistogramGrid { rows, cols, bins }
}

/// L1-normalized copy; `None` for an empty (zero-mass) histogram.
fn normalize(h: &[f64; ORIENTATION_BINS]) -> Option<[f64; ORIENTATION_BINS]> {
    let sum: f64 = h.iter().sum();
    (sum > 0.0).then(|| h.map(|v| v / sum))
}

fn intersection(a: &Option<[f64; ORIENTATION_BINS]>, b: &Option<[f64; ORIENTATION_BINS]>) -> f64 {
    match (a, b) {
        (None, None) => 1.0,
        (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| x.min(*y)).sum(),
        _ => 0.0,
    }
}

fn bin_std(h: &Option<[f64; ORIENTATION_BINS]>) -> f64 {
    match h {
        None => 0.0,
        Some(h) => {
            let n = ORIENTATION_BINS as f64;
            let mean = h.iter().sum::<f64>() / n;
            (h.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
        }
    }
}

pub fn hog_features(field: &GradientField) -> HogFeatures {
    let grid = cell_histograms(field);
    let normalized: Vec<_> = grid.bins.iter().map(normalize).collect();
    let (rows, cols) = (grid.rows as isize, grid.cols as isize);

    let mut similarity_sum = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let here = &normalized[(r * cols + c) as usize];
            let mut sum = 0.0;
            let mut count = 0usize;
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (nr, nc) = (r + dr, c + dc);
                    if (dr, dc) == (0, 0) || nr < 0 || nc < 0 || nr >= rows || nc >= cols {
                        continue;
                    }
                    sum += intersection(here, &normalized[(nr * cols + nc) as usize]);
                    count += 1;
                }
            }
            similarity_sum += sum / count as f64;
        }
    }
    let cells = normalized.len() as f64;

    HogFeatures {
        self_similarity: similarity_sum / cells,
        complexity: field.magnitude.iter().sum::<f64>() / field.magnitude.len() as f64,
        anisotropy: normalized.iter().map(bin_std).sum::<f64>() / cells,
    }
}
