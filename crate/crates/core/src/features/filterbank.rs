//! First-layer-style filter responses: symmetry, sparseness and variability.
//!
//! A [`FilterBank`] is convolved (valid, strided) with the image resampled to
//! [`INPUT_SIDE`]², rectified, and max-pooled onto the bank's pool grid.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use crate::imgcore::{resize_bilinear, ImageBuffer, PlaneImage};

use super::FeatureError;

/// Images are resampled to this square before convolution. With the default
/// 11-px kernels at stride 4 this gives 55 positions per axis that tile the
/// input symmetrically (no leftover column on one side).
pub const INPUT_SIDE: usize = 227;

const MAGIC: &[u8; 4] = b"FBNK";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 6 * 4;

/// `n` filters of `k × k × 3` weights, stored filter-major, row-major,
/// channel-interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    n: usize,
    k: usize,
    stride: usize,
    pool_rows: usize,
    pool_cols: usize,
    weights: Vec<f64>,
}

impl FilterBank {
    /// Validates geometry and removes the per-channel mean of every filter.
    pub fn new(
        n: usize,
        k: usize,
        stride: usize,
        pool: (usize, usize),
        mut weights: Vec<f64>,
    ) -> Result<Self, FeatureError> {
        let bad = |m: String| Err(FeatureError::BankFormat(m));
        if k % 2 == 0 {
            return bad(format!("kernel size must be odd, got {k}"));
        }
        if n < 8 {
            return bad(format!("at least 8 filters required, got {n}"));
        }
        if stride == 0 || pool.0 == 0 || pool.1 == 0 {
            return bad("stride and pool grid must be positive".into());
        }
        if k > INPUT_SIDE {
            return bad(format!("kernel {k} exceeds input side {INPUT_SIDE}"));
        }
        if weights.len() != n * k * k * 3 {
            return bad(format!("expected {} weights, found {}", n * k * k * 3, weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return bad("non-finite weight".into());
        }
        let per_filter = k * k * 3;
        for filter in weights.chunks_exact_mut(per_filter) {
            for c in 0..3 {
                let mean = filter.iter().skip(c).step_by(3).sum::<f64>() / (k * k) as f64;
                filter.iter_mut().skip(c).step_by(3).for_each(|w| *w -= mean);
            }
        }
        Ok(Self {
            n,
            k,
            stride,
            pool_rows: pool.0,
            pool_cols: pool.1,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn kernel_size(&self) -> usize {
        self.k
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn pool_grid(&self) -> (usize, usize) {
        (self.pool_rows, self.pool_cols)
    }

    pub fn filter(&self, i: usize) -> &[f64] {
        let len = self.k * self.k * 3;
        &self.weights[i * len..(i + 1) * len]
    }

    /// Weight of filter `i` at kernel row `y`, column `x`, channel `c`.
    #[inline]
    pub fn weight(&self, i: usize, y: usize, x: usize, c: usize) -> f64 {
        self.filter(i)[(y * self.k + x) * 3 + c]
    }

    /// 48 Gabor filters (8 orientations × 3 wavelengths × 2 phases) on a
    /// luminance-weighted kernel plus 12 center-surround filters (3 color
    /// axes × 2 polarities × 2 scales). 11×11×3, stride 4, 24×24 pooling.
    ///
    /// Phases are ±45°, which makes the bank closed under both horizontal and
    /// vertical mirroring.
    pub fn default_bank() -> Self {
        const K: usize = 11;
        let half = (K / 2) as f64;
        let luma = [0.299, 0.587, 0.114];
        let mut weights = Vec::with_capacity(60 * K * K * 3);

        let mut push = |kernel: &[f64], channel_weights: [f64; 3]| {
            let mean = kernel.iter().sum::<f64>() / kernel.len() as f64;
            let centered: Vec<f64> = kernel.iter().map(|v| v - mean).collect();
            let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt()
                * channel_weights.iter().map(|w| w * w).sum::<f64>().sqrt();
            for v in &centered {
                for cw in channel_weights {
                    weights.push(v * cw / norm);
                }
            }
        };

        for wavelength in [2.5, 4.0, 6.5] {
            let sigma = 0.5 * wavelength;
            for o in 0..8 {
                let theta = o as f64 * PI / 8.0;
                for phase in [PI / 4.0, -PI / 4.0] {
                    let kernel: Vec<f64> = (0..K * K)
                        .map(|i| {
                            let (x, y) = ((i % K) as f64 - half, (i / K) as f64 - half);
                            let u = x * theta.cos() + y * theta.sin();
                            (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
                                * (2.0 * PI * u / wavelength + phase).cos()
                        })
                        .collect();
                    push(&kernel, luma);
                }
            }
        }

        let axes = [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, 0.0],
            [-1.0, -1.0, 2.0],
        ];
        for center_sigma in [1.0, 2.0] {
            let gauss = |s: f64| -> Vec<f64> {
                let g: Vec<f64> = (0..K * K)
                    .map(|i| {
                        let (x, y) = ((i % K) as f64 - half, (i / K) as f64 - half);
                        (-(x * x + y * y) / (2.0 * s * s)).exp()
                    })
                    .collect();
                let sum: f64 = g.iter().sum();
                g.into_iter().map(|v| v / sum).collect()
            };
            let dog: Vec<f64> = gauss(center_sigma)
                .iter()
                .zip(gauss(2.0 * center_sigma))
                .map(|(c, s)| c - s)
                .collect();
            for axis in axes {
                for polarity in [1.0, -1.0] {
                    push(&dog, axis.map(|a| a * polarity));
                }
            }
        }

        Self::new(60, K, 4, (24, 24), weights).expect("default bank is valid")
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.weights.len() * 4);
        out.extend_from_slice(MAGIC);
        for v in [VERSION, self.n as u32, self.k as u32, self.stride as u32, self.pool_rows as u32, self.pool_cols as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for &w in &self.weights {
            out.extend_from_slice(&(w as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FeatureError> {
        let bad = |m: &str| FeatureError::BankFormat(m.to_string());
        if bytes.len() < HEADER_LEN {
            return Err(bad("file shorter than header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad("bad magic"));
        }
        let field = |i: usize| {
            let at = 4 + 4 * i;
            u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize
        };
        if field(0) != VERSION as usize {
            return Err(FeatureError::BankFormat(format!("unsupported version {}", field(0))));
        }
        let (n, k, stride, rows, cols) = (field(1), field(2), field(3), field(4), field(5));
        let expected = n
            .checked_mul(k)
            .and_then(|v| v.checked_mul(k))
            .and_then(|v| v.checked_mul(3 * 4))
            .ok_or_else(|| bad("header dimensions overflow"))?;
        let body = &bytes[HEADER_LEN..];
        if body.len() != expected {
            return Err(FeatureError::BankFormat(format!(
                "expected {expected} bytes of weights, found {}",
                body.len()
            )));
        }
        let weights = body
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
            .collect();
        Self::new(n, k, stride, (rows, cols), weights)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), FeatureError> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }
}

/// Reads and validates a bank file.
pub fn load_filter_bank(path: impl AsRef<Path>) -> Result<FilterBank, FeatureError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    FilterBank::from_bytes(&bytes)
}

/// Three float planes holding RGB in `[0, 1]` (or any linear rescaling).
#[derive(Debug, Clone, PartialEq)]
pub struct RgbPlanes {
    pub planes: [PlaneImage; 3],
}

impl RgbPlanes {
    pub fn from_image(img: &ImageBuffer) -> Self {
        let chan = |c: usize| {
            PlaneImage::new(
                img.width(),
                img.height(),
                img.pixels().iter().map(|p| f64::from(p[c]) / 255.0).collect(),
            )
        };
        Self {
            planes: [chan(0), chan(1), chan(2)],
        }
    }

    pub fn width(&self) -> usize {
        self.planes[0].width
    }

    pub fn height(&self) -> usize {
        self.planes[0].height
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> Self {
        Self {
            planes: [self.planes[0].map(f), self.planes[1].map(f), self.planes[2].map(f)],
        }
    }

    pub fn flip_horizontal(&self) -> Self {
        let flip = |p: &PlaneImage| PlaneImage::from_fn(p.width, p.height, |x, y| p.get(p.width - 1 - x, y));
        Self {
            planes: [flip(&self.planes[0]), flip(&self.planes[1]), flip(&self.planes[2])],
        }
    }

    pub fn flip_vertical(&self) -> Self {
        let flip = |p: &PlaneImage| PlaneImage::from_fn(p.width, p.height, |x, y| p.get(x, p.height - 1 - y));
        Self {
            planes: [flip(&self.planes[0]), flip(&self.planes[1]), flip(&self.planes[2])],
        }
    }

    fn resized(&self, side: usize) -> Self {
        Self {
            planes: [
                resize_bilinear(&self.planes[0], side, side),
                resize_bilinear(&self.planes[1], side, side),
                resize_bilinear(&self.planes[2], side, side),
            ],
        }
    }
}

/// Rectified, pooled response maps; map-major, each `rows × cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseStack {
    pub maps: usize,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl ResponseStack {
    pub fn map(&self, i: usize) -> &[f64] {
        let len = self.rows * self.cols;
        &self.values[i * len..(i + 1) * len]
    }

    /// Per-cell maximum across maps.
    pub fn max_over_maps(&self) -> Vec<f64> {
        let len = self.rows * self.cols;
        let mut out = vec![0.0f64; len];
        for m in 0..self.maps {
            for (o, v) in out.iter_mut().zip(self.map(m)) {
                *o = o.max(*v);
            }
        }
        out
    }
}

/// Positions of valid strided windows along one axis, centered when the
/// stride leaves a remainder.
pub fn window_origins(input: usize, k: usize, stride: usize) -> Vec<usize> {
    let count = (input - k) / stride + 1;
    let offset = (input - k - (count - 1) * stride) / 2;
    (0..count).map(|i| offset + i * stride).collect()
}

/// Adaptive pooling cell `i` of `cells` over `len` inputs: `[start, end)`.
pub fn pool_span(i: usize, cells: usize, len: usize) -> (usize, usize) {
    let start = i * len / cells;
    let end = ((i + 1) * len).div_ceil(cells);
    (start, end.max(start + 1))
}

/// Four independent accumulators so the loop vectorizes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for i in 0..4 {
            acc[i] += x[i] * y[i];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Convolves the (already resampled) planes with every filter.
fn respond_resized(input: &RgbPlanes, bank: &FilterBank) -> ResponseStack {
    let side = input.width();
    let k = bank.k;
    let origins = window_origins(side, k, bank.stride);
    let out_side = origins.len();

    // Channel-interleaved copy so each window row is contiguous.
    let mut interleaved = Vec::with_capacity(side * side * 3);
    for i in 0..side * side {
        for plane in &input.planes {
            interleaved.push(plane.data[i]);
        }
    }

    let (pr, pc) = (bank.pool_rows, bank.pool_cols);
    let mut values = vec![0.0; bank.n * pr * pc];
    let mut patch = vec![0.0; k * k * 3];
    let mut conv = vec![0.0; bank.n * out_side * out_side];
    for (oy, &y0) in origins.iter().enumerate() {
        for (ox, &x0) in origins.iter().enumerate() {
            for ky in 0..k {
                let src = ((y0 + ky) * side + x0) * 3;
                patch[ky * k * 3..(ky + 1) * k * 3].copy_from_slice(&interleaved[src..src + k * 3]);
            }
            for f in 0..bank.n {
                let dot = dot(bank.filter(f), &patch);
                conv[(f * out_side + oy) * out_side + ox] = dot.max(0.0);
            }
        }
    }

    for f in 0..bank.n {
        let map = &conv[f * out_side * out_side..(f + 1) * out_side * out_side];
        for r in 0..pr {
            let (r0, r1) = pool_span(r, pr, out_side);
            for c in 0..pc {
                let (c0, c1) = pool_span(c, pc, out_side);
                let mut m = 0.0f64;
                for y in r0..r1 {
                    for x in c0..c1 {
                        m = m.max(map[y * out_side + x]);
                    }
                }
                values[(f * pr + r) * pc + c] = m;
            }
        }
    }
    ResponseStack {
        maps: bank.n,
        rows: pr,
        cols: pc,
        values,
    }
}

/// Resamples to `INPUT_SIDE`², then valid strided convolution, rectification
/// and max pooling for every filter.
pub fn respond_planes(input: &RgbPlanes, bank: &FilterBank) -> ResponseStack {
    respond_resized(&input.resized(INPUT_SIDE), bank)
}

pub fn respond(img: &ImageBuffer, bank: &FilterBank) -> ResponseStack {
    respond_planes(&RgbPlanes::from_image(img), bank)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryFeatures {
    pub symmetry_lr: f64,
    pub symmetry_ud: f64,
}

/// Summed activation below which a grid counts as empty. Responses of a flat
/// image are rounding noise around zero and would otherwise score arbitrarily.
const SILENT_PER_CELL: f64 = 1e-9;

/// `1 − Σ|a − b| / Σ max(a, b)`, with `0/0 = 1`.
pub fn symmetry_score(a: &[f64], b: &[f64]) -> f64 {
    let (mut diff, mut total) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        diff += (x - y).abs();
        total += x.max(*y);
    }
    if total <= SILENT_PER_CELL * a.len() as f64 {
        1.0
    } else {
        1.0 - diff / total
    }
}

/// Symmetry given the response of the unflipped image, so callers that also
/// need the stack avoid convolving twice.
pub fn symmetry_with_stack(input: &RgbPlanes, stack: &ResponseStack, bank: &FilterBank) -> SymmetryFeatures {
    // Compared position by position, not flipped back: with a mirror-closed
    // bank the flipped-back maxima would equal the original for every image.
    let a = stack.max_over_maps();
    let lr = respond_planes(&input.flip_horizontal(), bank).max_over_maps();
    let ud = respond_planes(&input.flip_vertical(), bank).max_over_maps();
    SymmetryFeatures {
        symmetry_lr: symmetry_score(&a, &lr),
        symmetry_ud: symmetry_score(&a, &ud),
    }
}

pub fn symmetry_planes(input: &RgbPlanes, bank: &FilterBank) -> SymmetryFeatures {
    symmetry_with_stack(input, &respond_planes(input, bank), bank)
}

pub fn symmetry_features(img: &ImageBuffer, bank: &FilterBank) -> SymmetryFeatures {
    symmetry_planes(&RgbPlanes::from_image(img), bank)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsenessVariability {
    pub sparseness: f64,
    pub variability: f64,
}

pub(crate) fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median of per-map variances, and variance of every pooled value.
pub fn sparseness_variability(stack: &ResponseStack) -> SparsenessVariability {
    let mut per_map: Vec<f64> = (0..stack.maps).map(|m| population_variance(stack.map(m))).collect();
    SparsenessVariability {
        sparseness: median(&mut per_map),
        variability: population_variance(&stack.values),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_bank_shape_and_zero_mean() {
        let bank = FilterBank::default_bank();
        assert_eq!((bank.len(), bank.kernel_size(), bank.stride(), bank.pool_grid()), (60, 11, 4, (24, 24)));
        for i in 0..bank.len() {
            for c in 0..3 {
                let mean: f64 = bank.filter(i).iter().skip(c).step_by(3).sum::<f64>() / 121.0;
                assert!(mean.abs() < 1e-6);
            }
        }
    }

    #[test]
    fn default_bank_is_mirror_closed() {
        let bank = FilterBank::default_bank();
        let k = bank.kernel_size();
        let mirrored = |i: usize, horizontal: bool| -> Vec<f64> {
            let mut out = Vec::with_capacity(k * k * 3);
            for y in 0..k {
                for x in 0..k {
                    let (sx, sy) = if horizontal { (k - 1 - x, y) } else { (x, k - 1 - y) };
                    for c in 0..3 {
                        out.push(bank.weight(i, sy, sx, c));
                    }
                }
            }
            out
        };
        for horizontal in [true, false] {
            for i in 0..bank.len() {
                let m = mirrored(i, horizontal);
                let found = (0..bank.len()).any(|j| {
                    bank.filter(j).iter().zip(&m).all(|(a, b)| (a - b).abs() < 1e-9)
                });
                assert!(found, "filter {i} has no mirror partner (horizontal={horizontal})");
            }
        }
    }

    #[test]
    fn bank_round_trips_through_bytes() {
        let bank = FilterBank::default_bank();
        let back = FilterBank::from_bytes(&bank.to_bytes()).unwrap();
        assert_eq!(back.len(), 60);
        for (a, b) in bank.weights.iter().zip(&back.weights) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    fn header(n: u32, k: u32) -> Vec<u8> {
        let mut out = b"FBNK".to_vec();
        for v in [1, n, k, 4, 24, 24u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(matches!(FilterBank::from_bytes(&[]), Err(FeatureError::BankFormat(_))));
        let mut even = header(8, 4);
        even.extend(std::iter::repeat_n(0u8, 8 * 4 * 4 * 3 * 4));
        assert!(matches!(FilterBank::from_bytes(&even), Err(FeatureError::BankFormat(_))));
        let mut wrong_magic = FilterBank::default_bank().to_bytes();
        wrong_magic[0] = b'X';
        assert!(matches!(FilterBank::from_bytes(&wrong_magic), Err(FeatureError::BankFormat(_))));
        let mut short = header(8, 3);
        short.extend([0u8; 12]);
        assert!(matches!(FilterBank::from_bytes(&short), Err(FeatureError::BankFormat(_))));
    }

    #[test]
    fn loading_enforces_zero_mean() {
        let mut bytes = header(8, 3);
        for i in 0..8 * 27 {
            bytes.extend_from_slice(&(1.0 + i as f32).to_le_bytes());
        }
        let bank = FilterBank::from_bytes(&bytes).unwrap();
        for i in 0..8 {
            for c in 0..3 {
                let m: f64 = bank.filter(i).iter().skip(c).step_by(3).sum::<f64>() / 9.0;
                assert!(m.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn window_grid_is_symmetric() {
        let o = window_origins(INPUT_SIDE, 11, 4);
        assert_eq!(o.len(), 55);
        assert_eq!(o[0], 0);
        assert_eq!(o[54] + 11, INPUT_SIDE);
        for i in 0..24 {
            let (s, e) = pool_span(i, 24, 55);
            let (ms, me) = pool_span(23 - i, 24, 55);
            assert_eq!((s, e), (55 - me, 55 - ms));
        }
    }

    #[test]
    fn constant_image_gives_zero_response() {
        let stack = respond(&ImageBuffer::filled(64, 48, [120, 30, 200]), &FilterBank::default_bank());
        assert!(stack.values.iter().all(|v| v.abs() < 1e-12));
        let s = symmetry_features(&ImageBuffer::filled(64, 48, [120, 30, 200]), &FilterBank::default_bank());
        assert_eq!((s.symmetry_lr, s.symmetry_ud), (1.0, 1.0));
    }

    #[test]
    fn matched_filter_fires_on_edge() {
        let bank = FilterBank::default_bank();
        // Vertical edge down the middle; orientation 0 Gabors vary along x.
        let img = ImageBuffer::from_fn(227, 227, |x, _| if x < 113 { [20, 20, 20] } else { [230, 230, 230] });
        let stack = respond(&img, &bank);
        let edge_map = (0..bank.len())
            .max_by(|&a, &b| {
                let sa: f64 = stack.map(a).iter().sum();
                let sb: f64 = stack.map(b).iter().sum();
                sa.total_cmp(&sb)
            })
            .unwrap();
        let map = stack.map(edge_map);
        let col_energy: Vec<f64> = (0..24).map(|c| (0..24).map(|r| map[r * 24 + c]).sum()).collect();
        let peak = col_energy.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((11..=12).contains(&peak), "peak column {peak}");
        let far: f64 = col_energy[..8].iter().chain(&col_energy[16..]).sum();
        assert!(far < 1e-9, "response away from the edge: {far}");
    }

    #[test]
    fn mirror_symmetric_image_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // Texture only in the top half, so the image is far from UD-symmetric.
        let half =
            ImageBuffer::from_fn(30, 40, |_, y| if y < 20 { [rng.random(), rng.random(), rng.random()] } else { [90, 90, 90] });
        let img = ImageBuffer::from_fn(60, 40, |x, y| if x < 30 { half.get(x, y) } else { half.get(59 - x, y) });
        let s = symmetry_features(&img, &FilterBank::default_bank());
        assert!((s.symmetry_lr - 1.0).abs() < 1e-6, "{}", s.symmetry_lr);
        assert!(s.symmetry_ud < 0.9, "{}", s.symmetry_ud);
    }

    #[test]
    fn half_white_half_black() {
        let img = ImageBuffer::from_fn(64, 64, |x, _| if x < 32 { [255, 255, 255] } else { [0, 0, 0] });
        let bank = FilterBank::default_bank();
        let s = symmetry_features(&img, &bank);
        assert!((s.symmetry_ud - 1.0).abs() < 1e-9);
        assert!(s.symmetry_lr < s.symmetry_ud);

        // Direct evaluation of the defining formula.
        let planes = RgbPlanes::from_image(&img);
        let a = respond_planes(&planes, &bank).max_over_maps();
        let f = respond_planes(&planes.flip_horizontal(), &bank).max_over_maps();
        let (mut num, mut den) = (0.0, 0.0);
        for r in 0..24 {
            for c in 0..24 {
                let x = a[r * 24 + c];
                let y = f[r * 24 + c];
                num += (x - y).abs();
                den += x.max(y);
            }
        }
        assert!((s.symmetry_lr - (1.0 - num / den)).abs() < 1e-12);
    }

    #[test]
    fn symmetry_is_flip_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let img = ImageBuffer::from_fn(50, 34, |_, _| [rng.random(), rng.random(), rng.random()]);
        let bank = FilterBank::default_bank();
        let a = symmetry_features(&img, &bank);
        let b = symmetry_features(&img.flip_horizontal(), &bank);
        assert!((a.symmetry_lr - b.symmetry_lr).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&a.symmetry_lr) && (0.0..=1.0).contains(&a.symmetry_ud));
    }

    #[test]
    fn contrast_doubling() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let img = ImageBuffer::from_fn(40, 40, |_, _| [rng.random(), rng.random(), rng.random()]);
        let bank = FilterBank::default_bank();
        let planes = RgbPlanes::from_image(&img);
        let doubled = planes.map(|v| 2.0 * v);
        let s1 = sparseness_variability(&respond_planes(&planes, &bank));
        let s2 = sparseness_variability(&respond_planes(&doubled, &bank));
        assert!((s2.sparseness - 4.0 * s1.sparseness).abs() <= 1e-6 * s2.sparseness);
        assert!((s2.variability - 4.0 * s1.variability).abs() <= 1e-6 * s2.variability);
        let y1 = symmetry_planes(&planes, &bank);
        let y2 = symmetry_planes(&doubled, &bank);
        assert!((y1.symmetry_lr - y2.symmetry_lr).abs() < 1e-6);
        assert!((y1.symmetry_ud - y2.symmetry_ud).abs() < 1e-6);
    }

    fn stack_from(maps: Vec<Vec<f64>>, rows: usize, cols: usize) -> ResponseStack {
        ResponseStack {
            maps: maps.len(),
            rows,
            cols,
            values: maps.concat(),
        }
    }

    #[test]
    fn sparseness_variability_cases() {
        let zero = stack_from(vec![vec![0.0; 16]; 10], 4, 4);
        let sv = sparseness_variability(&zero);
        assert_eq!((sv.sparseness, sv.variability), (0.0, 0.0));

        let mut maps = vec![vec![0.0; 16]; 10];
        maps[3][5] = 7.0;
        let sv = sparseness_variability(&stack_from(maps, 4, 4));
        assert_eq!(sv.sparseness, 0.0);
        // 160 values, one equal to 7: mean 7/160, E[x^2] = 49/160.
        let expected = 49.0 / 160.0 - (7.0f64 / 160.0).powi(2);
        assert!((sv.variability - expected).abs() < 1e-15);

        let maps: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64; 16]).collect();
        let sv = sparseness_variability(&stack_from(maps, 4, 4));
        assert_eq!(sv.sparseness, 0.0);
        assert!(sv.variability > 0.0);
    }
}
