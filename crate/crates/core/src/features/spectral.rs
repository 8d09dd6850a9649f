//! Fourier slope and sigma of the radially averaged power spectrum.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::imgcore::{resize_bilinear, to_lab, ImageBuffer, PlaneImage};

use super::FeatureError;

/// Side of the square the L* plane is resampled to before the transform.
pub const SPECTRUM_SIDE: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralOptions {
    /// Resample to `SPECTRUM_SIDE`² first. Off means the transform runs on
    /// the cropped image as-is.
    pub resize: bool,
    /// Inclusive radius range, in cycles per image, used by the line fit.
    pub fit_range: (f64, f64),
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            resize: true,
            fit_range: (10.0, 256.0),
        }
    }
}

/// Mean log10 power per integer radius, radii `1..=max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSpectrum {
    pub radii: Vec<f64>,
    pub log_power: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierFeatures {
    pub slope: f64,
    pub sigma: f64,
}

/// Minimum number of finite annuli the fit accepts.
pub const MIN_FIT_POINTS: usize = 10;

fn fft2_power(plane: &PlaneImage) -> Vec<f64> {
    let (w, h) = (plane.width, plane.height);
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex<f64>> = plane.data.iter().map(|&v| Complex::new(v, 0.0)).collect();

    let row_fft = planner.plan_fft_forward(w);
    for row in buf.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(h);
    let mut column = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            column[y] = buf[y * w + x];
        }
        col_fft.process(&mut column);
        for y in 0..h {
            buf[y * w + x] = column[y];
        }
    }
    buf.iter().map(|c| c.norm_sqr()).collect()
}

#[inline]
fn signed_freq(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// Radial spectrum of a luminance plane: mean subtraction, 2-D DFT, power,
/// then averaging over annuli of integer radius around DC.
pub fn radial_spectrum_of_plane(plane: &PlaneImage, opts: &SpectralOptions) -> Result<RadialSpectrum, FeatureError> {
    let resampled;
    let plane = if opts.resize {
        resampled = resize_bilinear(plane, SPECTRUM_SIDE, SPECTRUM_SIDE);
        &resampled
    } else {
        plane
    };
    let (w, h) = (plane.width, plane.height);
    let mean = plane.mean();
    let centered = plane.map(|v| v - mean);
    let variance = centered.data.iter().map(|v| v * v).sum::<f64>() / centered.data.len() as f64;
    if variance < 1e-10 {
        return Err(FeatureError::DegenerateSpectrum);
    }

    let power = fft2_power(&centered);
    let max_radius = w.min(h) / 2;
    let mut sums = vec![0.0; max_radius + 1];
    let mut counts = vec![0usize; max_radius + 1];
    for v in 0..h {
        let fy = signed_freq(v, h);
        for u in 0..w {
            let fx = signed_freq(u, w);
            let r = fx.hypot(fy).round() as usize;
            if (1..=max_radius).contains(&r) {
                sums[r] += power[v * w + u];
                counts[r] += 1;
            }
        }
    }
    let mut radii = Vec::with_capacity(max_radius);
    let mut log_power = Vec::with_capacity(max_radius);
    for r in 1..=max_radius {
        radii.push(r as f64);
        log_power.push(if counts[r] > 0 {
            (sums[r] / counts[r] as f64).log10()
        } else {
            f64::NEG_INFINITY
        });
    }
    Ok(RadialSpectrum { radii, log_power })
}

pub fn radial_spectrum(img: &ImageBuffer, opts: &SpectralOptions) -> Result<RadialSpectrum, FeatureError> {
    let (l, _, _) = to_lab(img);
    radial_spectrum_of_plane(&l, opts)
}

/// Least-squares line through `(log10 r, log10 P)` over the fit range:
/// slope and RMS residual.
pub fn fourier_features(spec: &RadialSpectrum, fit_range: (f64, f64)) -> Result<FourierFeatures, FeatureError> {
    let points: Vec<(f64, f64)> = spec
        .radii
        .iter()
        .zip(&spec.log_power)
        .filter(|(r, p)| **r >= fit_range.0 && **r <= fit_range.1 && p.is_finite())
        .map(|(r, p)| (r.log10(), *p))
        .collect();
    if points.len() < MIN_FIT_POINTS {
        return Err(FeatureError::InsufficientFitPoints {
            found: points.len(),
            needed: MIN_FIT_POINTS,
        });
    }
    let (slope, intercept) = ols(&points);
    let sse: f64 = points
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(FourierFeatures {
        slope,
        sigma: (sse / points.len() as f64).sqrt(),
    })
}

/// Ordinary least squares `y = a + b x`; returns `(b, a)`.
pub(crate) fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}
