//! The 19 scalar aesthetic features.

pub mod basic;
pub mod filterbank;
pub mod hog;
pub mod spectral;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imgcore::{crop_black_bars, ImageBuffer, ImageError, DEFAULT_BAR_THRESHOLD};

pub use basic::{color_features, dimension_features, lightness_features};
pub use filterbank::{load_filter_bank, respond, sparseness_variability, symmetry_features, FilterBank, ResponseStack};
pub use hog::{gradient_field, hog_features, GradientField};
pub use spectral::{fourier_features, radial_spectrum, RadialSpectrum, SpectralOptions};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("image {width}x{height} is smaller than {min}x{min}")]
    TooSmall { width: usize, height: usize, min: usize },
    #[error("degenerate spectrum: no power at nonzero frequencies")]
    DegenerateSpectrum,
    #[error("spectrum fit needs {needed} finite points in range, found {found}")]
    InsufficientFitPoints { found: usize, needed: usize },
    #[error("filter bank format error: {0}")]
    BankFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Feature names in table order. Column order of every features file.
pub const FEATURE_NAMES: [&str; 19] = [
    "hue",
    "saturation",
    "lab_a",
    "lab_b",
    "color_entropy",
    "aspect_ratio",
    "image_size",
    "contrast",
    "luminance",
    "luminance_entropy",
    "self_similarity",
    "complexity",
    "anisotropy",
    "fourier_slope",
    "fourier_sigma",
    "symmetry_lr",
    "symmetry_ud",
    "sparseness",
    "variability",
];

pub const FEATURE_COUNT: usize = FEATURE_NAMES.len();

/// Position of `name` in [`FEATURE_NAMES`].
pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

/// The 19 scalar features of one image, in [`FEATURE_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).map(|i| self.0[i])
    }

    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.0
    }
}

/// Everything the extractor needs besides the image.
#[derive(Debug, Clone)]
pub struct ExtractorConfig {
    pub bar_threshold: f64,
    pub spectral: SpectralOptions,
    pub bank: FilterBank,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self {
            bar_threshold: DEFAULT_BAR_THRESHOLD,
            spectral: SpectralOptions::default(),
            bank: FilterBank::default_bank(),
        }
    }
}

/// Crops letterbox bars, then computes all 19 features.
pub fn extract(img: &ImageBuffer, config: &ExtractorConfig) -> Result<FeatureVector, FeatureError> {
    let img = crop_black_bars(img, config.bar_threshold)?;
    extract_cropped(&img, config)
}

/// All 19 features of an image that has already been cropped.
pub fn extract_cropped(img: &ImageBuffer, config: &ExtractorConfig) -> Result<FeatureVector, FeatureError> {
    let color = color_features(img);
    let dims = dimension_features(img);
    let light = lightness_features(img);
    let hog = hog_features(&gradient_field(img)?);
    let fourier = fourier_features(&radial_spectrum(img, &config.spectral)?, config.spectral.fit_range)?;

    let planes = filterbank::RgbPlanes::from_image(img);
    let stack = filterbank::respond_planes(&planes, &config.bank);
    let symmetry = filterbank::symmetry_with_stack(&planes, &stack, &config.bank);
    let cnn = sparseness_variability(&stack);

    Ok(FeatureVector([
        color.hue,
        color.saturation,
        color.lab_a,
        color.lab_b,
        color.color_entropy,
        dims.aspect_ratio,
        dims.image_size,
        light.contrast,
        light.luminance,
        light.luminance_entropy,
        hog.self_similarity,
        hog.complexity,
        hog.anisotropy,
        fourier.slope,
        fourier.sigma,
        symmetry.symmetry_lr,
        symmetry.symmetry_ud,
        cnn.sparseness,
        cnn.variability,
    ]))
}
