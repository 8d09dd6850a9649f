//! Decoded thumbnails, letterbox removal and perceptual color planes.
//!
//! Every extractor in [`crate::features`] starts from an [`ImageBuffer`]:
//! row-major 8-bit sRGB triplets. Conversions produce [`PlaneImage`]s, one
//! scalar per pixel, in the channel's natural range.

mod color;
mod crop;
mod decode;
mod resize;

pub use color::{hsv_pixel, lab_pixel, luma_601, to_hsv, to_lab, srgb_to_linear};
pub use crop::{crop_black_bars, DEFAULT_BAR_THRESHOLD, MIN_SIDE};
pub use decode::decode;
pub use resize::resize_bilinear;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image decode failed at byte offset {offset}: {message}")]
    Decode { offset: u64, message: String },
    #[error("unsupported image format (only JPEG and PNG are accepted)")]
    UnsupportedFormat,
    #[error("degenerate after crop: {width}x{height} is smaller than {min}x{min}")]
    DegenerateAfterCrop { width: usize, height: usize, min: usize },
    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),
}

/// Row-major 8-bit sRGB image.
#[derive(Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidBuffer(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(ImageError::InvalidBuffer(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![rgb; width * height],
        }
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn flip_horizontal(&self) -> Self {
        Self::from_fn(self.width, self.height, |x, y| self.get(self.width - 1 - x, y))
    }

    pub fn flip_vertical(&self) -> Self {
        Self::from_fn(self.width, self.height, |x, y| self.get(x, self.height - 1 - y))
    }

    /// Rotates 90° clockwise; the result is `height` wide.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |x, y| self.get(y, h - 1 - x))
    }

    /// Copies the rectangle `[x0, x0 + w) × [y0, y0 + h)`.
    pub fn sub_image(&self, x0: usize, y0: usize, w: usize, h: usize) -> Self {
        assert!(x0 + w <= self.width && y0 + h <= self.height, "sub-image out of bounds");
        Self::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y))
    }
}

/// One scalar channel with the same geometry as its source image.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl PlaneImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane size mismatch");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Rotates 90° clockwise, matching [`ImageBuffer::rotate90`].
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |x, y| self.get(y, h - 1 - x))
    }
}
