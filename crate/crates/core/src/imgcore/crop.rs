use super::{luma_601, ImageBuffer, ImageError};

/// Border rows/columns with mean luma at or below this are letterboxing.
pub const DEFAULT_BAR_THRESHOLD: f64 = 12.0;

/// Smallest side a cropped thumbnail may have.
pub const MIN_SIDE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rect {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
}

impl Rect {
    fn is_empty(&self) -> bool {
        self.x0 >= self.x1 || self.y0 >= self.y1
    }
}

fn row_luma(img: &ImageBuffer, y: usize, r: &Rect) -> f64 {
    let sum: f64 = (r.x0..r.x1).map(|x| luma_601(img.get(x, y))).sum();
    sum / (r.x1 - r.x0) as f64
}

fn col_luma(img: &ImageBuffer, x: usize, r: &Rect) -> f64 {
    let sum: f64 = (r.y0..r.y1).map(|y| luma_601(img.get(x, y))).sum();
    sum / (r.y1 - r.y0) as f64
}

/// One pass: strip each border independently, rows first, then columns
/// measured over the surviving rows.
fn strip_once(img: &ImageBuffer, mut r: Rect, threshold: f64) -> Rect {
    while !r.is_empty() && row_luma(img, r.y0, &r) <= threshold {
        r.y0 += 1;
    }
    while !r.is_empty() && row_luma(img, r.y1 - 1, &r) <= threshold {
        r.y1 -= 1;
    }
    while !r.is_empty() && col_luma(img, r.x0, &r) <= threshold {
        r.x0 += 1;
    }
    while !r.is_empty() && col_luma(img, r.x1 - 1, &r) <= threshold {
        r.x1 -= 1;
    }
    r
}

/// Removes letterbox/pillarbox bars: contiguous border rows and columns whose
/// mean luma is `<= threshold`.
///
/// Passes repeat until nothing more is stripped, so the operation is
/// idempotent. Images without bars are returned unchanged.
pub fn crop_black_bars(img: &ImageBuffer, threshold: f64) -> Result<ImageBuffer, ImageError> {
    let mut rect = Rect {
        x0: 0,
        y0: 0,
        x1: img.width(),
        y1: img.height(),
    };
    loop {
        let next = strip_once(img, rect, threshold);
        if next == rect || next.is_empty() {
            rect = next;
            break;
        }
        rect = next;
    }
    let (w, h) = if rect.is_empty() {
        (0, 0)
    } else {
        (rect.x1 - rect.x0, rect.y1 - rect.y0)
    };
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(ImageError::DegenerateAfterCrop {
            width: w,
            height: h,
            min: MIN_SIDE,
        });
    }
    if w == img.width() && h == img.height() {
        return Ok(img.clone());
    }
    Ok(img.sub_image(rect.x0, rect.y0, w, h))
}
