use super::PlaneImage;

/// Bilinear resampling with pixel-center alignment and clamped borders.
///
/// The sample grid is symmetric under mirroring, so resizing commutes with
/// horizontal/vertical flips up to rounding. Resizing to the same size is the
/// identity.
pub fn resize_bilinear(src: &PlaneImage, width: usize, height: usize) -> PlaneImage {
    if src.width == width && src.height == height {
        return src.clone();
    }
    let axis = |out_len: usize, in_len: usize| -> Vec<(usize, usize, f64)> {
        let scale = in_len as f64 / out_len as f64;
        (0..out_len)
            .map(|i| {
                let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (in_len - 1) as f64);
                let i0 = pos.floor() as usize;
                let i1 = (i0 + 1).min(in_len - 1);
                (i0, i1, pos - i0 as f64)
            })
            .collect()
    };
    let xs = axis(width, src.width);
    let ys = axis(height, src.height);
    let mut data = Vec::with_capacity(width * height);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = src.get(x0, y0) * (1.0 - fx) + src.get(x1, y0) * fx;
            let bottom = src.get(x0, y1) * (1.0 - fx) + src.get(x1, y1) * fx;
            data.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    PlaneImage::new(width, height, data)
}
