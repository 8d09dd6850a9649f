use super::{ImageBuffer, PlaneImage};

// sRGB (IEC 61966-2-1) primaries to CIE XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

// Reference white is taken as the image of RGB (1,1,1) under the matrix so
// that sRGB white lands exactly on L* = 100, a* = b* = 0. The row sums agree
// with the tabulated D65 white (0.95047, 1.0, 1.08883) to within 1e-6.
const WHITE: [f64; 3] = [
    RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2],
    RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2],
    RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2],
];

/// sRGB transfer function inverse for an 8-bit code value.
#[inline]
pub fn srgb_to_linear(v: u8) -> f64 {
    let c = f64::from(v) / 255.0;
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// CIE L*a*b* of one sRGB pixel.
pub fn lab_pixel(rgb: [u8; 3]) -> [f64; 3] {
    let lin = [
        srgb_to_linear(rgb[0]),
        srgb_to_linear(rgb[1]),
        srgb_to_linear(rgb[2]),
    ];
    let mut xyz = [0.0; 3];
    for (out, row) in xyz.iter_mut().zip(RGB_TO_XYZ.iter()) {
        *out = row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2];
    }
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    let l = (116.0 * fy - 16.0).clamp(0.0, 100.0);
    [l, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// HSV of one sRGB pixel, every channel in `[0, 1]`. Achromatic pixels get hue 0.
pub fn hsv_pixel(rgb: [u8; 3]) -> [f64; 3] {
    let [r, g, b] = rgb.map(|c| f64::from(c) / 255.0);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let s = if max > 0.0 { chroma / max } else { 0.0 };
    if chroma == 0.0 {
        return [0.0, s, max];
    }
    let sector = if max == r {
        ((g - b) / chroma).rem_euclid(6.0)
    } else if max == g {
        (b - r) / chroma + 2.0
    } else {
        (r - g) / chroma + 4.0
    };
    let h = sector / 6.0;
    // rem_euclid can return exactly 6.0 for tiny negative inputs
    let h = if h >= 1.0 { 0.0 } else { h };
    [h, s, max]
}

/// Rec. 601 luma in 0–255.
#[inline]
pub fn luma_601(rgb: [u8; 3]) -> f64 {
    0.299 * f64::from(rgb[0]) + 0.587 * f64::from(rgb[1]) + 0.114 * f64::from(rgb[2])
}

fn split3(img: &ImageBuffer, f: impl Fn([u8; 3]) -> [f64; 3]) -> (PlaneImage, PlaneImage, PlaneImage) {
    let n = img.pixel_count();
    let (mut p0, mut p1, mut p2) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for &px in img.pixels() {
        let [a, b, c] = f(px);
        p0.push(a);
        p1.push(b);
        p2.push(c);
    }
    let (w, h) = (img.width(), img.height());
    (PlaneImage::new(w, h, p0), PlaneImage::new(w, h, p1), PlaneImage::new(w, h, p2))
}

/// Splits an image into H, S, V planes.
pub fn to_hsv(img: &ImageBuffer) -> (PlaneImage, PlaneImage, PlaneImage) {
    split3(img, hsv_pixel)
}

/// Splits an image into L*, a*, b* planes (D65, 2° observer).
pub fn to_lab(img: &ImageBuffer) -> (PlaneImage, PlaneImage, PlaneImage) {
    split3(img, lab_pixel)
}
