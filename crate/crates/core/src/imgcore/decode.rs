use std::io::{self, BufRead, Cursor, Read, Seek, SeekFrom};

use image::ImageFormat;

use super::{ImageBuffer, ImageError};

/// Tracks the furthest byte the decoder pulled from the stream, which is
/// where a malformed stream is reported to have failed.
struct HighWaterReader<'a> {
    inner: Cursor<&'a [u8]>,
    high_water: u64,
}

impl HighWaterReader<'_> {
    fn bump(&mut self) {
        self.high_water = self.high_water.max(self.inner.position());
    }
}

impl Read for HighWaterReader<'_> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.bump();
        Ok(n)
    }
}

impl BufRead for HighWaterReader<'_> {
    fn fill_buf(&mut self) -> io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        self.inner.consume(amt);
        self.bump();
    }
}

impl Seek for HighWaterReader<'_> {
    fn seek(&mut self, pos: SeekFrom) -> io::Result<u64> {
        self.inner.seek(pos)
    }
}

/// Decodes a JPEG or PNG stream into an sRGB buffer.
pub fn decode(bytes: &[u8]) -> Result<ImageBuffer, ImageError> {
    let format = image::guess_format(bytes).map_err(|_| {
        if bytes.is_empty() {
            ImageError::Decode {
                offset: 0,
                message: "empty stream".into(),
            }
        } else {
            ImageError::UnsupportedFormat
        }
    })?;
    if !matches!(format, ImageFormat::Jpeg | ImageFormat::Png) {
        return Err(ImageError::UnsupportedFormat);
    }

    let mut reader = HighWaterReader {
        inner: Cursor::new(bytes),
        high_water: 0,
    };
    let decoded = image::load(&mut reader, format);
    let high_water = reader.high_water;
    let img = decoded.map_err(|e| ImageError::Decode {
        offset: high_water,
        message: e.to_string(),
    })?;

    // The JPEG decoder pads missing scan data instead of failing, so a
    // stream cut before its end-of-image marker is rejected here.
    if format == ImageFormat::Jpeg && !jpeg_terminated(bytes) {
        return Err(ImageError::Decode {
            offset: bytes.len() as u64,
            message: "JPEG stream ends before end-of-image marker".into(),
        });
    }

    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| p.0).collect();
    ImageBuffer::new(w, h, pixels)
}

/// True when an EOI marker follows the first start-of-scan marker. 0xFF
/// bytes inside entropy-coded data are always stuffed, so the pair cannot
/// occur there by accident.
fn jpeg_terminated(bytes: &[u8]) -> bool {
    let Some(sos) = bytes.windows(2).position(|w| w == [0xFF, 0xDA]) else {
        return false;
    };
    bytes[sos..].windows(2).any(|w| w == [0xFF, 0xD9])
}
