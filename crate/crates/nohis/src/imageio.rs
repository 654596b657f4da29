//! Image ingestion: PGM (P2 ascii / P5 raw) and 8-bit PNG.
//!
//! Formats are sniffed from the leading bytes, not the file name. Sample
//! values are scaled by the file's maxval into `[0, 1]`; color PNG input is
//! reduced with the 0.299/0.587/0.114 luminance weights.

use std::io;
use std::path::Path;

use nohis_core::descriptors::GrayImage;

#[derive(Debug, thiserror::Error)]
pub enum ImageIoError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image stream: {0}")]
    Corrupt(String),
    #[error("zero-area image")]
    ZeroArea,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Loads a PGM or PNG file as a normalized grayscale raster.
pub fn load_image(path: &Path) -> Result<GrayImage, ImageIoError> {
    let bytes = std::fs::read(path)?;
    load_image_bytes(&bytes)
}

pub fn load_image_bytes(bytes: &[u8]) -> Result<GrayImage, ImageIoError> {
    if bytes.is_empty() {
        return Err(ImageIoError::Corrupt("empty file".into()));
    }
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return parse_pgm(bytes);
    }
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        return load_png(bytes);
    }
    Err(ImageIoError::UnsupportedFormat(
        "expected PGM (P2/P5) or PNG".into(),
    ))
}

fn raster(width: usize, height: usize, pixels: Vec<f64>) -> Result<GrayImage, ImageIoError> {
    if width == 0 || height == 0 {
        return Err(ImageIoError::ZeroArea);
    }
    GrayImage::new(width, height, pixels).map_err(|e| ImageIoError::Corrupt(e.to_string()))
}

fn load_png(bytes: &[u8]) -> Result<GrayImage, ImageIoError> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| ImageIoError::Corrupt(e.to_string()))?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let pixels: Vec<f64> = match &decoded {
        image::DynamicImage::ImageLuma8(img) => {
            img.pixels().map(|p| f64::from(p.0[0]) / 255.0).collect()
        }
        image::DynamicImage::ImageLumaA8(img) => {
            img.pixels().map(|p| f64::from(p.0[0]) / 255.0).collect()
        }
        image::DynamicImage::ImageRgb8(img) => img.pixels().map(|p| luminance(p.0)).collect(),
        image::DynamicImage::ImageRgba8(img) => {
            img.pixels().map(|p| luminance([p.0[0], p.0[1], p.0[2]])).collect()
        }
        other => {
            return Err(ImageIoError::UnsupportedFormat(format!(
                "PNG color type {:?} (8-bit gray or RGB required)",
                other.color()
            )))
        }
    };
    raster(width, height, pixels)
}

fn luminance(rgb: [u8; 3]) -> f64 {
    (0.299 * f64::from(rgb[0]) + 0.587 * f64::from(rgb[1]) + 0.114 * f64::from(rgb[2])) / 255.0
}

struct PgmScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmScanner<'a> {
    /// Next whitespace-separated token, skipping `#` comments.
    fn token(&mut self) -> Result<&'a [u8], ImageIoError> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() {
                return Err(ImageIoError::Corrupt("unexpected end of header".into()));
            }
            if self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            let start = self.pos;
            while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            return Ok(&self.bytes[start..self.pos]);
        }
    }

    fn number(&mut self) -> Result<u64, ImageIoError> {
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageIoError::Corrupt("malformed header number".into()))
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, ImageIoError> {
    let binary = bytes.starts_with(b"P5");
    let mut scan = PgmScanner { bytes, pos: 2 };
    let width = scan.number()? as usize;
    let height = scan.number()? as usize;
    let maxval = scan.number()?;
    if maxval == 0 || maxval > 65535 {
        return Err(ImageIoError::Corrupt(format!("invalid maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(ImageIoError::ZeroArea);
    }
    let count = width * height;
    let scale = 1.0 / maxval as f64;
    let mut pixels = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        let mut pos = scan.pos;
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(ImageIoError::Corrupt("missing raster separator".into()));
        }
        pos += 1;
        let wide = maxval > 255;
        let need = count * if wide { 2 } else { 1 };
        let data = bytes
            .get(pos..pos + need)
            .ok_or_else(|| ImageIoError::Corrupt("raster shorter than header promises".into()))?;
        if wide {
            for pair in data.chunks_exact(2) {
                let v = u16::from_be_bytes([pair[0], pair[1]]);
                if u64::from(v) > maxval {
                    return Err(ImageIoError::Corrupt("sample above maxval".into()));
                }
                pixels.push(f64::from(v) * scale);
            }
        } else {
            for &b in data {
                if u64::from(b) > maxval {
                    return Err(ImageIoError::Corrupt("sample above maxval".into()));
                }
                pixels.push(f64::from(b) * scale);
            }
        }
    } else {
        for _ in 0..count {
            let v = scan.number()?;
            if v > maxval {
                return Err(ImageIoError::Corrupt("sample above maxval".into()));
            }
            pixels.push(v as f64 * scale);
        }
    }
    raster(width, height, pixels)
}

/// Writes a binary (P5) PGM with maxval 255.
pub fn save_pgm(path: &Path, image: &GrayImage) -> Result<(), ImageIoError> {
    let mut out = Vec::with_capacity(image.pixels().len() + 32);
    out.extend_from_slice(format!("P5\n{} {}\n255\n", image.width(), image.height()).as_bytes());
    for &p in image.pixels() {
        out.push((p * 255.0).round().clamp(0.0, 255.0) as u8);
    }
    std::fs::write(path, out)?;
    Ok(())
}
