//! Grayscale image files: binary PGM (P5, 8-bit) and PNG.
//!
//! Samples load as `v / maxval` (so `v / 255` for ordinary files) and save
//! clamped to `[0, 1]` and quantized with round-half-up.

use std::fs;
use std::path::Path;

use image::{ImageFormat, ImageReader};
use steffensen_core::ImageMatrix;

use crate::error::{CliError, Result};

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Supported on-disk formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    #[allow(missing_docs)]
    Pgm,
    #[allow(missing_docs)]
    Png,
}

impl Format {
    /// Picks the format from a file extension (`.pgm`, `.png`).
    pub fn from_path(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(Format::Pgm),
            "png" => Some(Format::Png),
            _ => None,
        }
    }
}

/// Loads a grayscale image; the format is sniffed from the content.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes).map_err(|r| CliError::io(path, r))
    } else if bytes.starts_with(PNG_MAGIC) {
        decode_png(&bytes).map_err(|r| CliError::io(path, r))
    } else {
        Err(CliError::io(
            path,
            "unsupported format (expected binary PGM or PNG)",
        ))
    }
}

/// Saves `img` as PGM or PNG depending on the extension.
pub fn save_image(img: &ImageMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = Format::from_path(path).ok_or_else(|| {
        CliError::Config(format!(
            "{}: extension must be .pgm or .png",
            path.display()
        ))
    })?;
    let bytes = match format {
        Format::Pgm => encode_pgm(img),
        Format::Png => encode_png(img).map_err(|r| CliError::io(path, r))?,
    };
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// `round(clamp(v, 0, 1) · 255)`, halves rounded up; NaN maps to 0.
pub fn quantize(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Decodes a binary PGM with `maxval ≤ 255`.
pub fn decode_pgm(bytes: &[u8]) -> std::result::Result<ImageMatrix, String> {
    let mut pos = 2;
    let mut header = [0usize; 3];
    for field in header.iter_mut() {
        *field = next_header_int(bytes, &mut pos)?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 {
        return Err("zero image dimension".into());
    }
    if maxval == 0 || maxval > 255 {
        return Err(format!("maxval {maxval} not supported (8-bit only)"));
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("malformed header".into());
    }
    pos += 1;
    let n = width.checked_mul(height).ok_or("image too large")?;
    let raster = bytes
        .get(pos..pos + n)
        .ok_or_else(|| format!("truncated raster: expected {n} bytes"))?;
    let scale = maxval as f64;
    let data = raster.iter().map(|&b| b as f64 / scale).collect();
    ImageMatrix::new(height, width, data).map_err(|e| e.to_string())
}

fn next_header_int(bytes: &[u8], pos: &mut usize) -> std::result::Result<usize, String> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err("truncated header".into()),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| "malformed header".to_string())
}

/// Encodes `img` as an 8-bit binary PGM.
pub fn encode_pgm(img: &ImageMatrix) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(img.as_slice().iter().map(|&v| quantize(v)));
    out
}

fn decode_png(bytes: &[u8]) -> std::result::Result<ImageMatrix, String> {
    let img = ImageReader::with_format(std::io::Cursor::new(bytes), ImageFormat::Png)
        .decode()
        .map_err(|e| e.to_string())?;
    if img.color().has_color() {
        return Err("color PNG not supported (grayscale only)".into());
    }
    let gray = img.to_luma8();
    let (w, h) = gray.dimensions();
    let data = gray.as_raw().iter().map(|&b| b as f64 / 255.0).collect();
    ImageMatrix::new(h as usize, w as usize, data).map_err(|e| e.to_string())
}

fn encode_png(img: &ImageMatrix) -> std::result::Result<Vec<u8>, String> {
    let raw: Vec<u8> = img.as_slice().iter().map(|&v| quantize(v)).collect();
    let buf = image::GrayImage::from_raw(img.cols() as u32, img.rows() as u32, raw)
        .ok_or("image dimensions overflow")?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .map_err(|e| e.to_string())?;
    Ok(out.into_inner())
}
