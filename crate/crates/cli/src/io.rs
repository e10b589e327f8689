//! Image file I/O: 8-bit PNG for unit-range images, PFM for HDR floats.
//!
//! PNG follows the usual value/255 convention on load and rounds half
//! away from zero on save. PFM rasters are stored bottom-to-top; the sign
//! of the scale factor encodes endianness (written as -1.0, little
//! endian). The scale magnitude is ignored on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ilsmooth::{ImagePlane, MultiChannelImage, RangeTag};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    Format { path: String, reason: String },
}

impl IoError {
    fn format(path: &Path, reason: impl Into<String>) -> Self {
        IoError::Format {
            path: path.display().to_string(),
            reason: reason.into(),
        }
    }

    fn file(path: &Path, source: std::io::Error) -> Self {
        IoError::File {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Png,
    Pfm,
}

fn kind_of(path: &Path) -> Result<FileKind, IoError> {
    match path
        .extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
        .as_deref()
    {
        Some("png") => Ok(FileKind::Png),
        Some("pfm") => Ok(FileKind::Pfm),
        _ => Err(IoError::format(
            path,
            "unsupported format (expected a .png or .pfm path)",
        )),
    }
}

/// Loads a PNG as a unit-range image or a PFM as an hdr-range image.
pub fn load_image(path: &Path) -> Result<MultiChannelImage, IoError> {
    match kind_of(path)? {
        FileKind::Png => load_png(path),
        FileKind::Pfm => load_pfm(path),
    }
}

/// Saves to PNG (unit-range required) or PFM by file extension.
pub fn save_image(img: &MultiChannelImage, path: &Path) -> Result<(), IoError> {
    match kind_of(path)? {
        FileKind::Png => save_png(img, path),
        FileKind::Pfm => save_pfm(img, path),
    }
}

fn load_png(path: &Path) -> Result<MultiChannelImage, IoError> {
    let file = File::open(path).map_err(|e| IoError::file(path, e))?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    // expand palettes and sub-byte depths to plain 8-bit samples
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| IoError::format(path, e.to_string()))?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(IoError::format(
            path,
            format!("only 8-bit PNG is supported, got {depth:?}"),
        ));
    }
    let mut buf = vec![
        0u8;
        reader
            .output_buffer_size()
            .ok_or_else(|| IoError::format(path, "image too large"))?
    ];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| IoError::format(path, e.to_string()))?;
    let (w, h) = (info.width as usize, info.height as usize);
    let bytes = &buf[..info.buffer_size()];

    let (samples, planes, stripped_alpha) = match color {
        png::ColorType::Grayscale => (1usize, 1usize, false),
        png::ColorType::GrayscaleAlpha => (2, 1, true),
        png::ColorType::Rgb => (3, 3, false),
        png::ColorType::Rgba => (4, 3, true),
        png::ColorType::Indexed => {
            return Err(IoError::format(path, "indexed PNG without palette expansion"))
        }
    };
    if stripped_alpha {
        eprintln!("warning: alpha channel stripped from {}", path.display());
    }

    let channels: Vec<ImagePlane> = (0..planes)
        .map(|c| {
            ImagePlane::from_fn(w, h, |x, y| {
                f64::from(bytes[(y * w + x) * samples + c]) / 255.0
            })
        })
        .collect();
    MultiChannelImage::new(channels, RangeTag::Unit)
        .map_err(|e| IoError::format(path, e.to_string()))
}

fn save_png(img: &MultiChannelImage, path: &Path) -> Result<(), IoError> {
    if img.range() != RangeTag::Unit {
        return Err(IoError::format(
            path,
            "PNG output requires a unit-range image (write a .pfm instead)",
        ));
    }
    let (w, h) = (img.width(), img.height());
    let color = match img.channels().len() {
        1 => png::ColorType::Grayscale,
        _ => png::ColorType::Rgb,
    };
    let mut bytes = Vec::with_capacity(w * h * img.channels().len());
    for y in 0..h {
        for x in 0..w {
            for ch in img.channels() {
                // round half away from zero: 0.5 -> 128
                bytes.push((ch.get(x, y) * 255.0).round() as u8);
            }
        }
    }

    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), w as u32, h as u32);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| IoError::format(path, e.to_string()))?;
    writer
        .write_image_data(&bytes)
        .map_err(|e| IoError::format(path, e.to_string()))?;
    Ok(())
}

fn load_pfm(path: &Path) -> Result<MultiChannelImage, IoError> {
    let bytes = std::fs::read(path).map_err(|e| IoError::file(path, e))?;
    let bad = |reason: &str| IoError::format(path, reason);

    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String, IoError> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(IoError::format(path, "truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = token(&bytes)?;
    let planes = match magic.as_str() {
        "PF" => 3usize,
        "Pf" => 1usize,
        _ => return Err(bad("not a PFM file (expected PF or Pf header)")),
    };
    let w: usize = token(&bytes)?.parse().map_err(|_| bad("bad width"))?;
    let h: usize = token(&bytes)?.parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = token(&bytes)?.parse().map_err(|_| bad("bad scale factor"))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(bad("scale factor must be a nonzero finite number"));
    }
    let little_endian = scale < 0.0;
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing separator before raster"));
    }
    pos += 1;

    let expected = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(planes * 4))
        .ok_or_else(|| bad("image dimensions overflow"))?;
    if bytes.len() - pos < expected {
        return Err(bad("truncated raster"));
    }
    let raster = &bytes[pos..pos + expected];

    let read_f32 = |i: usize| -> f32 {
        let chunk: [u8; 4] = raster[i * 4..i * 4 + 4].try_into().unwrap();
        if little_endian {
            f32::from_le_bytes(chunk)
        } else {
            f32::from_be_bytes(chunk)
        }
    };

    // rows are stored bottom to top
    let channels: Vec<ImagePlane> = (0..planes)
        .map(|c| {
            ImagePlane::from_fn(w, h, |x, y| {
                let row = h - 1 - y;
                f64::from(read_f32((row * w + x) * planes + c))
            })
        })
        .collect();
    MultiChannelImage::new(channels, RangeTag::Hdr)
        .map_err(|e| IoError::format(path, e.to_string()))
}

fn save_pfm(img: &MultiChannelImage, path: &Path) -> Result<(), IoError> {
    let (w, h) = (img.width(), img.height());
    let magic = if img.channels().len() == 1 { "Pf" } else { "PF" };
    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>, data: &[u8]| {
        out.write_all(data).map_err(|e| IoError::file(path, e))
    };
    write(&mut out, format!("{magic}\n{w} {h}\n-1.0\n").as_bytes())?;
    for y in (0..h).rev() {
        for x in 0..w {
            for ch in img.channels() {
                write(&mut out, &(ch.get(x, y) as f32).to_le_bytes())?;
            }
        }
    }
    out.flush().map_err(|e| IoError::file(path, e))
}
