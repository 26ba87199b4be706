//! Frame loading, grayscale conversion and ROI cropping.
//!
//! Frame sequences are directories of individually numbered images
//! (`frame_%06d.pgm` and friends) in binary PGM (P5), binary PPM (P6) or PNG.
//! Everything downstream works on 8-bit grayscale; RGB inputs are converted
//! with BT.601 luma weights.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::roi::BoundingBox;
use crate::Result;

/// 24-bit RGB frame, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    pub width: u32,
    pub height: u32,
    /// Interleaved (r, g, b) triples, `width * height` of them.
    pub data: Vec<[u8; 3]>,
}

/// 8-bit grayscale frame, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayFrame {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl GrayFrame {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> GrayFrame {
        assert_eq!(data.len(), (width * height) as usize);
        assert!(width > 0 && height > 0);
        GrayFrame {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[(y * self.width + x) as usize]
    }
}

/// An ordered, uniformly sampled grayscale frame sequence.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    pub frames: Vec<GrayFrame>,
    /// Frames per second, > 0.
    pub fps: f64,
}

impl FrameSequence {
    pub fn duration_s(&self) -> f64 {
        self.frames.len() as f64 / self.fps
    }
}

/// Convert an RGB frame to grayscale with BT.601 luma weights,
/// `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn to_grayscale(frame: &RgbFrame) -> GrayFrame {
    let data = frame
        .data
        .iter()
        .map(|&[r, g, b]| {
            let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
            y.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayFrame {
        width: frame.width,
        height: frame.height,
        data,
    }
}

/// Extract the sub-image covered by `bbox`. The box must lie fully inside the frame.
pub fn crop_roi(frame: &GrayFrame, bbox: BoundingBox) -> Result<GrayFrame> {
    let in_bounds = bbox.x >= 0
        && bbox.y >= 0
        && bbox.w > 0
        && bbox.h > 0
        && (bbox.x as i64 + bbox.w as i64) <= frame.width as i64
        && (bbox.y as i64 + bbox.h as i64) <= frame.height as i64;
    if !in_bounds {
        return Err(Error::OutOfBounds {
            x: bbox.x as i64,
            y: bbox.y as i64,
            w: bbox.w,
            h: bbox.h,
            frame_w: frame.width,
            frame_h: frame.height,
        });
    }
    let mut data = Vec::with_capacity((bbox.w * bbox.h) as usize);
    for row in 0..bbox.h {
        let src = ((bbox.y as u32 + row) * frame.width + bbox.x as u32) as usize;
        data.extend_from_slice(&frame.data[src..src + bbox.w as usize]);
    }
    Ok(GrayFrame {
        width: bbox.w,
        height: bbox.h,
        data,
    })
}

/// Load every supported image in `dir_path`, sorted by filename, as one sequence.
///
/// All frames must share dimensions. RGB inputs are converted to grayscale.
pub fn load_sequence(dir_path: &Path, fps: f64) -> Result<FrameSequence> {
    assert!(fps > 0.0, "fps must be positive");
    let mut paths: Vec<PathBuf> = fs::read_dir(dir_path)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("pgm") | Some("ppm") | Some("png")
            )
        })
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(Error::NoFrames(dir_path.to_path_buf()));
    }

    let mut frames = Vec::with_capacity(paths.len());
    for path in &paths {
        let frame = load_frame(path)?;
        if let Some(first) = frames.first() {
            let first: &GrayFrame = first;
            if frame.width != first.width || frame.height != first.height {
                return Err(Error::DimensionMismatch {
                    expected_w: first.width,
                    expected_h: first.height,
                    got_w: frame.width,
                    got_h: frame.height,
                    context: format!("{}", path.display()),
                });
            }
        }
        frames.push(frame);
    }
    Ok(FrameSequence { frames, fps })
}

/// Decode a single image file as grayscale.
pub fn load_frame(path: &Path) -> Result<GrayFrame> {
    let ext = path.extension().and_then(|e| e.to_str());
    match ext {
        Some("pgm") | Some("ppm") => load_pnm(path),
        Some("png") => load_png(path),
        _ => Err(Error::DecodeError {
            path: path.to_path_buf(),
            reason: "unsupported extension".into(),
        }),
    }
}

fn decode_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::DecodeError {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Minimal binary PNM reader: P5 (gray) and P6 (RGB), maxval 255.
fn load_pnm(path: &Path) -> Result<GrayFrame> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 2 {
        return Err(decode_err(path, "truncated header"));
    }
    let magic = &bytes[..2];
    let rgb = match magic {
        b"P5" => false,
        b"P6" => true,
        _ => return Err(decode_err(path, "not a binary P5/P6 PNM file")),
    };

    // Header: magic, then width, height, maxval separated by whitespace;
    // '#' starts a comment running to end of line.
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == start {
            return Err(decode_err(path, "malformed header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| decode_err(path, "bad header number"))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(decode_err(path, format!("unsupported maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(decode_err(path, "zero dimension"));
    }
    // single whitespace byte separates header from raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(decode_err(path, "missing raster separator"));
    }
    pos += 1;

    let n = width * height;
    let raster = &bytes[pos..];
    if rgb {
        if raster.len() < 3 * n {
            return Err(decode_err(path, "truncated raster"));
        }
        let data = raster[..3 * n]
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        Ok(to_grayscale(&RgbFrame {
            width: width as u32,
            height: height as u32,
            data,
        }))
    } else {
        if raster.len() < n {
            return Err(decode_err(path, "truncated raster"));
        }
        Ok(GrayFrame {
            width: width as u32,
            height: height as u32,
            data: raster[..n].to_vec(),
        })
    }
}

fn load_png(path: &Path) -> Result<GrayFrame> {
    let img = image::open(path).map_err(|e| decode_err(path, e.to_string()))?;
    match img {
        image::DynamicImage::ImageLuma8(g) => Ok(GrayFrame {
            width: g.width(),
            height: g.height(),
            data: g.into_raw(),
        }),
        other => {
            let rgb = other.to_rgb8();
            let data = rgb.pixels().map(|p| p.0).collect();
            Ok(to_grayscale(&RgbFrame {
                width: rgb.width(),
                height: rgb.height(),
                data,
            }))
        }
    }
}

/// Write a frame as binary PGM (P5), the format `synth` emits.
pub fn write_pgm(path: &Path, frame: &GrayFrame) -> Result<()> {
    let mut out = Vec::with_capacity(frame.data.len() + 32);
    out.extend_from_slice(format!("P5\n{} {}\n255\n", frame.width, frame.height).as_bytes());
    out.extend_from_slice(&frame.data);
    fs::write(path, out).map_err(|e| Error::WriteError {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
