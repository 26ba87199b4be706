//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the pipeline stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Frame directory held no usable frames (at least two are required).
    #[error("no frames found in {0} (need at least 2 image files)")]
    NoFrames(PathBuf),
    /// Frames or images in one sequence disagree on dimensions.
    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}{}", context_suffix(.context))]
    DimensionMismatch {
        expected_w: u32,
        expected_h: u32,
        got_w: u32,
        got_h: u32,
        context: String,
    },
    /// An image file could not be decoded.
    #[error("failed to decode {path}: {reason}")]
    DecodeError { path: PathBuf, reason: String },
    /// A rectangle fell outside the frame it was applied to.
    #[error("box ({x},{y}) {w}x{h} out of bounds for {frame_w}x{frame_h} frame")]
    OutOfBounds {
        x: i64,
        y: i64,
        w: u32,
        h: u32,
        frame_w: u32,
        frame_h: u32,
    },
    /// Chest ROI degenerated to 8 px or less after clamping.
    #[error("chest ROI degenerate after clamping: {w}x{h} (each side must exceed 8 px)")]
    RoiTooSmall { w: u32, h: u32 },
    /// Image smaller than the convolution kernel.
    #[error("image {w}x{h} too small for a 3x3 kernel")]
    ImageTooSmall { w: u32, h: u32 },
    /// Structure-tensor window must be odd.
    #[error("window size {0} invalid: must be odd and positive")]
    BadWindow(usize),
    /// No pixel cleared the corner quality threshold.
    #[error("no corners passed the quality threshold")]
    NoCorners,
    /// Every tracked point was lost before half the clip elapsed.
    #[error("tracking collapsed: all {n_points} points lost before frame {lost_by} of {n_frames}")]
    TrackingCollapse {
        n_points: usize,
        lost_by: usize,
        n_frames: usize,
    },
    /// No tracks survived to feed the signal stage.
    #[error("no tracks available")]
    NoTracks,
    /// Track series lengths disagree.
    #[error("track length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    /// Band-pass cutoffs violate 0 < low < high < fs/2.
    #[error("bad cutoffs: low {low_hz} Hz, high {high_hz} Hz at fs {fs} Hz")]
    BadCutoff { low_hz: f64, high_hz: f64, fs: f64 },
    /// Signal has zero variance; z-normalization undefined.
    #[error("constant signal: standard deviation is zero")]
    ConstantSignal,
    /// Metrics requested over an empty pair list.
    #[error("no data: empty estimate/ground-truth list")]
    NoData,
    /// Synthetic clip specification violates its invariants.
    #[error("bad synth spec: {0}")]
    BadSpec(String),
    /// Clip or manifest output could not be written.
    #[error("write failed at {path}: {reason}")]
    WriteError { path: PathBuf, reason: String },
    /// Manifest unreadable or malformed.
    #[error("manifest error at {path}: {reason}")]
    ManifestError { path: PathBuf, reason: String },
    /// Configuration file or override rejected.
    #[error("config error: {0}")]
    ConfigError(String),
    /// Unknown configuration acronym.
    #[error("unknown configuration acronym {0:?} (expected one of FLBM FLBL FLBS LPBM LPBL LPBS SOBM SOBL SOBS)")]
    UnknownAcronym(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn context_suffix(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}
