//! Respiratory rate estimation from video by tracking chest-motion feature points.
//!
//! The pipeline: load a frame sequence, derive a chest region of interest from a
//! face bounding box, optionally enhance it with a Laplacian or Sobel filter,
//! detect corners (Harris or Shi-Tomasi), track them with pyramidal Lucas-Kanade
//! optical flow, and turn the aggregated vertical motion into a breaths-per-minute
//! estimate via variance trimming, band-pass filtering, z-normalization and peak
//! counting.
//!
//! [`runner`] evaluates the full 18-way configuration matrix (3 ROI sizes ×
//! 3 filters × 2 detectors) over a subject manifest and reports MAE/RMSE/SD
//! against ground truth. [`synth`] renders deterministic synthetic clips with
//! known breathing rates for end-to-end validation.

pub mod config;
pub mod error;
pub mod features;
pub mod frame;
pub mod imgproc;
pub mod manifest;
pub mod metrics;
pub mod params;
pub mod roi;
pub mod runner;
pub mod signal;
pub mod synth;
pub mod tracking;

pub use config::{PipelineConfig, ALL_ACRONYMS};
pub use error::Error;
pub use features::{DetectorKind, FeaturePoint};
pub use frame::{FrameSequence, GrayFrame, RgbFrame};
pub use imgproc::{FilterKind, FloatImage};
pub use manifest::{Condition, SubjectRecord};
pub use params::Params;
pub use roi::{BoundingBox, SizeClass};
pub use runner::{run_config, run_matrix, ReportTable};
pub use signal::MotionSignal;
pub use synth::SynthSpec;
pub use tracking::{FlowParams, TrackSeries};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
