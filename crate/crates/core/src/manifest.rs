//! Subject manifest: the JSON file describing frame directories, face boxes
//! and ground-truth rates for a benchmark run.
//!
//! Format: a JSON array of objects with keys `id`, `frames_dir`, `fps`,
//! `face_box` (as `[x, y, w, h]`), `gt_rr_bpm` and `condition`
//! (`"static"` or `"dynamic"`). Relative `frames_dir` paths resolve against
//! the manifest's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::roi::BoundingBox;
use crate::Result;

/// Recording condition: resting versus post-exercise recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Static,
    Dynamic,
}

impl Condition {
    pub const ALL: [Condition; 2] = [Condition::Static, Condition::Dynamic];

    pub fn label(self) -> &'static str {
        match self {
            Condition::Static => "static",
            Condition::Dynamic => "dynamic",
        }
    }
}

/// One subject's clip plus its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    pub id: String,
    pub frames_dir: PathBuf,
    pub fps: f64,
    pub face_box: BoundingBox,
    pub gt_rr_bpm: f64,
    pub condition: Condition,
}

/// Read and validate a manifest; relative frame directories are resolved
/// against the manifest location.
// negated comparisons so NaN rates/fps fail validation
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn load_manifest(path: &Path) -> Result<Vec<SubjectRecord>> {
    let err = |reason: String| Error::ManifestError {
        path: path.to_path_buf(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let mut records: Vec<SubjectRecord> =
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
    if records.is_empty() {
        return Err(err("manifest lists no subjects".into()));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    for rec in &mut records {
        if !(rec.gt_rr_bpm > 0.0) {
            return Err(err(format!("subject {}: gt_rr_bpm must be > 0", rec.id)));
        }
        if !(rec.fps > 0.0) {
            return Err(err(format!("subject {}: fps must be > 0", rec.id)));
        }
        if rec.frames_dir.is_relative() {
            rec.frames_dir = base.join(&rec.frames_dir);
        }
    }
    Ok(records)
}

/// Write a manifest as pretty-printed JSON.
pub fn save_manifest(records: &[SubjectRecord], path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(records).expect("manifest serialization");
    std::fs::write(path, json).map_err(|e| Error::WriteError {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
