//! End-to-end pipeline execution and the 18-configuration benchmark matrix.
//!
//! A single run goes: load frames -> chest ROI from the face box -> crop and
//! filter each frame -> corner detection on frame 0 -> Lucas-Kanade tracking
//! -> variance trim -> aggregate -> band-pass -> z-normalize -> peak count ->
//! breaths per minute.
//!
//! The matrix runner evaluates every configuration over every manifest
//! subject, tolerating per-subject failures, and writes deterministic CSV
//! reports (one summary table per condition plus a per-subject long form).

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::config::{all_configs, PipelineConfig};
use crate::error::Error;
use crate::features::detect_corners;
use crate::frame::{crop_roi, load_sequence, FrameSequence};
use crate::manifest::{load_manifest, Condition, SubjectRecord};
use crate::metrics::{compute_metrics, MetricsRow};
use crate::params::Params;
use crate::roi::{chest_roi_from_face, BoundingBox};
use crate::signal::{
    aggregate_motion, bandpass, detect_peaks, respiration_rate, variance_trim, z_normalize,
    BandpassSpec, PeakParams,
};
use crate::tracking::{track_points_streamed, FlowParams};
use crate::Result;

/// Estimate the respiratory rate of one subject under one configuration.
pub fn run_config(rec: &SubjectRecord, cfg: PipelineConfig, params: &Params) -> Result<f64> {
    let seq = load_sequence(&rec.frames_dir, rec.fps)?;
    run_config_on(&seq, rec.face_box, cfg, params)
}

/// Same as [`run_config`] for an already-loaded sequence, so the matrix
/// runner can share one load across all 18 configurations.
pub fn run_config_on(
    seq: &FrameSequence,
    face: BoundingBox,
    cfg: PipelineConfig,
    params: &Params,
) -> Result<f64> {
    let first = seq
        .frames
        .first()
        .ok_or_else(|| Error::NoFrames(Default::default()))?;
    let roi = chest_roi_from_face(face, cfg.bbox, first.width, first.height, &params.roi)?;

    let filtered_roi = |i: usize| cfg.filter.apply(&crop_roi(&seq.frames[i], roi)?);

    let corners = detect_corners(&filtered_roi(0)?, cfg.detector, &params.features)?;
    let flow = FlowParams::from(params.flow);
    let tracks = track_points_streamed(seq.frames.len(), filtered_roi, &corners, &flow)?;

    // only tracks alive through the whole clip feed the signal stage
    let full: Vec<_> = tracks
        .into_iter()
        .filter(|t| t.alive && t.len() == seq.frames.len())
        .collect();
    let trimmed = variance_trim(&full, params.signal.trim_fraction)?;
    let motion = aggregate_motion(&trimmed, seq.fps)?;
    let filtered = bandpass(&motion, &BandpassSpec::from(params.signal))?;
    let z = z_normalize(&filtered)?;
    let peaks = detect_peaks(&z, &PeakParams::for_rate(seq.fps, &params.signal));
    Ok(respiration_rate(&peaks, seq.duration_s()))
}

/// One subject x config cell of the matrix.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub subject_id: String,
    pub condition: Condition,
    pub config: PipelineConfig,
    pub gt_rr_bpm: f64,
    /// The estimate, or the failure rendered as text.
    pub outcome: std::result::Result<f64, String>,
}

/// Full matrix output: per-condition summary rows plus the long-form cells.
#[derive(Debug, Clone)]
pub struct ReportTable {
    /// (condition, 18 rows in report order); only conditions present in the
    /// manifest appear.
    pub conditions: Vec<(Condition, Vec<MetricsRow>)>,
    /// Every subject x config cell, subjects sorted by id within each config.
    pub cells: Vec<CellResult>,
}

impl ReportTable {
    pub fn rows_for(&self, condition: Condition) -> Option<&[MetricsRow]> {
        self.conditions
            .iter()
            .find(|(c, _)| *c == condition)
            .map(|(_, rows)| rows.as_slice())
    }

    /// True when not a single cell produced an estimate.
    pub fn all_failed(&self) -> bool {
        self.cells.iter().all(|c| c.outcome.is_err())
    }
}

/// Evaluate all 18 configurations over every subject in the manifest and
/// write the CSV reports into `out_dir`.
///
/// Per-subject failures are recorded, not fatal; a config where every subject
/// failed still gets a row, with empty metrics.
pub fn run_matrix(manifest_path: &Path, out_dir: &Path, params: &Params) -> Result<ReportTable> {
    let records = load_manifest(manifest_path)?;
    let table = run_matrix_records(&records, params)?;
    write_reports(&table, out_dir)?;
    Ok(table)
}

/// Matrix evaluation without the report files.
pub fn run_matrix_records(records: &[SubjectRecord], params: &Params) -> Result<ReportTable> {
    let configs = all_configs();

    // subjects in parallel; each loads its clip once and runs all configs on it
    let mut cells: Vec<CellResult> = records
        .par_iter()
        .map(|rec| -> Vec<CellResult> {
            let seq = match load_sequence(&rec.frames_dir, rec.fps) {
                Ok(seq) => Arc::new(seq),
                Err(e) => {
                    return configs
                        .iter()
                        .map(|&config| CellResult {
                            subject_id: rec.id.clone(),
                            condition: rec.condition,
                            config,
                            gt_rr_bpm: rec.gt_rr_bpm,
                            outcome: Err(e.to_string()),
                        })
                        .collect();
                }
            };
            configs
                .par_iter()
                .map(|&config| CellResult {
                    subject_id: rec.id.clone(),
                    condition: rec.condition,
                    config,
                    gt_rr_bpm: rec.gt_rr_bpm,
                    outcome: run_config_on(&seq, rec.face_box, config, params)
                        .map_err(|e| e.to_string()),
                })
                .collect()
        })
        .flatten()
        .collect();

    // deterministic aggregation order regardless of scheduling or manifest order
    cells.sort_by(|a, b| {
        let ka = (a.config.detector.label(), a.config.acronym(), &a.subject_id);
        let kb = (b.config.detector.label(), b.config.acronym(), &b.subject_id);
        ka.cmp(&kb)
    });

    let mut conditions = Vec::new();
    for condition in Condition::ALL {
        if !records.iter().any(|r| r.condition == condition) {
            continue;
        }
        let rows: Vec<MetricsRow> = configs
            .iter()
            .map(|&config| {
                let of_config: Vec<&CellResult> = cells
                    .iter()
                    .filter(|c| c.config == config && c.condition == condition)
                    .collect();
                let pairs: Vec<(f64, f64)> = of_config
                    .iter()
                    .filter_map(|c| c.outcome.as_ref().ok().map(|&est| (est, c.gt_rr_bpm)))
                    .collect();
                let n_failed = of_config.len() - pairs.len();
                match compute_metrics(&pairs) {
                    Ok((mae, rmse, sd)) => MetricsRow {
                        config,
                        mae: Some(mae),
                        rmse: Some(rmse),
                        sd: Some(sd),
                        n_subjects: pairs.len(),
                        n_failed,
                    },
                    Err(_) => MetricsRow {
                        config,
                        mae: None,
                        rmse: None,
                        sd: None,
                        n_subjects: 0,
                        n_failed,
                    },
                }
            })
            .collect();
        conditions.push((condition, rows));
    }

    Ok(ReportTable { conditions, cells })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_default()
}

/// Render one condition's summary rows as CSV.
pub fn summary_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from("method,detector,filter,bbox,mae,rmse,sd,n_subjects,n_failed\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.config.label(),
            row.config.detector.label(),
            row.config.filter.label(),
            row.config.bbox.label(),
            fmt_opt(row.mae),
            fmt_opt(row.rmse),
            fmt_opt(row.sd),
            row.n_subjects,
            row.n_failed,
        ));
    }
    out
}

/// Render the long-form per-subject CSV. Failed cells keep their ground
/// truth but leave the estimate and error columns empty.
pub fn per_subject_csv(cells: &[CellResult]) -> String {
    let mut out = String::from("subject_id,condition,method,estimate_bpm,gt_bpm,error_bpm\n");
    for cell in cells {
        let (est, err) = match &cell.outcome {
            Ok(est) => (format!("{est:.4}"), format!("{:.4}", est - cell.gt_rr_bpm)),
            Err(_) => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{:.4},{}\n",
            cell.subject_id,
            cell.condition.label(),
            cell.config.label(),
            est,
            cell.gt_rr_bpm,
            err,
        ));
    }
    out
}

/// Plain-text rendering of a summary table (METHOD / MAE / RMSE / SD columns).
pub fn render_table(rows: &[MetricsRow]) -> String {
    let mut out = format!("{:<20}{:>8}{:>8}{:>8}\n", "METHOD", "MAE", "RMSE", "SD");
    for row in rows {
        let cell = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:<20}{:>8}{:>8}{:>8}\n",
            row.config.label(),
            cell(row.mae),
            cell(row.rmse),
            cell(row.sd),
        ));
    }
    out
}

/// Write `static.csv` / `dynamic.csv` (for conditions present) plus
/// `per_subject.csv` into `out_dir`.
pub fn write_reports(table: &ReportTable, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::WriteError {
        path: out_dir.to_path_buf(),
        reason: e.to_string(),
    })?;
    let write = |name: &str, contents: String| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::WriteError {
            path,
            reason: e.to_string(),
        })
    };
    for (condition, rows) in &table.conditions {
        write(&format!("{}.csv", condition.label()), summary_csv(rows))?;
    }
    write("per_subject.csv", per_subject_csv(&table.cells))?;
    Ok(())
}
