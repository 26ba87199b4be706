//! Synthetic clip generator: a textured chest patch on a textured background,
//! moving vertically along a known sinusoid (plus optional linear drift), with
//! seeded per-frame Gaussian pixel noise. Serves as the ground-truth oracle
//! for the end-to-end pipeline.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::Error;
use crate::frame::{write_pgm, FrameSequence, GrayFrame};
use crate::manifest::{save_manifest, Condition, SubjectRecord};
use crate::params::RoiParams;
use crate::roi::{chest_roi_from_face, BoundingBox, SizeClass};
use crate::Result;

/// Synthetic clip description. Geometry is derived from `face_px` so the
/// chest ROIs land on the moving patch at the default ROI multipliers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    /// Ground-truth breathing rate, breaths per minute.
    pub rr_bpm: f64,
    /// Breathing motion amplitude in pixels.
    pub amplitude_px: f64,
    pub duration_s: f64,
    pub fps: f64,
    /// Standard deviation of the additive per-pixel Gaussian noise, in
    /// intensity units.
    pub noise_sigma: f64,
    pub texture_seed: u64,
    /// Constant vertical drift, simulating post-exercise body sway.
    pub drift_px_per_s: f64,
    /// Side of the synthetic face box; the frame is sized around it.
    pub face_px: u32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            rr_bpm: 15.0,
            amplitude_px: 2.0,
            duration_s: 60.0,
            fps: 30.0,
            noise_sigma: 2.0,
            texture_seed: 42,
            drift_px_per_s: 0.0,
            face_px: 48,
        }
    }
}

impl SynthSpec {
    pub fn n_frames(&self) -> usize {
        (self.duration_s * self.fps).round() as usize
    }

    // negated comparisons so NaN fields fail validation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::BadSpec(msg.into()));
        if !(self.fps > 0.0) || !(self.duration_s > 0.0) {
            return bad("fps and duration_s must be positive");
        }
        if !(self.rr_bpm > 0.0) || self.rr_bpm / 60.0 >= self.fps / 2.0 {
            return bad("rr_bpm/60 must lie below the Nyquist rate fps/2");
        }
        if !(self.amplitude_px > 0.0) {
            return bad("amplitude_px must be positive");
        }
        if self.noise_sigma < 0.0 {
            return bad("noise_sigma must be non-negative");
        }
        if self.face_px < 16 {
            return bad("face_px must be at least 16");
        }
        if self.n_frames() < 2 {
            return bad("clip must span at least 2 frames");
        }
        Ok(())
    }

    /// Patch vertical offset at frame `t`.
    pub fn offset_at(&self, t: usize) -> f64 {
        let secs = t as f64 / self.fps;
        self.amplitude_px * (2.0 * std::f64::consts::PI * (self.rr_bpm / 60.0) * secs).sin()
            + self.drift_px_per_s * secs
    }
}

const BG_LEVEL: f64 = 50.0;
const BG_CONTRAST: f64 = 8.0;
const PATCH_LEVEL: f64 = 150.0;
const PATCH_CONTRAST: f64 = 55.0;

/// Unit-variance smoothed noise: white noise put through two 3x3 box blurs,
/// rescaled to unit standard deviation. Feature scale ends up at a few px.
fn smooth_noise(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut field: Vec<f64> = (0..w * h).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut tmp = vec![0.0; w * h];
    for _ in 0..2 {
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for dy in -1i64..=1 {
                    let cy = (y as i64 + dy).clamp(0, h as i64 - 1) as usize;
                    for dx in -1i64..=1 {
                        let cx = (x as i64 + dx).clamp(0, w as i64 - 1) as usize;
                        acc += field[cy * w + cx];
                    }
                }
                tmp[y * w + x] = acc / 9.0;
            }
        }
        std::mem::swap(&mut field, &mut tmp);
    }
    let mean = field.iter().sum::<f64>() / field.len() as f64;
    let var = field.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / field.len() as f64;
    let inv_std = 1.0 / var.sqrt().max(1e-12);
    for v in field.iter_mut() {
        *v = (*v - mean) * inv_std;
    }
    field
}

/// Precomputed static scene: background, patch texture and placement.
pub struct ClipScene {
    pub frame_w: u32,
    pub frame_h: u32,
    pub face: BoundingBox,
    /// Patch rest position (top-left) in frame coordinates.
    pub patch_x: i64,
    pub patch_y: i64,
    pub patch_w: usize,
    pub patch_h: usize,
    patch: Vec<f64>,
    background: Vec<f64>,
}

/// Lay out the scene so every ROI size class falls on the patch for the whole
/// motion range, including drift.
pub fn build_scene(spec: &SynthSpec) -> Result<ClipScene> {
    spec.validate()?;
    let face_px = spec.face_px;
    let pad = spec.amplitude_px.ceil() as i64 + 4;
    let drift_total = (spec.drift_px_per_s.abs() * spec.duration_s).ceil() as i64;
    let (pad_top, pad_bot) = if spec.drift_px_per_s < 0.0 {
        (pad + drift_total, pad)
    } else {
        (pad, pad + drift_total)
    };

    // Large-ROI footprint relative to the face box, at default multipliers
    let roi = RoiParams::default();
    let large_w = (face_px as f64 * roi.large.w_mul).round() as i64;
    let large_h = (face_px as f64 * roi.large.h_mul).round() as i64;
    let chest_top = (roi.large.y_off_mul * face_px as f64).round() as i64;

    let margin = 8i64;
    let patch_w = large_w + 2 * pad;
    let patch_x = margin;
    let frame_w = (patch_w + 2 * margin) as u32;
    let face_x = patch_x + pad + large_w / 2 - face_px as i64 / 2;
    let face_y = margin;
    let patch_y = face_y + chest_top - pad_top;
    let patch_h = large_h + pad_top + pad_bot;
    let frame_h = (patch_y + patch_h + margin) as u32;

    let face = BoundingBox::new(face_x as i32, face_y as i32, face_px, face_px);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.texture_seed);
    let mut background = smooth_noise(frame_w as usize, frame_h as usize, &mut rng);
    for v in background.iter_mut() {
        *v = BG_LEVEL + BG_CONTRAST * *v;
    }
    let mut patch = smooth_noise(patch_w as usize, patch_h as usize, &mut rng);
    for v in patch.iter_mut() {
        *v = PATCH_LEVEL + PATCH_CONTRAST * *v;
    }
    // blend a 3 px ring down to the background level so the patch composites
    // without a hard seam
    for y in 0..patch_h as usize {
        for x in 0..patch_w as usize {
            let d = x
                .min(y)
                .min(patch_w as usize - 1 - x)
                .min(patch_h as usize - 1 - y);
            if d < 3 {
                let alpha = d as f64 / 3.0;
                let i = y * patch_w as usize + x;
                patch[i] = BG_LEVEL + alpha * (patch[i] - BG_LEVEL);
            }
        }
    }

    Ok(ClipScene {
        frame_w,
        frame_h,
        face,
        patch_x,
        patch_y,
        patch_w: patch_w as usize,
        patch_h: patch_h as usize,
        patch,
        background,
    })
}

/// Render frame `t`: patch shifted by the analytic offset (linear sub-pixel
/// interpolation in y), plus seeded per-frame Gaussian noise.
pub fn render_frame(scene: &ClipScene, spec: &SynthSpec, t: usize) -> GrayFrame {
    let dy = spec.offset_at(t);
    let (w, h) = (scene.frame_w as usize, scene.frame_h as usize);
    let mut data = vec![0u8; w * h];

    let mut noise_rng = ChaCha8Rng::seed_from_u64(
        spec.texture_seed ^ (t as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let normal = Normal::new(0.0, spec.noise_sigma.max(f64::MIN_POSITIVE)).unwrap();

    for y in 0..h {
        let v = y as f64 - scene.patch_y as f64 - dy;
        let in_rows = v >= 0.0 && v <= (scene.patch_h - 1) as f64;
        let (row0, row1, fy) = if in_rows {
            let v0 = v.floor() as usize;
            let v1 = (v0 + 1).min(scene.patch_h - 1);
            (v0 * scene.patch_w, v1 * scene.patch_w, v - v0 as f64)
        } else {
            (0, 0, 0.0)
        };
        for x in 0..w {
            let u = x as i64 - scene.patch_x;
            let mut val = if in_rows && u >= 0 && (u as usize) < scene.patch_w {
                let u = u as usize;
                (1.0 - fy) * scene.patch[row0 + u] + fy * scene.patch[row1 + u]
            } else {
                scene.background[y * w + x]
            };
            if spec.noise_sigma > 0.0 {
                val += normal.sample(&mut noise_rng);
            }
            data[y * w + x] = val.round().clamp(0.0, 255.0) as u8;
        }
    }
    GrayFrame::new(scene.frame_w, scene.frame_h, data)
}

/// Render a whole clip in memory.
///
/// Returns the frames, the face box positioned so the derived chest ROIs land
/// on the patch, and the ground-truth rate (the spec's `rr_bpm`).
pub fn synth_clip(spec: &SynthSpec) -> Result<(FrameSequence, BoundingBox, f64)> {
    let scene = build_scene(spec)?;
    let frames: Vec<GrayFrame> = (0..spec.n_frames())
        .into_par_iter()
        .map(|t| render_frame(&scene, spec, t))
        .collect();
    Ok((
        FrameSequence {
            frames,
            fps: spec.fps,
        },
        scene.face,
        spec.rr_bpm,
    ))
}

/// Render each clip to `out_dir/<id>/frame_%06d.pgm` and write
/// `out_dir/manifest.json` describing them. Returns the manifest path.
///
/// Clips with nonzero drift are labeled `dynamic`, others `static`.
pub fn synth_manifest(specs: &[SynthSpec], out_dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::WriteError {
        path: out_dir.to_path_buf(),
        reason: e.to_string(),
    })?;

    let records: Vec<SubjectRecord> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| -> Result<SubjectRecord> {
            let id = format!("clip_{i:03}");
            let dir = out_dir.join(&id);
            std::fs::create_dir_all(&dir).map_err(|e| Error::WriteError {
                path: dir.clone(),
                reason: e.to_string(),
            })?;
            let scene = build_scene(spec)?;
            // render-and-write one frame at a time: whole clips never sit in RAM
            for t in 0..spec.n_frames() {
                let frame = render_frame(&scene, spec, t);
                write_pgm(&dir.join(format!("frame_{t:06}.pgm")), &frame)?;
            }
            Ok(SubjectRecord {
                id: id.clone(),
                frames_dir: PathBuf::from(&id),
                fps: spec.fps,
                face_box: scene.face,
                gt_rr_bpm: spec.rr_bpm,
                condition: if spec.drift_px_per_s == 0.0 {
                    Condition::Static
                } else {
                    Condition::Dynamic
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let manifest_path = out_dir.join("manifest.json");
    save_manifest(&records, &manifest_path)?;
    Ok(manifest_path)
}

/// Sanity hook used by tests: at the rest position every ROI size class must
/// lie fully on the patch, so frame-0 corner detection sees patch texture only.
pub fn rois_on_patch(scene: &ClipScene) -> bool {
    let roi_params = RoiParams::default();
    for size in [SizeClass::Small, SizeClass::Medium, SizeClass::Large] {
        let Ok(b) =
            chest_roi_from_face(scene.face, size, scene.frame_w, scene.frame_h, &roi_params)
        else {
            return false;
        };
        let inside_x = b.x as i64 >= scene.patch_x
            && (b.x as i64 + b.w as i64) <= scene.patch_x + scene.patch_w as i64;
        let inside_y = b.y as i64 >= scene.patch_y
            && (b.y as i64 + b.h as i64) <= scene.patch_y + scene.patch_h as i64;
        if !(inside_x && inside_y) {
            return false;
        }
    }
    true
}
