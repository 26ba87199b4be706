//! Pyramidal iterative Lucas-Kanade optical flow over sparse feature points.
//!
//! Each point is tracked through a coarse-to-fine image pyramid. At every
//! level the 2x2 least-squares system `G d = b` is solved iteratively, where
//! `G` accumulates windowed gradient products of the previous frame and `b`
//! accumulates gradient-weighted temporal differences, both sampled
//! bilinearly. A point is dropped when the normalized minimum eigenvalue of
//! `G` falls below threshold or the point leaves the image.
//!
//! Pyramid levels are stored as f32 for throughput; all samples in a window
//! share one fractional offset, so the bilinear reads are four multiplies on
//! contiguous rows.

use crate::error::Error;
use crate::features::FeaturePoint;
use crate::imgproc::FloatImage;
use crate::params::FlowSettings;
use crate::Result;

/// Lucas-Kanade solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    /// Integration window side in pixels; odd.
    pub window: usize,
    /// Pyramid level count including the base image. Levels are capped per
    /// image so the coarsest level still holds one window.
    pub pyramid_levels: usize,
    /// Maximum iterations per level.
    pub max_iters: usize,
    /// Convergence threshold on the iteration step, in pixels.
    pub eps: f64,
    /// Minimum eigenvalue of `G`, normalized by window area, below which a
    /// point is declared untrackable.
    pub min_eig_threshold: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            window: 21,
            pyramid_levels: 3,
            max_iters: 30,
            eps: 0.01,
            min_eig_threshold: 1e-4,
        }
    }
}

impl From<FlowSettings> for FlowParams {
    fn from(s: FlowSettings) -> FlowParams {
        FlowParams {
            window: s.window,
            pyramid_levels: s.levels,
            max_iters: s.iters,
            eps: s.eps,
            min_eig_threshold: s.min_eig,
        }
    }
}

/// One point's trajectory across the clip.
#[derive(Debug, Clone)]
pub struct TrackSeries {
    pub point_id: usize,
    /// Per-frame x positions; truncated at the frame where the point was lost.
    pub x: Vec<f64>,
    /// Per-frame y positions, same length as `x`.
    pub y: Vec<f64>,
    /// False once lost; never resurrected.
    pub alive: bool,
}

impl TrackSeries {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

struct Level {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

/// Image pyramid; level 0 is the full-resolution image.
pub struct Pyramid {
    levels: Vec<Level>,
}

impl Pyramid {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn base_dims(&self) -> (u32, u32) {
        (self.levels[0].width as u32, self.levels[0].height as u32)
    }
}

/// Build a pyramid by 2x2 box downsampling. The level count is capped so the
/// coarsest level still spans at least one integration window.
pub fn build_pyramid(img: &FloatImage, max_levels: usize, window: usize) -> Pyramid {
    let base = Level {
        width: img.width as usize,
        height: img.height as usize,
        data: img.data.iter().map(|&v| v as f32).collect(),
    };
    let mut levels = vec![base];
    while levels.len() < max_levels {
        let cur = levels.last().unwrap();
        let (nw, nh) = (cur.width / 2, cur.height / 2);
        if nw.min(nh) < window {
            break;
        }
        let mut data = vec![0.0f32; nw * nh];
        for y in 0..nh {
            let r0 = 2 * y * cur.width;
            let r1 = r0 + cur.width;
            for x in 0..nw {
                let c = 2 * x;
                data[y * nw + x] = 0.25
                    * (cur.data[r0 + c]
                        + cur.data[r0 + c + 1]
                        + cur.data[r1 + c]
                        + cur.data[r1 + c + 1]);
            }
        }
        levels.push(Level {
            width: nw,
            height: nh,
            data,
        });
    }
    Pyramid { levels }
}

/// Shared bilinear weights for a patch whose samples all sit at one
/// fractional offset, with the column range split into left-clamped,
/// interior and right-clamped segments.
struct PatchGrid {
    xi: i64,
    yi: i64,
    w00: f32,
    w10: f32,
    w01: f32,
    w11: f32,
    /// (1-fy) and fy: the collapsed weights on clamped columns.
    wy0: f32,
    wy1: f32,
    j_lo: usize,
    j_hi: usize,
}

impl PatchGrid {
    #[inline]
    fn new(level: &Level, x0: f64, y0: f64, pw: usize) -> PatchGrid {
        let xi = x0.floor();
        let yi = y0.floor();
        let fx = (x0 - xi) as f32;
        let fy = (y0 - yi) as f32;
        let (xi, yi) = (xi as i64, yi as i64);
        let j_lo = (-xi).clamp(0, pw as i64) as usize;
        let j_hi = (level.width as i64 - 1 - xi).clamp(j_lo as i64, pw as i64) as usize;
        PatchGrid {
            xi,
            yi,
            w00: (1.0 - fx) * (1.0 - fy),
            w10: fx * (1.0 - fy),
            w01: (1.0 - fx) * fy,
            w11: fx * fy,
            wy0: 1.0 - fy,
            wy1: fy,
            j_lo,
            j_hi,
        }
    }

    #[inline]
    fn rows<'a>(&self, level: &'a Level, row: usize) -> (&'a [f32], &'a [f32]) {
        let h = level.height as i64;
        let w = level.width;
        let y0c = (self.yi + row as i64).clamp(0, h - 1) as usize;
        let y1c = (self.yi + row as i64 + 1).clamp(0, h - 1) as usize;
        (
            &level.data[y0c * w..y0c * w + w],
            &level.data[y1c * w..y1c * w + w],
        )
    }
}

/// Sample a `pw x ph` patch with top-left corner at sub-pixel `(x0, y0)`;
/// out-of-range samples clamp to the border (edge replication).
fn sample_patch(level: &Level, x0: f64, y0: f64, pw: usize, ph: usize, out: &mut [f32]) {
    let g = PatchGrid::new(level, x0, y0, pw);
    let w = level.width;
    for row in 0..ph {
        let (r0, r1) = g.rows(level, row);
        let dst = &mut out[row * pw..(row + 1) * pw];
        let left = g.wy0 * r0[0] + g.wy1 * r1[0];
        for d in dst[..g.j_lo].iter_mut() {
            *d = left;
        }
        if g.j_hi > g.j_lo {
            let base = (g.xi + g.j_lo as i64) as usize;
            let n = g.j_hi - g.j_lo;
            let s0 = &r0[base..base + n + 1];
            let s1 = &r1[base..base + n + 1];
            for j in 0..n {
                dst[g.j_lo + j] =
                    g.w00 * s0[j] + g.w10 * s0[j + 1] + g.w01 * s1[j] + g.w11 * s1[j + 1];
            }
        }
        let right = g.wy0 * r0[w - 1] + g.wy1 * r1[w - 1];
        for d in dst[g.j_hi..].iter_mut() {
            *d = right;
        }
    }
}

/// One solver iteration's right-hand side: sample the current window in the
/// next frame and accumulate the gradient-weighted temporal difference in a
/// single fused pass.
fn residual_step(
    level: &Level,
    x0: f64,
    y0: f64,
    win: usize,
    i0: &[f32],
    ix: &[f32],
    iy: &[f32],
) -> (f64, f64) {
    let g = PatchGrid::new(level, x0, y0, win);
    let w = level.width;
    let mut bx = 0.0f32;
    let mut by = 0.0f32;
    for row in 0..win {
        let (r0, r1) = g.rows(level, row);
        let i0r = &i0[row * win..(row + 1) * win];
        let ixr = &ix[row * win..(row + 1) * win];
        let iyr = &iy[row * win..(row + 1) * win];
        let left = g.wy0 * r0[0] + g.wy1 * r1[0];
        for j in 0..g.j_lo {
            let dt = i0r[j] - left;
            bx += ixr[j] * dt;
            by += iyr[j] * dt;
        }
        if g.j_hi > g.j_lo {
            let base = (g.xi + g.j_lo as i64) as usize;
            let n = g.j_hi - g.j_lo;
            let s0 = &r0[base..base + n + 1];
            let s1 = &r1[base..base + n + 1];
            for j in 0..n {
                let s = g.w00 * s0[j] + g.w10 * s0[j + 1] + g.w01 * s1[j] + g.w11 * s1[j + 1];
                let k = g.j_lo + j;
                let dt = i0r[k] - s;
                bx += ixr[k] * dt;
                by += iyr[k] * dt;
            }
        }
        let right = g.wy0 * r0[w - 1] + g.wy1 * r1[w - 1];
        for j in g.j_hi..win {
            let dt = i0r[j] - right;
            bx += ixr[j] * dt;
            by += iyr[j] * dt;
        }
    }
    (bx as f64, by as f64)
}

/// Scratch buffers reused across points and frames.
struct LkScratch {
    /// (window+2)^2 patch of the previous frame, for in-patch gradients.
    p0ext: Vec<f32>,
    /// window^2 template and gradient patches.
    i0: Vec<f32>,
    ix: Vec<f32>,
    iy: Vec<f32>,
}

impl LkScratch {
    fn new(window: usize) -> LkScratch {
        LkScratch {
            p0ext: vec![0.0; (window + 2) * (window + 2)],
            i0: vec![0.0; window * window],
            ix: vec![0.0; window * window],
            iy: vec![0.0; window * window],
        }
    }
}

/// Track one point across one frame pair. Returns the new position, or None
/// when the point is lost.
fn track_point(
    prev: &Pyramid,
    next: &Pyramid,
    x: f64,
    y: f64,
    params: &FlowParams,
    scratch: &mut LkScratch,
) -> Option<(f64, f64)> {
    let win = params.window;
    let half = (win / 2) as f64;
    let ext = win + 2;
    let area = (win * win) as f64;
    let n_levels = prev.levels.len().min(next.levels.len());

    let mut u = 0.0;
    let mut v = 0.0;
    for lvl in (0..n_levels).rev() {
        if lvl + 1 < n_levels {
            u *= 2.0;
            v *= 2.0;
        }
        let img0 = &prev.levels[lvl];
        let img1 = &next.levels[lvl];
        let scale = 1.0 / (1u32 << lvl) as f64;
        let px = x * scale;
        let py = y * scale;
        if px < 0.0 || py < 0.0 || px > (img0.width - 1) as f64 || py > (img0.height - 1) as f64 {
            return None;
        }

        // previous-frame patch with a 1 px skirt for the gradient stencil
        sample_patch(
            img0,
            px - half - 1.0,
            py - half - 1.0,
            ext,
            ext,
            &mut scratch.p0ext,
        );

        // Sobel gradients inside the patch, normalized so a unit ramp has
        // gradient 1 (the raw kernels scale by 8)
        let mut gxx = 0.0f64;
        let mut gxy = 0.0f64;
        let mut gyy = 0.0f64;
        for i in 0..win {
            let up = i * ext;
            let mid = (i + 1) * ext;
            let dn = (i + 2) * ext;
            let p = &scratch.p0ext;
            for j in 0..win {
                let ix = (p[up + j + 2] + 2.0 * p[mid + j + 2] + p[dn + j + 2]
                    - p[up + j]
                    - 2.0 * p[mid + j]
                    - p[dn + j])
                    * 0.125;
                let iy = (p[dn + j] + 2.0 * p[dn + j + 1] + p[dn + j + 2]
                    - p[up + j]
                    - 2.0 * p[up + j + 1]
                    - p[up + j + 2])
                    * 0.125;
                scratch.i0[i * win + j] = p[mid + j + 1];
                scratch.ix[i * win + j] = ix;
                scratch.iy[i * win + j] = iy;
                gxx += (ix * ix) as f64;
                gxy += (ix * iy) as f64;
                gyy += (iy * iy) as f64;
            }
        }

        let d = gxx - gyy;
        let min_eig = 0.5 * ((gxx + gyy) - (d * d + 4.0 * gxy * gxy).sqrt());
        if min_eig / area < params.min_eig_threshold {
            return None;
        }
        let det = gxx * gyy - gxy * gxy;
        if det <= 0.0 {
            return None;
        }
        let inv_det = 1.0 / det;

        for _ in 0..params.max_iters {
            let (bx, by) = residual_step(
                img1,
                px + u - half,
                py + v - half,
                win,
                &scratch.i0,
                &scratch.ix,
                &scratch.iy,
            );
            let du = inv_det * (gyy * bx - gxy * by);
            let dv = inv_det * (gxx * by - gxy * bx);
            u += du;
            v += dv;
            if du * du + dv * dv < params.eps * params.eps {
                break;
            }
        }
    }

    let nx = x + u;
    let ny = y + v;
    let base = &next.levels[0];
    if nx < 0.0 || ny < 0.0 || nx > (base.width - 1) as f64 || ny > (base.height - 1) as f64 {
        return None;
    }
    Some((nx, ny))
}

/// One flow step between two frames for a set of points.
///
/// Returns each point's updated position together with a tracked/lost status;
/// lost points keep their previous position.
pub fn lk_flow_step(
    prev: &FloatImage,
    next: &FloatImage,
    pts: &[FeaturePoint],
    params: &FlowParams,
) -> Result<Vec<(FeaturePoint, bool)>> {
    if prev.width != next.width || prev.height != next.height {
        return Err(Error::DimensionMismatch {
            expected_w: prev.width,
            expected_h: prev.height,
            got_w: next.width,
            got_h: next.height,
            context: "optical flow frame pair".into(),
        });
    }
    let prev_pyr = build_pyramid(prev, params.pyramid_levels, params.window);
    let next_pyr = build_pyramid(next, params.pyramid_levels, params.window);
    let mut scratch = LkScratch::new(params.window);
    Ok(pts
        .iter()
        .map(
            |p| match track_point(&prev_pyr, &next_pyr, p.x, p.y, params, &mut scratch) {
                Some((nx, ny)) => (
                    FeaturePoint {
                        x: nx,
                        y: ny,
                        response: p.response,
                    },
                    true,
                ),
                None => (*p, false),
            },
        )
        .collect())
}

/// Track points across a full in-memory clip. See [`track_points_streamed`].
pub fn track_points(
    frames: &[FloatImage],
    initial: &[FeaturePoint],
    params: &FlowParams,
) -> Result<Vec<TrackSeries>> {
    track_points_streamed(frames.len(), |i| Ok(frames[i].clone()), initial, params)
}

/// Track points by chaining flow steps over consecutive frames, pulling
/// frames from a producer so whole clips never need to sit in memory.
///
/// A point lost between frames `t-1` and `t` has its series truncated at `t`
/// and `alive = false`. Fails with [`Error::TrackingCollapse`] when every
/// point is lost before half the clip.
pub fn track_points_streamed(
    n_frames: usize,
    mut frame_at: impl FnMut(usize) -> Result<FloatImage>,
    initial: &[FeaturePoint],
    params: &FlowParams,
) -> Result<Vec<TrackSeries>> {
    assert!(n_frames >= 2, "need at least 2 frames to track");
    assert!(!initial.is_empty(), "need at least one initial point");

    let first = frame_at(0)?;
    let (w, h) = (first.width, first.height);
    let mut prev_pyr = build_pyramid(&first, params.pyramid_levels, params.window);
    drop(first);

    let mut tracks: Vec<TrackSeries> = initial
        .iter()
        .enumerate()
        .map(|(id, p)| TrackSeries {
            point_id: id,
            x: vec![p.x],
            y: vec![p.y],
            alive: true,
        })
        .collect();
    let mut scratch = LkScratch::new(params.window);

    for t in 1..n_frames {
        if tracks.iter().all(|tr| !tr.alive) {
            break;
        }
        let next = frame_at(t)?;
        if next.width != w || next.height != h {
            return Err(Error::DimensionMismatch {
                expected_w: w,
                expected_h: h,
                got_w: next.width,
                got_h: next.height,
                context: format!("frame {t}"),
            });
        }
        let next_pyr = build_pyramid(&next, params.pyramid_levels, params.window);
        for tr in tracks.iter_mut().filter(|tr| tr.alive) {
            let (x, y) = (*tr.x.last().unwrap(), *tr.y.last().unwrap());
            match track_point(&prev_pyr, &next_pyr, x, y, params, &mut scratch) {
                Some((nx, ny)) => {
                    tr.x.push(nx);
                    tr.y.push(ny);
                }
                None => tr.alive = false,
            }
        }
        prev_pyr = next_pyr;
    }

    if tracks.iter().all(|tr| !tr.alive) {
        let lost_by = tracks.iter().map(|tr| tr.len()).max().unwrap_or(0);
        if 2 * lost_by < n_frames {
            return Err(Error::TrackingCollapse {
                n_points: tracks.len(),
                lost_by,
                n_frames,
            });
        }
    }
    Ok(tracks)
}
