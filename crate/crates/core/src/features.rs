//! Structure tensor, Harris / Shi-Tomasi corner responses, and corner selection.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::imgproc::{sobel_gradients, FloatImage};
use crate::params::FeatureParams;
use crate::Result;

/// Per-pixel windowed sums of gradient products: Sxx, Sxy, Syy.
#[derive(Debug, Clone)]
pub struct StructureTensorField {
    pub width: u32,
    pub height: u32,
    pub sxx: Vec<f64>,
    pub sxy: Vec<f64>,
    pub syy: Vec<f64>,
}

/// The two corner response functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorKind {
    Harris,
    ShiTomasi,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 2] = [DetectorKind::ShiTomasi, DetectorKind::Harris];

    pub fn label(self) -> &'static str {
        match self {
            DetectorKind::Harris => "Harris",
            DetectorKind::ShiTomasi => "ShiTomasi",
        }
    }
}

/// A selected corner and its response value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeaturePoint {
    pub x: f64,
    pub y: f64,
    pub response: f64,
}

/// Windowed sums of Sobel-gradient products over a `window x window`
/// box neighborhood with replicated borders. `window` must be odd.
pub fn structure_tensor(img: &FloatImage, window: usize) -> Result<StructureTensorField> {
    if window.is_multiple_of(2) || window == 0 {
        return Err(Error::BadWindow(window));
    }
    let (ix, iy) = sobel_gradients(img)?;
    let (w, h) = (img.width as usize, img.height as usize);
    let n = w * h;
    let mut ixx = vec![0.0; n];
    let mut ixy = vec![0.0; n];
    let mut iyy = vec![0.0; n];
    for i in 0..n {
        ixx[i] = ix.data[i] * ix.data[i];
        ixy[i] = ix.data[i] * iy.data[i];
        iyy[i] = iy.data[i] * iy.data[i];
    }

    let box_sum = |src: &[f64]| -> Vec<f64> {
        let r = (window / 2) as isize;
        let mut out = vec![0.0; n];
        for y in 0..h as isize {
            for x in 0..w as isize {
                let mut acc = 0.0;
                for dy in -r..=r {
                    let cy = (y + dy).clamp(0, h as isize - 1) as usize;
                    for dx in -r..=r {
                        let cx = (x + dx).clamp(0, w as isize - 1) as usize;
                        acc += src[cy * w + cx];
                    }
                }
                out[y as usize * w + x as usize] = acc;
            }
        }
        out
    };

    Ok(StructureTensorField {
        width: img.width,
        height: img.height,
        sxx: box_sum(&ixx),
        sxy: box_sum(&ixy),
        syy: box_sum(&iyy),
    })
}

/// Evaluate the corner response for every pixel of a tensor field.
///
/// Harris: `det(M) - k * trace(M)^2`. Shi-Tomasi: smallest eigenvalue of M
/// (`k` is ignored).
pub fn corner_response(field: &StructureTensorField, kind: DetectorKind, k: f64) -> FloatImage {
    debug_assert!(
        kind != DetectorKind::Harris || (0.04..=0.06).contains(&k),
        "harris k outside [0.04, 0.06]"
    );
    let tensor = field.sxx.iter().zip(&field.sxy).zip(&field.syy);
    let data: Vec<f64> = match kind {
        DetectorKind::Harris => tensor
            .map(|((&sxx, &sxy), &syy)| {
                let det = sxx * syy - sxy * sxy;
                let trace = sxx + syy;
                det - k * trace * trace
            })
            .collect(),
        DetectorKind::ShiTomasi => tensor
            .map(|((&sxx, &sxy), &syy)| {
                let d = sxx - syy;
                0.5 * ((sxx + syy) - (d * d + 4.0 * sxy * sxy).sqrt())
            })
            .collect(),
    };
    FloatImage::new(field.width, field.height, data)
}

/// Pick at most `max_count` response maxima.
///
/// Pixels with `R >= quality * max(R)` are candidates; they are taken in
/// descending response order (ties broken by ascending y then x) and each
/// accepted point suppresses later candidates closer than `min_dist`.
pub fn select_corners(
    resp: &FloatImage,
    max_count: usize,
    quality: f64,
    min_dist: f64,
) -> Result<Vec<FeaturePoint>> {
    assert!(max_count >= 1, "max_count must be >= 1");
    assert!(quality > 0.0 && quality < 1.0, "quality must be in (0,1)");
    let max_resp = resp.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // written so a NaN response also lands in NoCorners
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(max_resp > 0.0) {
        return Err(Error::NoCorners);
    }
    let threshold = quality * max_resp;

    let w = resp.width as usize;
    let mut candidates: Vec<(f64, u32, u32)> = resp
        .data
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= threshold)
        .map(|(i, &r)| (r, (i / w) as u32, (i % w) as u32))
        .collect();
    // descending response, ties by (y, x) ascending
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let min_dist_sq = min_dist * min_dist;
    let mut kept: Vec<FeaturePoint> = Vec::new();
    for (r, y, x) in candidates {
        if kept.len() >= max_count {
            break;
        }
        let far_enough = kept.iter().all(|p| {
            let dx = p.x - x as f64;
            let dy = p.y - y as f64;
            dx * dx + dy * dy >= min_dist_sq
        });
        if far_enough {
            kept.push(FeaturePoint {
                x: x as f64,
                y: y as f64,
                response: r,
            });
        }
    }
    if kept.is_empty() {
        return Err(Error::NoCorners);
    }
    Ok(kept)
}

/// Detect corners on a filtered ROI image with the given settings.
pub fn detect_corners(
    img: &FloatImage,
    kind: DetectorKind,
    params: &FeatureParams,
) -> Result<Vec<FeaturePoint>> {
    let field = structure_tensor(img, 3)?;
    let resp = corner_response(&field, kind, params.harris_k);
    select_corners(&resp, params.max_count, params.quality, params.min_dist)
}
