//! Chest ROI derivation from a face bounding box.
//!
//! The chest box is centered horizontally on the face, its top edge sits
//! `y_off_mul * face.h` below the face top, and its size scales with the face
//! at three size classes. The multipliers are configurable via
//! [`crate::params::RoiParams`].

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::params::{RoiParams, RoiScale};
use crate::Result;

/// Axis-aligned pixel rectangle. `x`/`y` may go negative before clamping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x: i32,
    pub y: i32,
    pub w: u32,
    pub h: u32,
}

// On the wire a box is the array [x, y, w, h].
impl Serialize for BoundingBox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.x, self.y, self.w, self.h).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundingBox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (x, y, w, h) = Deserialize::deserialize(d)?;
        Ok(BoundingBox { x, y, w, h })
    }
}

impl BoundingBox {
    pub fn new(x: i32, y: i32, w: u32, h: u32) -> BoundingBox {
        BoundingBox { x, y, w, h }
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn center_x(&self) -> f64 {
        self.x as f64 + self.w as f64 / 2.0
    }
}

/// The three chest-box size classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Medium, SizeClass::Large, SizeClass::Small];

    pub fn scale(self, roi: &RoiParams) -> RoiScale {
        match self {
            SizeClass::Small => roi.small,
            SizeClass::Medium => roi.medium,
            SizeClass::Large => roi.large,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        }
    }
}

/// Chest box before clamping, in real coordinates rounded to integers.
fn chest_box_unclamped(face: BoundingBox, scale: RoiScale) -> BoundingBox {
    let w = (face.w as f64 * scale.w_mul).round();
    let h = (face.h as f64 * scale.h_mul).round();
    let x = (face.center_x() - w / 2.0).round();
    let y = (face.y as f64 + scale.y_off_mul * face.h as f64).round();
    BoundingBox {
        x: x as i32,
        y: y as i32,
        w: w.max(1.0) as u32,
        h: h.max(1.0) as u32,
    }
}

/// Derive the chest ROI for a size class, clamped into the frame.
///
/// Returns [`Error::RoiTooSmall`] when the clamped box is 8 px or less on
/// either side, and propagates [`Error::OutOfBounds`] when the box misses the
/// frame entirely.
pub fn chest_roi_from_face(
    face: BoundingBox,
    size: SizeClass,
    frame_w: u32,
    frame_h: u32,
    roi: &RoiParams,
) -> Result<BoundingBox> {
    let raw = chest_box_unclamped(face, size.scale(roi));
    let clamped = clamp_box(raw, frame_w, frame_h)?;
    if clamped.w <= 8 || clamped.h <= 8 {
        return Err(Error::RoiTooSmall {
            w: clamped.w,
            h: clamped.h,
        });
    }
    Ok(clamped)
}

/// Intersect `bbox` with `[0, frame_w) x [0, frame_h)`.
pub fn clamp_box(bbox: BoundingBox, frame_w: u32, frame_h: u32) -> Result<BoundingBox> {
    let x0 = bbox.x.max(0) as i64;
    let y0 = bbox.y.max(0) as i64;
    let x1 = (bbox.x as i64 + bbox.w as i64).min(frame_w as i64);
    let y1 = (bbox.y as i64 + bbox.h as i64).min(frame_h as i64);
    if x1 <= x0 || y1 <= y0 {
        return Err(Error::OutOfBounds {
            x: bbox.x as i64,
            y: bbox.y as i64,
            w: bbox.w,
            h: bbox.h,
            frame_w,
            frame_h,
        });
    }
    Ok(BoundingBox {
        x: x0 as i32,
        y: y0 as i32,
        w: (x1 - x0) as u32,
        h: (y1 - y0) as u32,
    })
}
