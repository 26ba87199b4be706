//! Runtime-tunable parameters with file and key=value override support.
//!
//! Every knob the pipeline exposes lives here so a single `Params` value can be
//! threaded through the runner. Values load from a TOML file and individual
//! keys can be overridden with dotted `key=value` pairs, e.g.
//! `features.quality=0.02` or `roi.small.w_mul=1.3`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Chest-box geometry for one ROI size class, as multiples of the face box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoiScale {
    /// Chest width as a multiple of face width.
    pub w_mul: f64,
    /// Chest height as a multiple of face height.
    pub h_mul: f64,
    /// Top edge offset below the face top, as a multiple of face height.
    pub y_off_mul: f64,
}

/// ROI multipliers for the three size classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoiParams {
    pub small: RoiScale,
    pub medium: RoiScale,
    pub large: RoiScale,
}

// Partially specified [roi.<size>] tables must fall back to that size's own
// defaults, so deserialization merges onto RoiParams::default().
impl<'de> Deserialize<'de> for RoiParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Default, Deserialize)]
        #[serde(default)]
        struct PartialScale {
            w_mul: Option<f64>,
            h_mul: Option<f64>,
            y_off_mul: Option<f64>,
        }
        #[derive(Default, Deserialize)]
        #[serde(default)]
        struct PartialRoi {
            small: PartialScale,
            medium: PartialScale,
            large: PartialScale,
        }
        let partial = PartialRoi::deserialize(d)?;
        let mut out = RoiParams::default();
        for (scale, part) in [
            (&mut out.small, &partial.small),
            (&mut out.medium, &partial.medium),
            (&mut out.large, &partial.large),
        ] {
            if let Some(v) = part.w_mul {
                scale.w_mul = v;
            }
            if let Some(v) = part.h_mul {
                scale.h_mul = v;
            }
            if let Some(v) = part.y_off_mul {
                scale.y_off_mul = v;
            }
        }
        Ok(out)
    }
}

impl Default for RoiParams {
    fn default() -> Self {
        RoiParams {
            small: RoiScale {
                w_mul: 1.2,
                h_mul: 0.8,
                y_off_mul: 1.2,
            },
            medium: RoiScale {
                w_mul: 1.6,
                h_mul: 1.0,
                y_off_mul: 1.2,
            },
            large: RoiScale {
                w_mul: 2.0,
                h_mul: 1.2,
                y_off_mul: 1.2,
            },
        }
    }
}

/// Corner detection and selection settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureParams {
    /// Maximum number of corners to keep.
    pub max_count: usize,
    /// Relative quality threshold in (0, 1): keep pixels with R >= quality * max(R).
    pub quality: f64,
    /// Non-maximum-suppression radius in pixels.
    pub min_dist: f64,
    /// Harris k coefficient (standard range 0.04..=0.06).
    pub harris_k: f64,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            max_count: 100,
            quality: 0.01,
            min_dist: 7.0,
            harris_k: 0.04,
        }
    }
}

/// Band-pass, trimming and peak-picking settings for the signal stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalParams {
    /// Band-pass low cutoff in Hz.
    pub low_hz: f64,
    /// Band-pass high cutoff in Hz.
    pub high_hz: f64,
    /// Butterworth prototype order.
    pub order: usize,
    /// Fraction of tracks dropped from each end of the variance ranking.
    pub trim_fraction: f64,
    /// Minimum peak prominence in z-units.
    pub min_prominence: f64,
}

impl Default for SignalParams {
    fn default() -> Self {
        SignalParams {
            low_hz: 0.1,
            high_hz: 0.45,
            order: 4,
            trim_fraction: 1.0 / 3.0,
            min_prominence: 0.5,
        }
    }
}

/// Lucas-Kanade flow settings (see [`crate::tracking::FlowParams`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowSettings {
    /// Integration window side in pixels, odd.
    pub window: usize,
    /// Pyramid level count including the base level.
    pub levels: usize,
    /// Maximum solver iterations per level.
    pub iters: usize,
    /// Convergence threshold on the update step, in pixels.
    pub eps: f64,
    /// Minimum normalized eigenvalue of the spatial gradient matrix.
    pub min_eig: f64,
}

impl Default for FlowSettings {
    fn default() -> Self {
        FlowSettings {
            window: 21,
            levels: 3,
            iters: 30,
            eps: 0.01,
            min_eig: 1e-4,
        }
    }
}

/// All pipeline parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Params {
    pub roi: RoiParams,
    pub features: FeatureParams,
    pub flow: FlowSettings,
    pub signal: SignalParams,
}

impl Params {
    /// Load parameters from a TOML file; missing keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Params> {
        let text = std::fs::read_to_string(path)?;
        let params: Params =
            toml::from_str(&text).map_err(|e| Error::ConfigError(format!("{path:?}: {e}")))?;
        params.validate()?;
        Ok(params)
    }

    /// Apply one `key=value` override with a dotted key such as
    /// `signal.high_hz` or `roi.large.h_mul`.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::ConfigError(format!("expected key=value, got {assignment:?}")))?;
        let key = key.trim();
        let value = value.trim();

        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::ConfigError(format!("invalid value {value:?} for {key}")))
        }

        match key {
            "features.max_count" => self.features.max_count = parse(key, value)?,
            "features.quality" => self.features.quality = parse(key, value)?,
            "features.min_dist" => self.features.min_dist = parse(key, value)?,
            "features.harris_k" => self.features.harris_k = parse(key, value)?,
            "flow.window" => self.flow.window = parse(key, value)?,
            "flow.levels" => self.flow.levels = parse(key, value)?,
            "flow.iters" => self.flow.iters = parse(key, value)?,
            "flow.eps" => self.flow.eps = parse(key, value)?,
            "flow.min_eig" => self.flow.min_eig = parse(key, value)?,
            "signal.low_hz" => self.signal.low_hz = parse(key, value)?,
            "signal.high_hz" => self.signal.high_hz = parse(key, value)?,
            "signal.order" => self.signal.order = parse(key, value)?,
            "signal.trim_fraction" => self.signal.trim_fraction = parse(key, value)?,
            "signal.min_prominence" => self.signal.min_prominence = parse(key, value)?,
            _ => {
                // roi.<size>.<field>
                let mut parts = key.split('.');
                let (Some("roi"), Some(size), Some(field), None) =
                    (parts.next(), parts.next(), parts.next(), parts.next())
                else {
                    return Err(Error::ConfigError(format!("unknown key {key:?}")));
                };
                let scale = match size {
                    "small" => &mut self.roi.small,
                    "medium" => &mut self.roi.medium,
                    "large" => &mut self.roi.large,
                    _ => return Err(Error::ConfigError(format!("unknown ROI size {size:?}"))),
                };
                match field {
                    "w_mul" => scale.w_mul = parse(key, value)?,
                    "h_mul" => scale.h_mul = parse(key, value)?,
                    "y_off_mul" => scale.y_off_mul = parse(key, value)?,
                    _ => return Err(Error::ConfigError(format!("unknown key {key:?}"))),
                }
            }
        }
        self.validate()
    }

    /// Reject parameter combinations the pipeline cannot honor.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::ConfigError(msg));
        for (name, s) in [
            ("small", self.roi.small),
            ("medium", self.roi.medium),
            ("large", self.roi.large),
        ] {
            if s.w_mul <= 0.0 || s.h_mul <= 0.0 {
                return err(format!("roi.{name}: multipliers must be positive"));
            }
        }
        if self.features.max_count < 1 {
            return err("features.max_count must be >= 1".into());
        }
        if !(self.features.quality > 0.0 && self.features.quality < 1.0) {
            return err("features.quality must lie in (0, 1)".into());
        }
        if !(0.04..=0.06).contains(&self.features.harris_k) {
            return err("features.harris_k must lie in [0.04, 0.06]".into());
        }
        if self.flow.window.is_multiple_of(2) || self.flow.window < 3 {
            return err("flow.window must be odd and >= 3".into());
        }
        if self.flow.levels < 1 || self.flow.iters < 1 {
            return err("flow.levels and flow.iters must be >= 1".into());
        }
        if self.flow.eps <= 0.0 || self.flow.min_eig <= 0.0 {
            return err("flow.eps and flow.min_eig must be positive".into());
        }
        if !(self.signal.low_hz > 0.0 && self.signal.low_hz < self.signal.high_hz) {
            return err("signal cutoffs must satisfy 0 < low_hz < high_hz".into());
        }
        if self.signal.order < 1 {
            return err("signal.order must be >= 1".into());
        }
        if !(self.signal.trim_fraction > 0.0 && self.signal.trim_fraction < 0.5) {
            return err("signal.trim_fraction must lie in (0, 0.5)".into());
        }
        if self.signal.min_prominence < 0.0 {
            return err("signal.min_prominence must be >= 0".into());
        }
        Ok(())
    }
}
