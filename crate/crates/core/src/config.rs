//! The 18-way configuration matrix: 3 filters x 3 ROI sizes x 2 detectors,
//! with the standard acronyms (FLBM, LPBS, SOBM, ...).

use crate::error::Error;
use crate::features::DetectorKind;
use crate::imgproc::FilterKind;
use crate::roi::SizeClass;
use crate::Result;

/// One cell of the configuration matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PipelineConfig {
    pub filter: FilterKind,
    pub bbox: SizeClass,
    pub detector: DetectorKind,
}

/// Filter/size acronyms in canonical table order.
pub const ALL_ACRONYMS: [&str; 9] = [
    "FLBM", "FLBL", "FLBS", "LPBM", "LPBL", "LPBS", "SOBM", "SOBL", "SOBS",
];

impl PipelineConfig {
    pub fn new(filter: FilterKind, bbox: SizeClass, detector: DetectorKind) -> PipelineConfig {
        PipelineConfig {
            filter,
            bbox,
            detector,
        }
    }

    /// Four-letter filter/size acronym, e.g. `SOBM` for Sobel + medium box.
    pub fn acronym(&self) -> &'static str {
        match (self.filter, self.bbox) {
            (FilterKind::None, SizeClass::Medium) => "FLBM",
            (FilterKind::None, SizeClass::Large) => "FLBL",
            (FilterKind::None, SizeClass::Small) => "FLBS",
            (FilterKind::Laplacian, SizeClass::Medium) => "LPBM",
            (FilterKind::Laplacian, SizeClass::Large) => "LPBL",
            (FilterKind::Laplacian, SizeClass::Small) => "LPBS",
            (FilterKind::Sobel, SizeClass::Medium) => "SOBM",
            (FilterKind::Sobel, SizeClass::Large) => "SOBL",
            (FilterKind::Sobel, SizeClass::Small) => "SOBS",
        }
    }

    /// Long form, e.g. `Sobel-Bbox Medium`.
    pub fn method_name(&self) -> String {
        let filter = match self.filter {
            FilterKind::None => "Filterless",
            FilterKind::Laplacian => "Laplacian",
            FilterKind::Sobel => "Sobel",
        };
        let size = match self.bbox {
            SizeClass::Medium => "Medium",
            SizeClass::Large => "Large",
            SizeClass::Small => "Small",
        };
        format!("{filter}-Bbox {size}")
    }

    /// Report label, e.g. `Harris - SOBM`.
    pub fn label(&self) -> String {
        format!("{} - {}", self.detector.label(), self.acronym())
    }

    /// Resolve a filter/size acronym plus detector into a config.
    pub fn from_acronym(acronym: &str, detector: DetectorKind) -> Result<PipelineConfig> {
        let upper = acronym.to_ascii_uppercase();
        let (filter, bbox) = match upper.as_str() {
            "FLBM" => (FilterKind::None, SizeClass::Medium),
            "FLBL" => (FilterKind::None, SizeClass::Large),
            "FLBS" => (FilterKind::None, SizeClass::Small),
            "LPBM" => (FilterKind::Laplacian, SizeClass::Medium),
            "LPBL" => (FilterKind::Laplacian, SizeClass::Large),
            "LPBS" => (FilterKind::Laplacian, SizeClass::Small),
            "SOBM" => (FilterKind::Sobel, SizeClass::Medium),
            "SOBL" => (FilterKind::Sobel, SizeClass::Large),
            "SOBS" => (FilterKind::Sobel, SizeClass::Small),
            _ => return Err(Error::UnknownAcronym(acronym.into())),
        };
        Ok(PipelineConfig::new(filter, bbox, detector))
    }
}

/// All 18 configurations in report order: the Shi-Tomasi block first, then
/// Harris, each in acronym table order.
pub fn all_configs() -> Vec<PipelineConfig> {
    let mut configs = Vec::with_capacity(18);
    for detector in DetectorKind::ALL {
        for acronym in ALL_ACRONYMS {
            configs.push(PipelineConfig::from_acronym(acronym, detector).unwrap());
        }
    }
    configs
}
