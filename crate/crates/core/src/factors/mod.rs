//! Complexity factors at object, scene and background level.
//!
//! Every factor either yields a number or a [`Measured::Missing`] with the
//! reason it could not be computed. Missing values are kept out of aggregates
//! rather than replaced by zero.

pub mod background;
pub mod object;
pub mod scene;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maskgeo::{erode_boundary, BinaryMask};

pub use background::{
    analyze_background, bg_color_gradient, bg_fg_color_similarity, bg_shape_irregularity, BackgroundFactorRecord,
    RegionIrregularity, ShapeIrregularity, DEFAULT_HUNGARIAN_BUDGET,
};
pub use object::{
    analyze_objects, object_candidate_factors, object_color_gradient, object_shape_concavity, ObjectCandidates,
    ObjectFactorRecord,
};
pub use scene::{
    analyze_scene, inter_object_color_similarity, inter_object_shape_variation, scene_candidate_factors,
    SceneCandidates, SceneFactorRecord, COLOR_SAMPLE_BUDGET, UNIT_BOX,
};

/// Largest possible RGB distance, `255 * sqrt(3)`.
pub const MAX_COLOR_DISTANCE: f64 = 441.672_955_930_063_7;

/// A computed quantity, or the reason it is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Measured<T> {
    Value(T),
    Missing { missing: String },
}

pub type FactorValue = Measured<f64>;

impl<T> Measured<T> {
    pub fn get(&self) -> Option<&T> {
        match self {
            Measured::Value(v) => Some(v),
            Measured::Missing { .. } => None,
        }
    }

    pub fn missing_reason(&self) -> Option<&str> {
        match self {
            Measured::Value(_) => None,
            Measured::Missing { missing } => Some(missing),
        }
    }
}

impl Measured<f64> {
    pub fn value(&self) -> Option<f64> {
        self.get().copied()
    }
}

impl<T> From<Result<T>> for Measured<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Measured::Value(v),
            Err(e) => Measured::Missing { missing: e.to_string() },
        }
    }
}

/// Which factor families to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FactorSelection {
    pub object: bool,
    pub scene: bool,
    pub background: bool,
    pub candidates: bool,
}

impl FactorSelection {
    pub fn all() -> Self {
        Self {
            object: true,
            scene: true,
            background: true,
            candidates: true,
        }
    }

    /// Parses `object,scene,background,candidates` or `all`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut sel = Self::default();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "all" => sel = Self::all(),
                "object" => sel.object = true,
                "scene" => sel.scene = true,
                "background" => sel.background = true,
                "candidates" => sel.candidates = true,
                other => return Err(Error::InvalidConfig(format!("unknown factor family '{other}'"))),
            }
        }
        if sel == Self::default() {
            return Err(Error::InvalidConfig("empty factor selection".into()));
        }
        Ok(sel)
    }
}

/// Mean of a per-pixel field over `mask` after stripping one boundary layer.
pub(crate) fn eroded_mean(field: &[f64], mask: &BinaryMask) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let inner = erode_boundary(mask, 1);
    if inner.is_empty() {
        return Err(Error::EmptyAfterErosion);
    }
    let (sum, n) = inner
        .iter_indices()
        .fold((0.0, 0usize), |(s, n), i| (s + field[i], n + 1));
    Ok(sum / n as f64)
}

pub(crate) fn color_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d: f64 = (0..3).map(|c| (a[c] - b[c]) * (a[c] - b[c])).sum();
    d.sqrt()
}

pub(crate) fn rgb_f64(c: [u8; 3]) -> [f64; 3] {
    [c[0] as f64, c[1] as f64, c[2] as f64]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_distance_constant() {
        assert!((MAX_COLOR_DISTANCE - 255.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn selection_parsing() {
        assert_eq!(FactorSelection::parse("all").unwrap(), FactorSelection::all());
        let s = FactorSelection::parse("object,background").unwrap();
        assert!(s.object && s.background && !s.scene && !s.candidates);
        assert!(FactorSelection::parse("objects").is_err());
        assert!(FactorSelection::parse("").is_err());
    }

    #[test]
    fn factor_value_json_shape() {
        let v = serde_json::to_string(&FactorValue::Value(0.5)).unwrap();
        assert_eq!(v, "0.5");
        let m = FactorValue::from(Err::<f64, _>(Error::TooFewObjects(1)));
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"missing\":"));
        let back: FactorValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
