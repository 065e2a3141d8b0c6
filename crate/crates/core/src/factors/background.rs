//! Background factors: colour gradient, background–foreground colour
//! similarity by optimal assignment, and shape irregularity of the regions the
//! background encloses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::object::gradient_field;
use super::{color_distance, eroded_mean, rgb_f64, FactorValue, Measured, MAX_COLOR_DISTANCE};
use crate::assignment::{solve_weighted, CostMatrix};
use crate::dataset::SceneRecord;
use crate::error::{Error, Result};
use crate::maskgeo::{max_inscribed_convex_set, subcontour_regions, BinaryMask};
use crate::sampling::{rng_for, stratified_subsample};

/// Pixels sampled per side for the colour assignment.
pub const DEFAULT_HUNGARIAN_BUDGET: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionIrregularity {
    pub area: usize,
    pub inscribed_area: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeIrregularity {
    pub score: f64,
    pub regions: Vec<RegionIrregularity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundFactorRecord {
    pub bg_color_gradient: FactorValue,
    pub bg_fg_color_similarity: FactorValue,
    pub bg_shape_irregularity: Measured<ShapeIrregularity>,
}

/// Mean Sobel magnitude over the background with its boundary layer removed.
pub fn bg_color_gradient(scene: &SceneRecord) -> Result<f64> {
    let bg = scene.background_mask();
    if bg.is_empty() {
        return Err(Error::EmptyBackground);
    }
    eroded_mean(&gradient_field(&scene.image), &bg)
}

fn sampled_histogram(scene: &SceneRecord, mask: &BinaryMask, budget: usize, seed: u64, side: &[u8]) -> BTreeMap<[u8; 3], usize> {
    let pixels: Vec<usize> = mask.iter_indices().collect();
    let mut rng = rng_for(seed, &[scene.id.as_bytes(), b"bg-fg", side]);
    let mut hist = BTreeMap::new();
    for i in stratified_subsample(&pixels, budget, &mut rng) {
        *hist.entry(scene.image.get_index(i)).or_insert(0usize) += 1;
    }
    hist
}

/// Samples at most `budget` pixels from each side, pairs them so the summed
/// colour distance is maximal, and returns `1 - mean paired distance / (255 sqrt 3)`.
pub fn bg_fg_color_similarity(scene: &SceneRecord, budget: usize, seed: u64) -> Result<f64> {
    let bg = sampled_histogram(scene, &scene.background_mask(), budget, seed, b"bg");
    let fg = sampled_histogram(scene, &scene.foreground_mask(), budget, seed, b"fg");
    if bg.is_empty() || fg.is_empty() {
        return Err(Error::EmptySide);
    }
    Ok(similarity_from_histograms(&bg, &fg))
}

pub(crate) fn similarity_from_histograms(bg: &BTreeMap<[u8; 3], usize>, fg: &BTreeMap<[u8; 3], usize>) -> f64 {
    let bg_colors: Vec<[f64; 3]> = bg.keys().map(|&c| rgb_f64(c)).collect();
    let fg_colors: Vec<[f64; 3]> = fg.keys().map(|&c| rgb_f64(c)).collect();
    let dist = CostMatrix::from_fn(bg_colors.len(), fg_colors.len(), |i, j| {
        color_distance(bg_colors[i], fg_colors[j])
    });
    let cost = CostMatrix::from_fn(bg_colors.len(), fg_colors.len(), |i, j| MAX_COLOR_DISTANCE - dist.get(i, j));
    let bg_counts: Vec<usize> = bg.values().copied().collect();
    let fg_counts: Vec<usize> = fg.values().copied().collect();
    let plan = solve_weighted(&cost, &bg_counts, &fg_counts);
    let pairs: usize = plan.flows.iter().map(|f| f.2).sum();
    let paired: f64 = plan.flows.iter().map(|&(i, j, k)| dist.get(i, j) * k as f64).sum();
    (1.0 - paired / pairs as f64 / MAX_COLOR_DISTANCE).clamp(0.0, 1.0)
}

/// Mean of `1 - C_i / A_i` over the regions enclosed by the background
/// contour, where `C_i` is the inscribed convex area of region `i`.
pub fn bg_shape_irregularity(scene: &SceneRecord) -> Result<ShapeIrregularity> {
    let regions = subcontour_regions(&scene.background_mask());
    if regions.is_empty() {
        return Err(Error::NoRegions);
    }
    let regions = regions
        .iter()
        .map(|r| {
            let area = r.count();
            let inscribed_area = max_inscribed_convex_set(r)?.count();
            Ok(RegionIrregularity {
                area,
                inscribed_area,
                score: 1.0 - inscribed_area as f64 / area as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let score = regions.iter().map(|r| r.score).sum::<f64>() / regions.len() as f64;
    Ok(ShapeIrregularity { score, regions })
}

pub fn analyze_background(scene: &SceneRecord, budget: usize, seed: u64) -> BackgroundFactorRecord {
    BackgroundFactorRecord {
        bg_color_gradient: bg_color_gradient(scene).into(),
        bg_fg_color_similarity: bg_fg_color_similarity(scene, budget, seed).into(),
        bg_shape_irregularity: bg_shape_irregularity(scene).into(),
    }
}
