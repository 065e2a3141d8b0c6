//! Inter-object factors of one scene.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{color_distance, rgb_f64, FactorValue, Measured, MAX_COLOR_DISTANCE};
use crate::dataset::SceneRecord;
use crate::error::{Error, Result};
use crate::filters::local_entropy;
use crate::maskgeo::{boundary_pixels, nearest_feature_transform, BinaryMask};
use crate::sampling::{rng_for, stratified_subsample};

/// Pixels per object kept for the colour-set distances.
pub const COLOR_SAMPLE_BUDGET: usize = 1024;
/// Side of the square raster that boxes are normalized into.
pub const UNIT_BOX: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneCandidates {
    pub chamfer_color_similarity: f64,
    pub hausdorff_color_similarity: f64,
    pub boundary_shape_similarity: f64,
    pub shape_entropy: f64,
    pub centroid_proximity: f64,
    pub chamfer_proximity: f64,
    pub area_variation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFactorRecord {
    pub object_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inter_object_color_similarity: Option<FactorValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inter_object_shape_variation: Option<FactorValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidates: Option<Measured<SceneCandidates>>,
}

fn require_pairs(scene: &SceneRecord) -> Result<()> {
    match scene.object_count() {
        k if k < 2 => Err(Error::TooFewObjects(k)),
        _ => Ok(()),
    }
}

/// Mean of `f` over unordered pairs.
fn pair_mean<T>(items: &[T], mut f: impl FnMut(&T, &T) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            sum += f(&items[i], &items[j]);
            n += 1;
        }
    }
    sum / n as f64
}

/// `1 - mean pairwise distance of object mean colours / (255 sqrt 3)`.
pub fn inter_object_color_similarity(scene: &SceneRecord) -> Result<f64> {
    require_pairs(scene)?;
    let means: Vec<[f64; 3]> = scene
        .object_masks()
        .iter()
        .map(|(_, m)| scene.image.mean_color(m).expect("inventory objects are nonempty"))
        .collect();
    let d = pair_mean(&means, |a, b| color_distance(*a, *b));
    Ok((1.0 - d / MAX_COLOR_DISTANCE).clamp(0.0, 1.0))
}

/// Mean norm of pairwise differences between bounding-box diagonal vectors.
pub fn inter_object_shape_variation(scene: &SceneRecord) -> Result<f64> {
    require_pairs(scene)?;
    let diags: Vec<(f64, f64)> = scene
        .objects
        .iter()
        .map(|o| {
            let (w, h) = o.bbox.diagonal();
            (w as f64, h as f64)
        })
        .collect();
    Ok(pair_mean(&diags, |a, b| (a.0 - b.0).hypot(a.1 - b.1)))
}

/// Distinct colours of a pixel sample with their multiplicities.
fn color_histogram(colors: impl Iterator<Item = [u8; 3]>) -> Vec<([f64; 3], f64)> {
    let mut counts: BTreeMap<[u8; 3], usize> = BTreeMap::new();
    for c in colors {
        *counts.entry(c).or_default() += 1;
    }
    counts.into_iter().map(|(c, k)| (rgb_f64(c), k as f64)).collect()
}

/// Directed (chamfer, hausdorff) distance from colour set `a` to `b`.
fn directed_color_distances(a: &[([f64; 3], f64)], b: &[([f64; 3], f64)]) -> (f64, f64) {
    let mut weighted = 0.0;
    let mut total = 0.0;
    let mut worst: f64 = 0.0;
    for &(ca, k) in a {
        let nearest = b.iter().map(|&(cb, _)| color_distance(ca, cb)).fold(f64::INFINITY, f64::min);
        weighted += k * nearest;
        total += k;
        worst = worst.max(nearest);
    }
    (weighted / total, worst)
}

/// Resamples the mask's bounding box into a `UNIT_BOX` square, keeping the
/// aspect ratio and centring the shorter side.
fn unit_box(mask: &BinaryMask) -> BinaryMask {
    let bb = mask.bounding_box().expect("nonempty mask");
    let (w, h) = (bb.width() as f64, bb.height() as f64);
    let s = UNIT_BOX as f64 / w.max(h);
    let nw = ((w * s).round() as usize).clamp(1, UNIT_BOX);
    let nh = ((h * s).round() as usize).clamp(1, UNIT_BOX);
    let (ox, oy) = ((UNIT_BOX - nw) / 2, (UNIT_BOX - nh) / 2);
    BinaryMask::from_fn(UNIT_BOX, UNIT_BOX, |x, y| {
        if x < ox || y < oy || x >= ox + nw || y >= oy + nh {
            return false;
        }
        let sx = (((x - ox) as f64 + 0.5) * w / nw as f64) as usize;
        let sy = (((y - oy) as f64 + 0.5) * h / nh as f64) as usize;
        mask.get(bb.min_x + sx.min(bb.width() - 1), bb.min_y + sy.min(bb.height() - 1))
    })
}

fn iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let inter = a.intersection_count(b);
    let union = a.count() + b.count() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// The seven exploratory inter-object candidates. Colour-set distances use a
/// seeded stratified sample of at most [`COLOR_SAMPLE_BUDGET`] pixels per object.
pub fn scene_candidate_factors(scene: &SceneRecord, seed: u64) -> Result<SceneCandidates> {
    require_pairs(scene)?;
    let (w, h) = (scene.width(), scene.height());
    let masks = scene.object_masks();

    let color_sets: Vec<Vec<([f64; 3], f64)>> = masks
        .iter()
        .map(|(id, m)| {
            let pixels: Vec<usize> = m.iter_indices().collect();
            let mut rng = rng_for(seed, &[scene.id.as_bytes(), b"color-set", &id.to_le_bytes()]);
            let sample = stratified_subsample(&pixels, COLOR_SAMPLE_BUDGET, &mut rng);
            color_histogram(sample.into_iter().map(|i| scene.image.get_index(i)))
        })
        .collect();
    let set_pairs: Vec<(f64, f64)> = pair_values(&color_sets, |a, b| {
        let (cab, hab) = directed_color_distances(a, b);
        let (cba, hba) = directed_color_distances(b, a);
        ((cab + cba) / 2.0, (hab + hba) / 2.0)
    });
    let chamfer = set_pairs.iter().map(|p| p.0).sum::<f64>() / set_pairs.len() as f64;
    let hausdorff = set_pairs.iter().map(|p| p.1).sum::<f64>() / set_pairs.len() as f64;

    let outlines: Vec<BinaryMask> = masks.iter().map(|(_, m)| boundary_pixels(&unit_box(m))).collect();
    let boundary_similarity = pair_mean(&outlines, iou);

    let labels = scene.masks.as_raw();
    let (entropy_sum, entropy_n) = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| local_entropy(labels, w, h, x, y))
        .filter(|&e| e > 0.0)
        .fold((0.0, 0usize), |(s, n), e| (s + e, n + 1));
    let shape_entropy = if entropy_n == 0 {
        0.0
    } else {
        entropy_sum / entropy_n as f64
    };

    let centroids: Vec<(f64, f64)> = masks
        .iter()
        .map(|(_, m)| {
            let n = m.count() as f64;
            let (sx, sy) = m
                .iter_coords()
                .fold((0.0, 0.0), |(a, b), (x, y)| (a + x as f64, b + y as f64));
            (sx / n, sy / n)
        })
        .collect();
    let centroid_proximity = pair_mean(&centroids, |a, b| (a.0 - b.0).hypot(a.1 - b.1));

    let fields: Vec<Vec<f64>> = masks
        .iter()
        .map(|(_, m)| nearest_feature_transform(m).0.into_iter().map(f64::sqrt).collect())
        .collect();
    let directed = |from: usize, to: usize| -> f64 {
        let m = &masks[from].1;
        m.iter_indices().map(|i| fields[to][i]).sum::<f64>() / m.count() as f64
    };
    let idx: Vec<usize> = (0..masks.len()).collect();
    let chamfer_proximity = pair_mean(&idx, |&a, &b| (directed(a, b) + directed(b, a)) / 2.0);

    let areas: Vec<f64> = scene.objects.iter().map(|o| o.pixel_count as f64).collect();
    let area_variation = pair_mean(&areas, |a, b| (a - b).abs());

    Ok(SceneCandidates {
        chamfer_color_similarity: (1.0 - chamfer / MAX_COLOR_DISTANCE).clamp(0.0, 1.0),
        hausdorff_color_similarity: (1.0 - hausdorff / MAX_COLOR_DISTANCE).clamp(0.0, 1.0),
        boundary_shape_similarity: boundary_similarity,
        shape_entropy,
        centroid_proximity,
        chamfer_proximity,
        area_variation,
    })
}

fn pair_values<T, R>(items: &[T], mut f: impl FnMut(&T, &T) -> R) -> Vec<R> {
    let mut out = Vec::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            out.push(f(&items[i], &items[j]));
        }
    }
    out
}

pub fn analyze_scene(scene: &SceneRecord, primary: bool, candidates: bool, seed: u64) -> SceneFactorRecord {
    SceneFactorRecord {
        object_count: scene.object_count(),
        inter_object_color_similarity: primary.then(|| inter_object_color_similarity(scene).into()),
        inter_object_shape_variation: primary.then(|| inter_object_shape_variation(scene).into()),
        candidates: candidates.then(|| scene_candidate_factors(scene, seed).into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{LabelMap, RgbImage};

    /// Scene with axis-aligned rectangles `(x0, y0, w, h, color)`.
    fn scene_of(size: usize, rects: &[(usize, usize, usize, usize, [u8; 3])]) -> SceneRecord {
        let mut img = RgbImage::filled(size, size, [0, 0, 0]);
        let mut labels = LabelMap::new(size, size);
        for (k, &(x0, y0, w, h, c)) in rects.iter().enumerate() {
            for y in y0..y0 + h {
                for x in x0..x0 + w {
                    img.set(x, y, c);
                    labels.set(x, y, k as u16 + 1);
                }
            }
        }
        SceneRecord::new("t", img, labels).unwrap()
    }

    #[test]
    fn shared_color_is_fully_similar() {
        let s = scene_of(32, &[(1, 1, 5, 5, [9, 9, 9]), (10, 10, 4, 6, [9, 9, 9])]);
        assert_eq!(inter_object_color_similarity(&s).unwrap(), 1.0);
    }

    #[test]
    fn black_and_white_are_dissimilar() {
        let s = scene_of(32, &[(1, 1, 5, 5, [0, 0, 0]), (10, 10, 4, 6, [255, 255, 255])]);
        assert!(inter_object_color_similarity(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn primaries_similarity() {
        let s = scene_of(
            40,
            &[
                (1, 1, 5, 5, [255, 0, 0]),
                (10, 10, 4, 6, [0, 255, 0]),
                (20, 20, 4, 6, [0, 0, 255]),
            ],
        );
        let want = 1.0 - 2f64.sqrt() / 3f64.sqrt();
        assert!((inter_object_color_similarity(&s).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn too_few_objects() {
        let s = scene_of(16, &[(1, 1, 5, 5, [1, 1, 1])]);
        assert!(matches!(inter_object_color_similarity(&s), Err(Error::TooFewObjects(1))));
        assert!(matches!(inter_object_shape_variation(&s), Err(Error::TooFewObjects(1))));
        assert!(scene_candidate_factors(&s, 0).is_err());
        let rec = analyze_scene(&s, true, true, 0);
        assert!(rec.inter_object_color_similarity.unwrap().value().is_none());
    }

    #[test]
    fn shape_variation_values() {
        let same = scene_of(40, &[(1, 1, 6, 4, [1, 0, 0]), (20, 20, 6, 4, [2, 0, 0])]);
        assert_eq!(inter_object_shape_variation(&same).unwrap(), 0.0);
        let s = scene_of(64, &[(1, 1, 10, 10, [1, 0, 0]), (20, 20, 40, 40, [2, 0, 0])]);
        assert!((inter_object_shape_variation(&s).unwrap() - 1800f64.sqrt()).abs() < 1e-12);
        let swapped = scene_of(64, &[(20, 20, 40, 40, [2, 0, 0]), (1, 1, 10, 10, [1, 0, 0])]);
        assert_eq!(
            inter_object_shape_variation(&s).unwrap(),
            inter_object_shape_variation(&swapped).unwrap()
        );
    }

    #[test]
    fn candidate_examples() {
        let s = scene_of(32, &[(0, 0, 1, 1, [7, 7, 7]), (3, 4, 1, 1, [7, 7, 7])]);
        let c = scene_candidate_factors(&s, 1).unwrap();
        assert_eq!(c.centroid_proximity, 5.0);
        assert_eq!(c.chamfer_color_similarity, 1.0);
        assert_eq!(c.area_variation, 0.0);
        assert_eq!(c.chamfer_proximity, 5.0);
        assert_eq!(c.boundary_shape_similarity, 1.0);
    }

    #[test]
    fn chamfer_never_exceeds_hausdorff() {
        let mut img = RgbImage::new(24, 24);
        let mut labels = LabelMap::new(24, 24);
        for y in 0..24 {
            for x in 0..24 {
                let l = if x < 12 { 1 } else { 2 };
                labels.set(x, y, l);
                img.set(x, y, [(x * 10) as u8, (y * 7) as u8, ((x * y) % 256) as u8]);
            }
        }
        let s = SceneRecord::new("c", img, labels).unwrap();
        let c = scene_candidate_factors(&s, 3).unwrap();
        assert!(c.chamfer_color_similarity >= c.hausdorff_color_similarity);
        assert!(c.shape_entropy > 0.0);
    }

    #[test]
    fn directed_distance_oracle() {
        let a = vec![([0.0, 0.0, 0.0], 2.0), ([10.0, 0.0, 0.0], 1.0)];
        let b = vec![([3.0, 4.0, 0.0], 1.0)];
        let (c, h) = directed_color_distances(&a, &b);
        let d2 = (49.0f64 + 16.0).sqrt();
        assert!((c - (2.0 * 5.0 + d2) / 3.0).abs() < 1e-12);
        assert!((h - d2).abs() < 1e-12);
    }

    #[test]
    fn unit_box_keeps_aspect_and_centres() {
        let m = BinaryMask::from_fn(40, 40, |x, y| (4..20).contains(&x) && (10..18).contains(&y));
        let u = unit_box(&m);
        let bb = u.bounding_box().unwrap();
        assert_eq!((bb.width(), bb.height()), (32, 16));
        assert_eq!((bb.min_y, bb.max_y), (8, 23));
        assert_eq!(u.count(), 32 * 16);
    }

    #[test]
    fn permutation_invariance() {
        let a = scene_of(48, &[(1, 1, 10, 5, [200, 10, 0]), (20, 5, 4, 12, [0, 90, 10]), (5, 30, 9, 9, [3, 3, 250])]);
        let b = scene_of(48, &[(5, 30, 9, 9, [3, 3, 250]), (1, 1, 10, 5, [200, 10, 0]), (20, 5, 4, 12, [0, 90, 10])]);
        let (ca, cb) = (scene_candidate_factors(&a, 9).unwrap(), scene_candidate_factors(&b, 9).unwrap());
        let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
        assert!(close(ca.centroid_proximity, cb.centroid_proximity));
        assert!(close(ca.chamfer_proximity, cb.chamfer_proximity));
        assert!(close(ca.area_variation, cb.area_variation));
        assert!(close(ca.boundary_shape_similarity, cb.boundary_shape_similarity));
        assert!(close(ca.chamfer_color_similarity, cb.chamfer_color_similarity));
        assert!(close(
            inter_object_color_similarity(&a).unwrap(),
            inter_object_color_similarity(&b).unwrap()
        ));
    }
}
