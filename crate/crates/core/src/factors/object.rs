//! Per-object factors: colour gradient, shape concavity and the exploratory
//! candidates (colour count and entropy, non-rectangularity, incompactness,
//! discontinuity, decentralization).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{eroded_mean, FactorValue, Measured};
use crate::dataset::SceneRecord;
use crate::error::{Error, Result};
use crate::filters::{local_entropy_where, sobel_magnitude};
use crate::image::RgbImage;
use crate::maskgeo::{connected_components, contour_area, contour_perimeter, convex_hull, BinaryMask, Connectivity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectCandidates {
    pub color_count: usize,
    pub color_entropy: f64,
    pub non_rectangularity: f64,
    pub incompactness: f64,
    pub discontinuity: f64,
    pub decentralization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectFactorRecord {
    pub id: u16,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub color_gradient: Option<FactorValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shape_concavity: Option<FactorValue>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidates: Option<Measured<ObjectCandidates>>,
}

pub(crate) fn gradient_field(image: &RgbImage) -> Vec<f64> {
    sobel_magnitude(&image.grayscale(), image.width(), image.height())
}

fn check_dims(image: &RgbImage, mask: &BinaryMask) -> Result<()> {
    if (image.width(), image.height()) != (mask.width(), mask.height()) {
        return Err(Error::DimensionMismatch {
            what: format!(
                "image {}x{} vs mask {}x{}",
                image.width(),
                image.height(),
                mask.width(),
                mask.height()
            ),
        });
    }
    Ok(())
}

/// Mean Sobel magnitude of the grayscale image over the mask with its
/// boundary layer removed.
pub fn object_color_gradient(image: &RgbImage, mask: &BinaryMask) -> Result<f64> {
    check_dims(image, mask)?;
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    eroded_mean(&gradient_field(image), mask)
}

/// `1 - |mask| / |hull|`; 0 for masks under three pixels.
pub fn object_shape_concavity(mask: &BinaryMask) -> Result<f64> {
    let n = mask.count();
    if n == 0 {
        return Err(Error::EmptyMask);
    }
    if n < 3 {
        return Ok(0.0);
    }
    let hull = convex_hull(mask)?.mask.count();
    Ok((1.0 - n as f64 / hull as f64).clamp(0.0, 1.0))
}

pub fn object_candidate_factors(image: &RgbImage, mask: &BinaryMask) -> Result<ObjectCandidates> {
    check_dims(image, mask)?;
    let n = mask.count();
    let bbox = mask.bounding_box().ok_or(Error::EmptyMask)?;
    let (w, h) = (mask.width(), mask.height());

    let colors: HashSet<[u8; 3]> = mask.iter_indices().map(|i| image.get_index(i)).collect();

    let gray = image.grayscale();
    let bits = mask.bits();
    let entropy_sum: f64 = mask
        .iter_coords()
        .map(|(x, y)| local_entropy_where(&gray, w, h, x, y, |i| bits[i]))
        .sum();

    let area = contour_area(mask);
    let perimeter = contour_perimeter(mask);
    let incompactness = if perimeter > 0.0 {
        (1.0 - 4.0 * std::f64::consts::PI * area / (perimeter * perimeter)).clamp(0.0, 1.0)
    } else {
        0.0
    };

    let largest = connected_components(mask, Connectivity::Eight)
        .first()
        .map_or(0, BinaryMask::count);

    Ok(ObjectCandidates {
        color_count: colors.len(),
        color_entropy: entropy_sum / n as f64,
        non_rectangularity: 1.0 - n as f64 / bbox.area() as f64,
        incompactness,
        discontinuity: 1.0 - largest as f64 / n as f64,
        decentralization: decentralization(mask),
    })
}

/// `sum (x - mx)^2 (y - my)^2`, evaluated as `sum (n x - Sx)^2 (n y - Sy)^2 / n^4`
/// in integers so translating the mask cannot change the result.
fn decentralization(mask: &BinaryMask) -> f64 {
    let coords: Vec<(i128, i128)> = mask.iter_coords().map(|(x, y)| (x as i128, y as i128)).collect();
    let n = coords.len() as i128;
    let (sx, sy) = coords.iter().fold((0i128, 0i128), |(a, b), &(x, y)| (a + x, b + y));
    let exact = coords.iter().try_fold(0i128, |acc, &(x, y)| {
        let dx = n * x - sx;
        let dy = n * y - sy;
        let t = dx.checked_mul(dx)?.checked_mul(dy.checked_mul(dy)?)?;
        acc.checked_add(t)
    });
    let n4 = (n as f64).powi(4);
    match exact {
        Some(total) => total as f64 / n4,
        None => {
            let (mx, my) = (sx as f64 / n as f64, sy as f64 / n as f64);
            coords
                .iter()
                .map(|&(x, y)| {
                    let (dx, dy) = (x as f64 - mx, y as f64 - my);
                    dx * dx * dy * dy
                })
                .sum()
        }
    }
}

/// Factors for every object of the scene, in inventory order.
pub fn analyze_objects(scene: &SceneRecord, primary: bool, candidates: bool) -> Vec<ObjectFactorRecord> {
    let field = primary.then(|| gradient_field(&scene.image));
    scene
        .object_masks()
        .into_iter()
        .map(|(id, mask)| ObjectFactorRecord {
            id,
            color_gradient: field.as_ref().map(|f| eroded_mean(f, &mask).into()),
            shape_concavity: primary.then(|| object_shape_concavity(&mask).into()),
            candidates: candidates.then(|| object_candidate_factors(&scene.image, &mask).into()),
        })
        .collect()
}
