//! Binary-mask geometry: hulls, components, distance transforms, erosion and
//! the approximate maximal inscribed convex set.
//!
//! Coordinates are pixel centers with `x` growing right and `y` growing down.

mod components;
mod contour;
mod distance;
mod hull;
mod inscribed;
mod morphology;

pub use components::{connected_components, subcontour_regions, Connectivity};
pub use contour::{contour_area, contour_perimeter};
pub use distance::{
    constrained_distance_transform, euclidean_sq_distance_transform, nearest_feature_transform,
    DistanceMap, INFINITE_DISTANCE,
};
pub use hull::{convex_hull, ConvexHullResult};
pub use inscribed::{
    deficiency_depth, max_inscribed_convex_set, max_inscribed_convex_set_traced,
    InscribedConvexState, CONVEXITY_DEPTH,
};
pub use morphology::{boundary_pixels, erode_boundary};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "bit count must equal width*height");
        Self {
            width,
            height,
            bits,
        }
    }

    /// Builds a mask from rows of `#` (set) and any other character (unset).
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        Self::from_fn(width, height, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Bounds-checked lookup; anything outside the raster is unset.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn get_index(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    #[inline]
    pub fn set_index(&mut self, idx: usize, v: bool) {
        self.bits[idx] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn iter_coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.iter_indices().map(move |i| (i % w, i / w))
    }

    fn check_dims(&self, other: &BinaryMask) {
        assert!(
            self.width == other.width && self.height == other.height,
            "mask dimensions differ: {}x{} vs {}x{}",
            self.width,
            self.height,
            other.width,
            other.height
        );
    }

    pub fn union(&self, other: &BinaryMask) -> BinaryMask {
        self.check_dims(other);
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &BinaryMask) -> BinaryMask {
        self.check_dims(other);
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &BinaryMask) -> BinaryMask {
        self.check_dims(other);
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    pub fn intersection_count(&self, other: &BinaryMask) -> usize {
        self.check_dims(other);
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(&a, &b)| a && b)
            .count()
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.check_dims(other);
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Extracts the window at `(x0, y0)` of size `w`×`h`; pixels outside the
    /// source raster read as unset.
    pub fn window(&self, x0: isize, y0: isize, w: usize, h: usize) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            self.get_signed(x0 + x as isize, y0 + y as isize)
        })
    }

    /// Writes the set pixels of `src` (placed at `(x0, y0)`) into `self`,
    /// clearing window pixels that are unset in `src`.
    pub fn paste_window(&mut self, src: &BinaryMask, x0: isize, y0: isize) {
        for y in 0..src.height {
            for x in 0..src.width {
                let tx = x0 + x as isize;
                let ty = y0 + y as isize;
                if tx >= 0 && ty >= 0 && (tx as usize) < self.width && (ty as usize) < self.height {
                    self.set(tx as usize, ty as usize, src.get(x, y));
                }
            }
        }
    }

    /// Shifts the mask by `(dx, dy)`; pixels pushed off the raster are lost.
    pub fn translate(&self, dx: isize, dy: isize) -> BinaryMask {
        self.window(-dx, -dy, self.width, self.height)
    }

    /// Rotates the raster by 90° clockwise.
    pub fn rotate90(&self) -> BinaryMask {
        let (w, h) = (self.width, self.height);
        BinaryMask::from_fn(h, w, |x, y| self.get(y, h - 1 - x))
    }

    /// Integer upscaling: every pixel becomes a `factor`×`factor` block.
    pub fn upscale(&self, factor: usize) -> BinaryMask {
        BinaryMask::from_fn(self.width * factor, self.height * factor, |x, y| {
            self.get(x / factor, y / factor)
        })
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut bb: Option<BoundingBox> = None;
        for (x, y) in self.iter_coords() {
            match bb.as_mut() {
                None => {
                    bb = Some(BoundingBox {
                        min_x: x,
                        min_y: y,
                        max_x: x,
                        max_y: y,
                    })
                }
                Some(b) => {
                    b.min_x = b.min_x.min(x);
                    b.max_x = b.max_x.max(x);
                    b.max_y = y;
                }
            }
        }
        bb
    }
}

/// Tight axis-aligned box with inclusive pixel bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BoundingBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.max_x - self.min_x + 1
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y + 1
    }

    /// Diagonal vector `(width, height)` in pixels.
    pub fn diagonal(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    pub fn diagonal_norm(&self) -> f64 {
        let (w, h) = self.diagonal();
        ((w * w + h * h) as f64).sqrt()
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }
}

pub fn bounding_box(mask: &BinaryMask) -> Result<BoundingBox> {
    mask.bounding_box().ok_or(Error::EmptyMask)
}
