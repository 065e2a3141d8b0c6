//! Raster containers: 8-bit RGB images and 16-bit instance label maps.

use image::imageops::FilterType;

use crate::error::{Error, Result};
use crate::maskgeo::BinaryMask;

/// Packed row-major RGB image, three 8-bit samples per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, [0, 0, 0])
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&color);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch {
                what: format!("image must be non-empty, got {width}x{height}"),
            });
        }
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                what: format!(
                    "rgb buffer of {} bytes for {width}x{height} image",
                    data.len()
                ),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn get_index(&self, idx: usize) -> [u8; 3] {
        let i = idx * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&c);
    }

    #[inline]
    pub fn set_index(&mut self, idx: usize, c: [u8; 3]) {
        let i = idx * 3;
        self.data[i..i + 3].copy_from_slice(&c);
    }

    /// Integer luma, `round(0.299 R + 0.587 G + 0.114 B)` with halves rounded up.
    pub fn grayscale(&self) -> Vec<u8> {
        self.data
            .chunks_exact(3)
            .map(|p| luma(p[0], p[1], p[2]))
            .collect()
    }

    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> RgbImage {
        let mut out = Vec::with_capacity(w * h * 3);
        for y in y0..y0 + h {
            let start = (y * self.width + x0) * 3;
            out.extend_from_slice(&self.data[start..start + w * 3]);
        }
        RgbImage {
            width: w,
            height: h,
            data: out,
        }
    }

    /// Bilinear (triangle filter) resize. Identity when the size is unchanged.
    pub fn resize_bilinear(&self, w: usize, h: usize) -> RgbImage {
        if w == self.width && h == self.height {
            return self.clone();
        }
        let buf = image::RgbImage::from_raw(self.width as u32, self.height as u32, self.data.clone())
            .expect("buffer length checked at construction");
        let out = image::imageops::resize(&buf, w as u32, h as u32, FilterType::Triangle);
        RgbImage {
            width: w,
            height: h,
            data: out.into_raw(),
        }
    }

    /// Mean color over the pixels selected by `mask`, or `None` if it is empty.
    pub fn mean_color(&self, mask: &BinaryMask) -> Option<[f64; 3]> {
        let mut sum = [0u64; 3];
        let mut n = 0u64;
        for idx in mask.iter_indices() {
            let c = self.get_index(idx);
            for k in 0..3 {
                sum[k] += c[k] as u64;
            }
            n += 1;
        }
        if n == 0 {
            return None;
        }
        Some(sum.map(|s| s as f64 / n as f64))
    }

    /// Per-channel mean rounded half-up, in exact integer arithmetic.
    pub fn mean_color_rounded(&self, mask: &BinaryMask) -> Option<[u8; 3]> {
        let mut sum = [0u64; 3];
        let mut n = 0u64;
        for idx in mask.iter_indices() {
            let c = self.get_index(idx);
            for k in 0..3 {
                sum[k] += c[k] as u64;
            }
            n += 1;
        }
        if n == 0 {
            return None;
        }
        Some(sum.map(|s| ((2 * s + n) / (2 * n)) as u8))
    }
}

#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let v = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((v + 500) / 1000) as u8
}

/// Per-pixel instance ids; 0 is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u16>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            labels: vec![0; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, labels: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                what: format!("{} labels for {width}x{height} map", labels.len()),
            });
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_raw(&self) -> &[u16] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.labels[y * self.width + x]
    }

    #[inline]
    pub fn get_index(&self, idx: usize) -> u16 {
        self.labels[idx]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        self.labels[y * self.width + x] = v;
    }

    #[inline]
    pub fn set_index(&mut self, idx: usize, v: u16) {
        self.labels[idx] = v;
    }

    /// Sorted distinct non-zero labels.
    pub fn object_ids(&self) -> Vec<u16> {
        let mut seen = vec![false; u16::MAX as usize + 1];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        (1..=u16::MAX).filter(|&l| seen[l as usize]).collect()
    }

    pub fn mask_of(&self, label: u16) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| self.get(x, y) == label)
    }

    pub fn background(&self) -> BinaryMask {
        self.mask_of(0)
    }

    pub fn foreground(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| self.get(x, y) != 0)
    }

    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> LabelMap {
        let mut out = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            let start = y * self.width + x0;
            out.extend_from_slice(&self.labels[start..start + w]);
        }
        LabelMap {
            width: w,
            height: h,
            labels: out,
        }
    }

    /// Nearest-neighbour resize; output labels are always a subset of input labels.
    pub fn resize_nearest(&self, w: usize, h: usize) -> LabelMap {
        if w == self.width && h == self.height {
            return self.clone();
        }
        let sx = self.width as f64 / w as f64;
        let sy = self.height as f64 / h as f64;
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h {
            let src_y = (((y as f64 + 0.5) * sy).floor() as usize).min(self.height - 1);
            for x in 0..w {
                let src_x = (((x as f64 + 0.5) * sx).floor() as usize).min(self.width - 1);
                out.push(self.labels[src_y * self.width + src_x]);
            }
        }
        LabelMap {
            width: w,
            height: h,
            labels: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_matches_weights() {
        assert_eq!(luma(0, 0, 0), 0);
        assert_eq!(luma(255, 255, 255), 255);
        // 0.299 * 255 = 76.245
        assert_eq!(luma(255, 0, 0), 76);
        // 0.587 * 255 = 149.685
        assert_eq!(luma(0, 255, 0), 150);
    }

    #[test]
    fn rounded_mean_is_half_up() {
        let mut img = RgbImage::new(2, 1);
        img.set(1, 0, [255, 1, 0]);
        let mask = BinaryMask::full(2, 1);
        assert_eq!(img.mean_color_rounded(&mask), Some([128, 1, 0]));
    }

    #[test]
    fn nearest_resize_keeps_label_subset() {
        let mut lm = LabelMap::new(7, 5);
        lm.set(1, 1, 3);
        lm.set(5, 4, 9);
        let r = lm.resize_nearest(3, 2);
        for l in r.object_ids() {
            assert!(lm.object_ids().contains(&l));
        }
    }

    #[test]
    fn from_raw_rejects_bad_length() {
        assert!(RgbImage::from_raw(2, 2, vec![0; 11]).is_err());
        assert!(LabelMap::from_raw(2, 2, vec![0; 3]).is_err());
    }
}
