//! Texture banks for the distinctive-texture ablations.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::read_rgb_png;
use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::maskgeo::BinaryMask;

/// Minimum tile side.
pub const MIN_TILE: usize = 128;

#[derive(Debug, Clone)]
pub struct TextureBank {
    tiles: Vec<RgbImage>,
    means: Vec<[f64; 3]>,
    source: String,
}

impl TextureBank {
    pub fn new(tiles: Vec<RgbImage>, source: impl Into<String>) -> Result<Self> {
        if tiles.is_empty() {
            return Err(Error::InvalidConfig("texture bank is empty".into()));
        }
        if let Some(t) = tiles.iter().find(|t| t.width() < MIN_TILE || t.height() < MIN_TILE) {
            return Err(Error::InvalidConfig(format!(
                "texture tile {}x{} is smaller than {MIN_TILE}x{MIN_TILE}",
                t.width(),
                t.height()
            )));
        }
        let means = tiles
            .iter()
            .map(|t| t.mean_color(&BinaryMask::full(t.width(), t.height())).expect("nonempty tile"))
            .collect();
        Ok(Self {
            tiles,
            means,
            source: source.into(),
        })
    }

    /// Every `*.png` directly inside `dir`, in file-name order.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::new();
        for entry in entries {
            let p = entry.map_err(|e| Error::io(dir, e))?.path();
            if p.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("png")) {
                paths.push(p);
            }
        }
        paths.sort();
        let tiles = paths.iter().map(|p| read_rgb_png(p)).collect::<Result<Vec<_>>>()?;
        Self::new(tiles, dir.display().to_string())
    }

    /// The shipped bank: 16 tileable 128×128 patterns, each in two shades of
    /// one palette colour, with palette colours spread across the RGB cube.
    pub fn procedural() -> Self {
        let tiles = PALETTE
            .iter()
            .enumerate()
            .map(|(k, &base)| procedural_tile(k, base))
            .collect();
        Self::new(tiles, "procedural-16").expect("procedural tiles are valid")
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tile(&self, k: usize) -> &RgbImage {
        &self.tiles[k]
    }

    pub fn mean(&self, k: usize) -> [f64; 3] {
        self.means[k]
    }

    pub fn means(&self) -> &[[f64; 3]] {
        &self.means
    }

    /// Where the tiles came from, for provenance.
    pub fn source(&self) -> &str {
        &self.source
    }
}

const PALETTE: [[u8; 3]; 16] = [
    [0, 0, 0],
    [255, 255, 255],
    [255, 0, 0],
    [0, 255, 0],
    [0, 0, 255],
    [0, 255, 255],
    [255, 0, 255],
    [255, 255, 0],
    [255, 128, 0],
    [128, 0, 255],
    [0, 255, 128],
    [255, 0, 128],
    [0, 128, 255],
    [128, 255, 0],
    [128, 64, 0],
    [64, 0, 128],
];

fn toward_gray(c: [u8; 3], t: f64) -> [u8; 3] {
    c.map(|v| (v as f64 + (128.0 - v as f64) * t).round() as u8)
}

fn procedural_tile(k: usize, base: [u8; 3]) -> RgbImage {
    let n = MIN_TILE;
    let dark = toward_gray(base, 0.1);
    let light = toward_gray(base, 0.45);
    let tau = std::f64::consts::TAU;
    // value noise on a wrapping 8×8 lattice keeps the tile seamless
    let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
    let lattice: Vec<f64> = (0..64).map(|_| rng.random::<f64>()).collect();
    let noise = |x: usize, y: usize| {
        let (gx, gy) = (x as f64 / 16.0, y as f64 / 16.0);
        let (x0, y0) = (gx.floor() as usize, gy.floor() as usize);
        let (fx, fy) = (gx.fract(), gy.fract());
        let at = |i: usize, j: usize| lattice[(j % 8) * 8 + i % 8];
        let top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
        let bottom = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    };
    let mut img = RgbImage::new(n, n);
    for y in 0..n {
        for x in 0..n {
            let t = match k % 8 {
                0 => ((y / 4) % 2) as f64,
                1 => ((x / 8) % 2) as f64,
                2 => (((x + y) / 8) % 2) as f64,
                3 => ((x / 16 + y / 16) % 2) as f64,
                4 => {
                    let (dx, dy) = ((x % 16) as f64 - 7.5, (y % 16) as f64 - 7.5);
                    (dx * dx + dy * dy <= 25.0) as u8 as f64
                }
                5 => ((x / 4 + y / 4) % 2) as f64,
                6 => 0.5 + 0.5 * (tau * x as f64 / 32.0).sin() * (tau * y as f64 / 32.0).sin(),
                _ => noise(x, y),
            };
            let c = [0, 1, 2].map(|i| (dark[i] as f64 + (light[i] as f64 - dark[i] as f64) * t).round() as u8);
            img.set(x, y, c);
        }
    }
    img
}
