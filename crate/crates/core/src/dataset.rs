//! Scene records, the on-disk dataset layout, and scene preparation.
//!
//! Layout under a dataset root:
//!
//! ```text
//! manifest.json          {"version", "split", "ids", "provenance"}
//! images/<id>.png        8-bit RGB
//! masks/<id>.png         16-bit grayscale label map, 0 = background
//! pred/<id>/<k>.png      optional 8-bit soft masks, value / 255 = probability
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageBuffer, ImageReader, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{LabelMap, RgbImage};
use crate::maskgeo::{BinaryMask, BoundingBox};
use crate::metrics::{SegmentationPrediction, SoftMask};
use crate::sampling::derive_seed;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectInfo {
    pub id: u16,
    pub pixel_count: usize,
    pub bbox: BoundingBox,
}

/// One image with its instance label map and object inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneRecord {
    pub id: String,
    pub image: RgbImage,
    pub masks: LabelMap,
    pub objects: Vec<ObjectInfo>,
}

impl SceneRecord {
    /// Validates dimensions and derives the object inventory from the label map.
    pub fn new(id: impl Into<String>, image: RgbImage, masks: LabelMap) -> Result<Self> {
        if image.width() != masks.width() || image.height() != masks.height() {
            return Err(Error::DimensionMismatch {
                what: format!(
                    "image {}x{} vs mask {}x{}",
                    image.width(),
                    image.height(),
                    masks.width(),
                    masks.height()
                ),
            });
        }
        let objects = inventory(&masks);
        Ok(Self {
            id: id.into(),
            image,
            masks,
            objects,
        })
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_mask(&self, id: u16) -> BinaryMask {
        self.masks.mask_of(id)
    }

    /// Masks of all objects, in inventory (ascending id) order.
    pub fn object_masks(&self) -> Vec<(u16, BinaryMask)> {
        let (w, h) = (self.width(), self.height());
        let mut slot = vec![usize::MAX; u16::MAX as usize + 1];
        let mut out: Vec<(u16, BinaryMask)> = self
            .objects
            .iter()
            .enumerate()
            .map(|(k, o)| {
                slot[o.id as usize] = k;
                (o.id, BinaryMask::new(w, h))
            })
            .collect();
        for (i, &l) in self.masks.as_raw().iter().enumerate() {
            if l != 0 {
                out[slot[l as usize]].1.set_index(i, true);
            }
        }
        out
    }

    pub fn background_mask(&self) -> BinaryMask {
        self.masks.background()
    }

    pub fn foreground_mask(&self) -> BinaryMask {
        self.masks.foreground()
    }

    /// Rebuilds the record after its label map changed.
    pub fn refreshed(self) -> Self {
        let objects = inventory(&self.masks);
        Self { objects, ..self }
    }
}

fn inventory(masks: &LabelMap) -> Vec<ObjectInfo> {
    let mut acc: BTreeMap<u16, (usize, BoundingBox)> = BTreeMap::new();
    let w = masks.width();
    for (i, &l) in masks.as_raw().iter().enumerate() {
        if l == 0 {
            continue;
        }
        let (x, y) = (i % w, i / w);
        acc.entry(l)
            .and_modify(|(n, b)| {
                *n += 1;
                b.min_x = b.min_x.min(x);
                b.max_x = b.max_x.max(x);
                b.min_y = b.min_y.min(y);
                b.max_y = b.max_y.max(y);
            })
            .or_insert((
                1,
                BoundingBox {
                    min_x: x,
                    min_y: y,
                    max_x: x,
                    max_y: y,
                },
            ));
    }
    acc.into_iter()
        .map(|(id, (pixel_count, bbox))| ObjectInfo {
            id,
            pixel_count,
            bbox,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    #[default]
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(skip)]
    pub root: PathBuf,
    pub version: u32,
    pub split: Split,
    /// Sorted lexicographically.
    pub ids: Vec<String>,
    #[serde(default)]
    pub provenance: BTreeMap<String, serde_json::Value>,
}

impl DatasetManifest {
    pub fn image_path(&self, id: &str) -> PathBuf {
        self.root.join("images").join(format!("{id}.png"))
    }

    pub fn mask_path(&self, id: &str) -> PathBuf {
        self.root.join("masks").join(format!("{id}.png"))
    }

    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref();
        let path = root.join("manifest.json");
        if !path.exists() {
            return Err(Error::MissingFile { path });
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut m: DatasetManifest =
            serde_json::from_str(&text).map_err(|source| Error::Json { path: path.clone(), source })?;
        m.root = root.to_path_buf();
        m.ids.sort();
        Ok(m)
    }
}

pub fn read_rgb_png(path: &Path) -> Result<RgbImage> {
    let img = decode(path)?;
    let rgb = img.to_rgb8();
    let (w, h) = rgb.dimensions();
    RgbImage::from_raw(w as usize, h as usize, rgb.into_raw())
}

/// Reads a grayscale label map stored as 16-bit or 8-bit PNG.
pub fn read_label_png(path: &Path) -> Result<LabelMap> {
    let img = decode(path)?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let labels: Vec<u16> = match img {
        DynamicImage::ImageLuma16(b) => b.into_raw(),
        DynamicImage::ImageLuma8(b) => b.into_raw().into_iter().map(u16::from).collect(),
        other => {
            return Err(Error::CorruptPng {
                path: path.to_path_buf(),
                msg: format!("label map must be grayscale, found {:?}", other.color()),
            })
        }
    };
    LabelMap::from_raw(w, h, labels)
}

fn decode(path: &Path) -> Result<DynamicImage> {
    if !path.exists() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    let corrupt = |msg: String| Error::CorruptPng {
        path: path.to_path_buf(),
        msg,
    };
    ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| corrupt(e.to_string()))
}

pub fn write_rgb_png(path: &Path, img: &RgbImage) -> Result<()> {
    let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.as_raw().to_vec())
        .expect("validated buffer");
    save(path, &DynamicImage::ImageRgb8(buf))
}

pub fn write_label_png(path: &Path, labels: &LabelMap) -> Result<()> {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(labels.width() as u32, labels.height() as u32, labels.as_raw().to_vec())
            .expect("validated buffer");
    save(path, &DynamicImage::ImageLuma16(buf))
}

fn save(path: &Path, img: &DynamicImage) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::io(path, std::io::Error::other(other.to_string())),
        })
}

pub fn load_scene(manifest: &DatasetManifest, id: &str) -> Result<SceneRecord> {
    if manifest.ids.binary_search_by(|s| s.as_str().cmp(id)).is_err() {
        return Err(Error::UnknownId(id.to_string()));
    }
    let image = read_rgb_png(&manifest.image_path(id))?;
    let masks = read_label_png(&manifest.mask_path(id))?;
    SceneRecord::new(id, image, masks)
}

/// Writes images, label maps and `manifest.json` under `root`.
pub fn write_dataset(
    scenes: &[SceneRecord],
    root: &Path,
    split: Split,
    provenance: BTreeMap<String, serde_json::Value>,
) -> Result<DatasetManifest> {
    let mut ids: Vec<String> = scenes.iter().map(|s| s.id.clone()).collect();
    ids.sort();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateId(w[0].clone()));
    }
    let manifest = DatasetManifest {
        root: root.to_path_buf(),
        version: MANIFEST_VERSION,
        split,
        ids,
        provenance,
    };
    for s in scenes {
        write_scene(root, s)?;
    }
    write_manifest(&manifest)?;
    Ok(manifest)
}

/// Writes one scene's image and label map under `root`, without touching the
/// manifest.
pub fn write_scene(root: &Path, scene: &SceneRecord) -> Result<()> {
    write_rgb_png(&root.join("images").join(format!("{}.png", scene.id)), &scene.image)?;
    write_label_png(&root.join("masks").join(format!("{}.png", scene.id)), &scene.masks)
}

pub fn write_manifest(manifest: &DatasetManifest) -> Result<()> {
    fs::create_dir_all(&manifest.root).map_err(|e| Error::io(&manifest.root, e))?;
    let path = manifest.root.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CropMode {
    /// Largest centered square.
    CenterSquare,
    /// Centered crop of the given width and height.
    Fixed { width: usize, height: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepareConfig {
    pub crop: CropMode,
    pub target_size: usize,
    pub min_objects: usize,
    pub max_objects: usize,
    /// Per-object area bounds as fractions of the target area, when enabled.
    pub area_fraction: Option<(f64, f64)>,
    pub blank_background: bool,
}

impl Default for PrepareConfig {
    fn default() -> Self {
        Self {
            crop: CropMode::CenterSquare,
            target_size: 128,
            min_objects: 2,
            max_objects: 6,
            area_fraction: None,
            blank_background: false,
        }
    }
}

pub const DEFAULT_AREA_FRACTION: (f64, f64) = (0.007, 0.2);

impl PrepareConfig {
    fn validate(&self) -> Result<()> {
        if self.target_size == 0 {
            return Err(Error::InvalidConfig("target size must be positive".into()));
        }
        if let CropMode::Fixed { width, height } = self.crop {
            if width == 0 || height == 0 {
                return Err(Error::InvalidConfig("crop size must be positive".into()));
            }
        }
        if self.min_objects > self.max_objects {
            return Err(Error::InvalidConfig(format!(
                "min objects {} exceeds max objects {}",
                self.min_objects, self.max_objects
            )));
        }
        if let Some((lo, hi)) = self.area_fraction {
            if !(lo >= 0.0 && lo <= hi && hi <= 1.0) {
                return Err(Error::InvalidConfig(format!("bad area fraction bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Center crop, resize to `target_size`², drop objects outside the area
/// bounds, and keep the scene only if its object count is within bounds.
pub fn prepare_scene(
    id: &str,
    image: &RgbImage,
    masks: &LabelMap,
    cfg: &PrepareConfig,
) -> Result<Option<SceneRecord>> {
    cfg.validate()?;
    if image.width() != masks.width() || image.height() != masks.height() {
        return Err(Error::DimensionMismatch {
            what: format!(
                "image {}x{} vs mask {}x{}",
                image.width(),
                image.height(),
                masks.width(),
                masks.height()
            ),
        });
    }
    let (w, h) = (image.width(), image.height());
    let (cw, ch) = match cfg.crop {
        CropMode::CenterSquare => (w.min(h), w.min(h)),
        CropMode::Fixed { width, height } => (width.min(w), height.min(h)),
    };
    // floor offsets: the extra pixel of an odd margin is dropped on the right/bottom
    let (x0, y0) = ((w - cw) / 2, (h - ch) / 2);
    let t = cfg.target_size;
    let img = image.crop(x0, y0, cw, ch).resize_bilinear(t, t);
    let mut labels = masks.crop(x0, y0, cw, ch).resize_nearest(t, t);

    if let Some((lo, hi)) = cfg.area_fraction {
        let area = (t * t) as f64;
        let (min_px, max_px) = (area * lo, area * hi);
        let mut counts = vec![0usize; u16::MAX as usize + 1];
        for &l in labels.as_raw() {
            counts[l as usize] += 1;
        }
        for i in 0..t * t {
            let l = labels.get_index(i);
            if l != 0 {
                let n = counts[l as usize] as f64;
                if n < min_px || n > max_px {
                    labels.set_index(i, 0);
                }
            }
        }
    }

    let mut scene = SceneRecord::new(id, img, labels)?;
    let k = scene.object_count();
    if k < cfg.min_objects || k > cfg.max_objects {
        return Ok(None);
    }
    if cfg.blank_background {
        for i in 0..t * t {
            if scene.masks.get_index(i) == 0 {
                scene.image.set_index(i, [0, 0, 0]);
            }
        }
    }
    Ok(Some(scene))
}

/// Deterministic train/test assignment from a hash of the scene id.
pub fn split_for(id: &str, test_ratio: f64, seed: u64) -> Split {
    let h = derive_seed(seed, &[b"split", id.as_bytes()]);
    if ((h % 1_000_000) as f64) < test_ratio * 1_000_000.0 {
        Split::Test
    } else {
        Split::Train
    }
}

/// Pairs `images/<stem>.png` with `masks/<stem>.png` under a raw input
/// directory, sorted by stem.
pub fn list_raw_pairs(dir: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    let images = dir.join("images");
    let masks = dir.join("masks");
    let rd = fs::read_dir(&images).map_err(|e| Error::io(&images, e))?;
    let mut out = Vec::new();
    for entry in rd {
        let entry = entry.map_err(|e| Error::io(&images, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let mask = masks.join(format!("{stem}.png"));
        if !mask.exists() {
            return Err(Error::MissingFile { path: mask });
        }
        out.push((stem, path, mask));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn pred_dir(pred_root: &Path, id: &str) -> PathBuf {
    pred_root.join(id)
}

/// Writes soft masks as `<pred_root>/<id>/<k>.png`, plus `bg.png` when a
/// background prediction is present.
pub fn write_prediction(pred_root: &Path, pred: &SegmentationPrediction) -> Result<()> {
    let dir = pred_dir(pred_root, &pred.scene_id);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for (k, m) in pred.masks.iter().enumerate() {
        save(&dir.join(format!("{k}.png")), &soft_to_png(m))?;
    }
    if let Some(bg) = &pred.background {
        save(&dir.join("bg.png"), &soft_to_png(bg))?;
    }
    Ok(())
}

fn soft_to_png(m: &SoftMask) -> DynamicImage {
    let data: Vec<u8> = m.values().iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8).collect();
    DynamicImage::ImageLuma8(ImageBuffer::from_raw(m.width() as u32, m.height() as u32, data).expect("validated"))
}

/// Loads the predictions for one scene. A missing directory yields an empty
/// prediction set.
pub fn load_prediction(pred_root: &Path, id: &str, width: usize, height: usize) -> Result<SegmentationPrediction> {
    let dir = pred_dir(pred_root, id);
    let mut pred = SegmentationPrediction {
        scene_id: id.to_string(),
        masks: Vec::new(),
        background: None,
    };
    if !dir.is_dir() {
        return Ok(pred);
    }
    let mut indexed = Vec::new();
    for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
        let path = entry.map_err(|e| Error::io(&dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("png") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        if stem == "bg" {
            pred.background = Some(read_soft(&path, width, height)?);
        } else if let Ok(k) = stem.parse::<usize>() {
            indexed.push((k, path));
        }
    }
    indexed.sort();
    for (_, path) in indexed {
        pred.masks.push(read_soft(&path, width, height)?);
    }
    Ok(pred)
}

fn read_soft(path: &Path, width: usize, height: usize) -> Result<SoftMask> {
    let img = decode(path)?.to_luma8();
    if img.width() as usize != width || img.height() as usize != height {
        return Err(Error::DimensionMismatch {
            what: format!(
                "prediction {} is {}x{}, scene is {width}x{height}",
                path.display(),
                img.width(),
                img.height()
            ),
        });
    }
    Ok(SoftMask::from_u8(width, height, img.as_raw()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene_with(k: u16, size: usize) -> SceneRecord {
        let mut labels = LabelMap::new(size, size);
        for l in 1..=k {
            let x0 = (l as usize - 1) * 3;
            for y in 0..2 {
                for x in x0..x0 + 2 {
                    labels.set(x, y, l);
                }
            }
        }
        let mut img = RgbImage::new(size, size);
        for y in 0..size {
            for x in 0..size {
                img.set(x, y, [(x * 7) as u8, (y * 11) as u8, 5]);
            }
        }
        SceneRecord::new(format!("s{k}"), img, labels).unwrap()
    }

    #[test]
    fn inventory_counts_objects() {
        let s = scene_with(3, 16);
        assert_eq!(s.object_count(), 3);
        assert!(s.objects.iter().all(|o| o.pixel_count == 4));
        assert_eq!(s.objects[1].bbox.min_x, 3);
    }

    #[test]
    fn empty_label_map_has_no_objects() {
        let s = SceneRecord::new("z", RgbImage::new(4, 4), LabelMap::new(4, 4)).unwrap();
        assert_eq!(s.object_count(), 0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let r = SceneRecord::new("x", RgbImage::new(64, 64), LabelMap::new(128, 128));
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn center_square_crop_then_resize() {
        let img = RgbImage::filled(640, 480, [10, 20, 30]);
        let mut labels = LabelMap::new(640, 480);
        for y in 100..300 {
            for x in 100..250 {
                labels.set(x, y, 1);
            }
            for x in 300..500 {
                labels.set(x, y, 2);
            }
        }
        let out = prepare_scene("a", &img, &labels, &PrepareConfig::default()).unwrap().unwrap();
        assert_eq!((out.width(), out.height()), (128, 128));
        assert_eq!(out.object_count(), 2);
        // 480x480 crop starts at x = 80
        let o1 = out.objects[0].bbox;
        let expected_min = ((100 - 80) as f64 * 128.0 / 480.0).floor() as usize;
        assert!((o1.min_x as isize - expected_min as isize).abs() <= 1);
    }

    #[test]
    fn small_objects_are_filtered_by_area() {
        let img = RgbImage::new(128, 128);
        let mut labels = LabelMap::new(128, 128);
        // 50 px (below 114.7), 3200 px and 800 px objects
        for i in 0..50 {
            labels.set(i % 10, i / 10, 1);
        }
        for y in 20..60 {
            for x in 20..100 {
                labels.set(x, y, 2);
            }
        }
        for y in 70..90 {
            for x in 20..60 {
                labels.set(x, y, 3);
            }
        }
        let cfg = PrepareConfig {
            area_fraction: Some(DEFAULT_AREA_FRACTION),
            ..Default::default()
        };
        let out = prepare_scene("a", &img, &labels, &cfg).unwrap().unwrap();
        assert_eq!(out.objects.iter().map(|o| o.id).collect::<Vec<_>>(), vec![2, 3]);
    }

    #[test]
    fn too_few_objects_yields_none() {
        let img = RgbImage::new(128, 128);
        let mut labels = LabelMap::new(128, 128);
        for i in 0..50 {
            labels.set(i % 10, i / 10, 1);
        }
        for y in 20..60 {
            for x in 20..120 {
                labels.set(x, y, 2);
            }
        }
        let cfg = PrepareConfig {
            area_fraction: Some(DEFAULT_AREA_FRACTION),
            ..Default::default()
        };
        assert!(prepare_scene("a", &img, &labels, &cfg).unwrap().is_none());
    }

    #[test]
    fn invalid_config() {
        let cfg = PrepareConfig {
            min_objects: 5,
            max_objects: 2,
            ..Default::default()
        };
        let s = scene_with(2, 8);
        assert!(matches!(
            prepare_scene("a", &s.image, &s.masks, &cfg),
            Err(Error::InvalidConfig(_))
        ));
        let cfg = PrepareConfig {
            target_size: 0,
            ..Default::default()
        };
        assert!(prepare_scene("a", &s.image, &s.masks, &cfg).is_err());
    }

    #[test]
    fn blank_background_only_touches_label_zero() {
        let s = scene_with(2, 128);
        let cfg = PrepareConfig {
            blank_background: true,
            ..Default::default()
        };
        let out = prepare_scene("a", &s.image, &s.masks, &cfg).unwrap().unwrap();
        for i in 0..128 * 128 {
            if s.masks.get_index(i) == 0 {
                assert_eq!(out.image.get_index(i), [0, 0, 0]);
            } else {
                assert_eq!(out.image.get_index(i), s.image.get_index(i));
            }
        }
        let again = prepare_scene("a", &out.image, &out.masks, &cfg).unwrap().unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn write_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let scenes = vec![scene_with(2, 16), scene_with(3, 16), scene_with(4, 16)];
        let m = write_dataset(&scenes, dir.path(), Split::Train, BTreeMap::new()).unwrap();
        assert_eq!(m.ids, vec!["s2", "s3", "s4"]);
        let reread = DatasetManifest::load(dir.path()).unwrap();
        assert_eq!(reread.ids, m.ids);
        for s in &scenes {
            assert_eq!(&load_scene(&reread, &s.id).unwrap(), s);
        }
        assert!(matches!(load_scene(&reread, "nope"), Err(Error::UnknownId(_))));
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let scenes = vec![scene_with(2, 8), scene_with(2, 8)];
        assert!(matches!(
            write_dataset(&scenes, dir.path(), Split::Train, BTreeMap::new()),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn missing_and_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_dataset(&[scene_with(2, 8)], dir.path(), Split::Test, BTreeMap::new()).unwrap();
        fs::write(m.mask_path("s2"), b"not a png").unwrap();
        assert!(matches!(load_scene(&m, "s2"), Err(Error::CorruptPng { .. })));
        fs::remove_file(m.image_path("s2")).unwrap();
        assert!(matches!(load_scene(&m, "s2"), Err(Error::MissingFile { .. })));
    }

    #[test]
    fn mismatched_files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_dataset(&[scene_with(2, 16)], dir.path(), Split::Train, BTreeMap::new()).unwrap();
        write_rgb_png(&m.image_path("s2"), &RgbImage::new(8, 8)).unwrap();
        assert!(matches!(load_scene(&m, "s2"), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn split_is_deterministic() {
        let a: Vec<Split> = (0..50).map(|i| split_for(&format!("{i}"), 0.3, 9)).collect();
        let b: Vec<Split> = (0..50).map(|i| split_for(&format!("{i}"), 0.3, 9)).collect();
        assert_eq!(a, b);
        assert!(a.contains(&Split::Test) && a.contains(&Split::Train));
    }
}
