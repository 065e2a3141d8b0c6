//! Dataset ablations that strip one complexity factor at a time.
//!
//! | op    | effect                                                        |
//! |-------|---------------------------------------------------------------|
//! | `S`   | objects grown to their convex hulls                           |
//! | `T`   | object textures swapped for mutually distinct bank textures   |
//! | `C`   | objects flattened to their mean colour                        |
//! | `U`   | objects rescaled to a common bounding-box diagonal length     |
//! | `bgS` | regions enclosed by the background grown to their hulls       |
//! | `bgT` | background swapped for the bank texture farthest from the foreground |
//! | `bgC` | background flattened to its mean colour                       |
//!
//! Compositions always run in the order of the table. `T` before `C` makes
//! `C+T` mean "flat colour taken from a distinctive texture".

mod texture;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

pub use texture::{TextureBank, MIN_TILE};

use crate::dataset::{load_scene, write_manifest, write_scene, DatasetManifest, SceneRecord, MANIFEST_VERSION};
use crate::error::{Error, Result};
use crate::factors::color_distance;
use crate::image::{LabelMap, RgbImage};
use crate::maskgeo::{convex_hull, nearest_feature_transform, subcontour_regions, BinaryMask};
use crate::sampling::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AblationOp {
    S,
    T,
    C,
    U,
    BgS,
    BgT,
    BgC,
}

impl AblationOp {
    pub fn parse(token: &str) -> Result<Self> {
        Ok(match token.trim().to_ascii_lowercase().as_str() {
            "c" => Self::C,
            "s" => Self::S,
            "t" => Self::T,
            "u" => Self::U,
            "bgc" => Self::BgC,
            "bgt" => Self::BgT,
            "bgs" => Self::BgS,
            _ => return Err(Error::InvalidSpec(format!("unknown ablation '{}'", token.trim()))),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::C => "C",
            Self::S => "S",
            Self::T => "T",
            Self::U => "U",
            Self::BgC => "bgC",
            Self::BgT => "bgT",
            Self::BgS => "bgS",
        }
    }

    fn needs_bank(self) -> bool {
        matches!(self, Self::T | Self::BgT)
    }
}

impl fmt::Display for AblationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parses a comma-separated op list such as `C,S,T,U`.
pub fn parse_ops(list: &str) -> Result<Vec<AblationOp>> {
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(AblationOp::parse)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackgroundMode {
    Color,
    Texture,
    Shape,
}

/// A validated composition of ablations. Ops are kept in execution order.
#[derive(Debug, Clone)]
pub struct AblationSpec {
    ops: Vec<AblationOp>,
    seed: u64,
    bank: Option<TextureBank>,
}

impl AblationSpec {
    pub fn new(ops: Vec<AblationOp>, seed: u64, bank: Option<TextureBank>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidSpec("no ablations given".into()));
        }
        let mut sorted = ops;
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec(format!("ablation {} listed twice", w[0])));
        }
        if sorted.iter().any(|op| op.needs_bank()) && bank.as_ref().is_none_or(|b| b.is_empty()) {
            return Err(Error::BankMissing);
        }
        Ok(Self {
            ops: sorted,
            seed,
            bank,
        })
    }

    pub fn ops(&self) -> &[AblationOp] {
        &self.ops
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bank(&self) -> Option<&TextureBank> {
        self.bank.as_ref()
    }

    /// Dataset-style suffix, e.g. `S+T+C`.
    pub fn label(&self) -> String {
        self.ops.iter().map(|o| o.as_str()).collect::<Vec<_>>().join("+")
    }
}

fn rebuild(id: &str, image: RgbImage, masks: LabelMap) -> Result<SceneRecord> {
    SceneRecord::new(id, image, masks)
}

/// Every object flattened to its mean colour (rounded half up).
pub fn ablate_object_color(scene: &SceneRecord) -> SceneRecord {
    let mut image = scene.image.clone();
    for (_, m) in scene.object_masks() {
        let c = scene.image.mean_color_rounded(&m).expect("inventory objects are nonempty");
        for i in m.iter_indices() {
            image.set_index(i, c);
        }
    }
    SceneRecord {
        image,
        ..scene.clone()
    }
}

/// Objects ordered for painting: larger first, then by id.
fn paint_order(scene: &SceneRecord) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scene.objects.len()).collect();
    order.sort_by_key(|&k| (std::cmp::Reverse(scene.objects[k].pixel_count), scene.objects[k].id));
    order
}

fn ensure_all_present(before: &SceneRecord, after: &SceneRecord) -> Result<()> {
    for o in &before.objects {
        if after.objects.binary_search_by_key(&o.id, |a| a.id).is_err() {
            return Err(Error::ObjectVanished(o.id));
        }
    }
    Ok(())
}

/// Every object grown to its convex hull. New pixels copy the colour of the
/// nearest original pixel of the same object.
pub fn ablate_object_shape(scene: &SceneRecord) -> Result<SceneRecord> {
    let masks = scene.object_masks();
    let mut image = scene.image.clone();
    let mut labels = LabelMap::new(scene.width(), scene.height());
    for k in paint_order(scene) {
        let (id, mask) = &masks[k];
        let hull = convex_hull(mask)?.mask;
        let (_, nearest) = nearest_feature_transform(mask);
        for i in hull.iter_indices() {
            let src = if mask.get_index(i) {
                i
            } else {
                nearest[i].expect("mask is nonempty")
            };
            image.set_index(i, scene.image.get_index(src));
            labels.set_index(i, *id);
        }
    }
    let out = rebuild(&scene.id, image, labels)?;
    ensure_all_present(scene, &out)?;
    Ok(out)
}

/// Greedy max-min choice of `k` bank entries by mean colour, starting from
/// the farthest pair. Ties go to lower indices.
pub fn select_distinct_textures(bank: &TextureBank, k: usize) -> Result<Vec<usize>> {
    let n = bank.len();
    if n < k {
        return Err(Error::BankTooSmall { have: n, need: k });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == 1 || n == 1 {
        return Ok(vec![0]);
    }
    let d = |a: usize, b: usize| color_distance(bank.mean(a), bank.mean(b));
    let mut best = (0, 1);
    for a in 0..n {
        for b in a + 1..n {
            if d(a, b) > d(best.0, best.1) {
                best = (a, b);
            }
        }
    }
    let mut chosen = vec![best.0, best.1];
    while chosen.len() < k {
        let next = (0..n)
            .filter(|c| !chosen.contains(c))
            .map(|c| (c, chosen.iter().map(|&s| d(s, c)).fold(f64::INFINITY, f64::min)))
            .fold(None, |acc: Option<(usize, f64)>, (c, v)| match acc {
                Some((_, bv)) if bv >= v => acc,
                _ => Some((c, v)),
            })
            .expect("bank larger than selection")
            .0;
        chosen.push(next);
    }
    Ok(chosen)
}

fn paint_tiled(image: &mut RgbImage, mask: &BinaryMask, tile: &RgbImage, origin: (usize, usize), offset: (usize, usize)) {
    let (tw, th) = (tile.width(), tile.height());
    for (x, y) in mask.iter_coords() {
        let tx = (x - origin.0 + offset.0) % tw;
        let ty = (y - origin.1 + offset.1) % th;
        image.set(x, y, tile.get(tx, ty));
    }
}

/// Every object repainted with a tiled crop of a bank texture; the textures
/// are chosen to be mutually distinct and dealt to objects by the seed.
pub fn ablate_scene_texture(scene: &SceneRecord, bank: &TextureBank, seed: u64) -> Result<SceneRecord> {
    let mut chosen = select_distinct_textures(bank, scene.object_count())?;
    let mut rng = rng_for(seed, &[scene.id.as_bytes(), b"T"]);
    if chosen.len() == 1 {
        chosen[0] = rng.random_range(0..bank.len());
    }
    chosen.shuffle(&mut rng);
    let mut image = scene.image.clone();
    for ((_, mask), (info, &t)) in scene.object_masks().iter().zip(scene.objects.iter().zip(&chosen)) {
        let tile = bank.tile(t);
        let offset = (rng.random_range(0..tile.width()), rng.random_range(0..tile.height()));
        paint_tiled(&mut image, mask, tile, (info.bbox.min_x, info.bbox.min_y), offset);
    }
    Ok(SceneRecord {
        image,
        ..scene.clone()
    })
}

/// Bilinear colour at `(qx, qy)` using only the four neighbours inside `mask`.
fn masked_bilinear(image: &RgbImage, mask: &BinaryMask, qx: f64, qy: f64) -> Option<[u8; 3]> {
    let (x0, y0) = (qx.floor(), qy.floor());
    let (fx, fy) = (qx - x0, qy - y0);
    let mut acc = [0.0; 3];
    let mut total = 0.0;
    for (dx, dy, w) in [
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (1, 0, fx * (1.0 - fy)),
        (0, 1, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ] {
        let (sx, sy) = (x0 as isize + dx, y0 as isize + dy);
        if w > 0.0 && mask.get_signed(sx, sy) {
            let c = image.get(sx as usize, sy as usize);
            for i in 0..3 {
                acc[i] += w * c[i] as f64;
            }
            total += w;
        }
    }
    (total > 0.0).then(|| acc.map(|v| (v / total).round().clamp(0.0, 255.0) as u8))
}

/// Rescales every object about its centroid so all bounding-box diagonals
/// approach their mean length. Returns the scene and the ids of objects that
/// kept less than half of their rescaled area.
pub fn scale_objects(scene: &SceneRecord) -> Result<(SceneRecord, Vec<u16>)> {
    let k = scene.object_count();
    if k < 2 {
        return Err(Error::TooFewObjects(k));
    }
    let (w, h) = (scene.width(), scene.height());
    let masks = scene.object_masks();
    let target = scene.objects.iter().map(|o| o.bbox.diagonal_norm()).sum::<f64>() / k as f64;

    let bg = scene.background_mask();
    let (_, bg_nearest) = nearest_feature_transform(&bg);
    let mut image = scene.image.clone();
    for i in scene.foreground_mask().iter_indices() {
        let fill = bg_nearest[i].map_or([0, 0, 0], |j| scene.image.get_index(j));
        image.set_index(i, fill);
    }

    let mut labels = LabelMap::new(w, h);
    let mut painted = vec![0usize; k];
    for &o in &paint_order(scene) {
        let (id, mask) = &masks[o];
        let info = &scene.objects[o];
        let s = target / info.bbox.diagonal_norm();
        let n = info.pixel_count as f64;
        let (sx, sy) = mask
            .iter_coords()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x as f64, b + y as f64));
        let (cx, cy) = (sx / n, sy / n);
        let span = |lo: usize, hi: usize, c: f64, limit: usize| {
            let a = (c + (lo as f64 - 0.5 - c) * s).floor().max(0.0) as usize;
            let b = (c + (hi as f64 + 0.5 - c) * s).ceil().max(0.0) as usize;
            (a, b.min(limit - 1))
        };
        let (x_lo, x_hi) = span(info.bbox.min_x, info.bbox.max_x, cx, w);
        let (y_lo, y_hi) = span(info.bbox.min_y, info.bbox.max_y, cy, h);
        for py in y_lo..=y_hi.min(h - 1) {
            for px in x_lo..=x_hi.min(w - 1) {
                let qx = cx + (px as f64 - cx) / s;
                let qy = cy + (py as f64 - cy) / s;
                if !mask.get_signed(qx.round() as isize, qy.round() as isize) {
                    continue;
                }
                if let Some(c) = masked_bilinear(&scene.image, mask, qx, qy) {
                    image.set(px, py, c);
                    labels.set(px, py, *id);
                }
            }
        }
        painted[o] = (n * s * s).round() as usize;
    }
    let out = rebuild(&scene.id, image, labels)?;
    ensure_all_present(scene, &out)?;
    let flagged = scene
        .objects
        .iter()
        .enumerate()
        .filter(|&(o, info)| {
            let kept = out.objects.iter().find(|a| a.id == info.id).map_or(0, |a| a.pixel_count);
            2 * kept < painted[o]
        })
        .map(|(_, info)| info.id)
        .collect();
    Ok((out, flagged))
}

pub fn ablate_scene_scale(scene: &SceneRecord) -> Result<SceneRecord> {
    Ok(scale_objects(scene)?.0)
}

pub fn ablate_background(
    scene: &SceneRecord,
    mode: BackgroundMode,
    bank: Option<&TextureBank>,
    seed: u64,
) -> Result<SceneRecord> {
    let bg = scene.background_mask();
    if bg.is_empty() {
        return Err(Error::EmptyBackground);
    }
    match mode {
        BackgroundMode::Color => {
            let c = scene.image.mean_color_rounded(&bg).expect("nonempty background");
            let mut image = scene.image.clone();
            for i in bg.iter_indices() {
                image.set_index(i, c);
            }
            Ok(SceneRecord {
                image,
                ..scene.clone()
            })
        }
        BackgroundMode::Texture => {
            let bank = bank.ok_or(Error::BankMissing)?;
            let mut rng = rng_for(seed, &[scene.id.as_bytes(), b"bgT"]);
            let t = match scene.image.mean_color(&scene.foreground_mask()) {
                Some(fg) => (0..bank.len())
                    .map(|k| (k, color_distance(bank.mean(k), fg)))
                    .fold((0, f64::MIN), |acc, (k, d)| if d > acc.1 { (k, d) } else { acc })
                    .0,
                None => rng.random_range(0..bank.len()),
            };
            let tile = bank.tile(t);
            let offset = (rng.random_range(0..tile.width()), rng.random_range(0..tile.height()));
            let mut image = scene.image.clone();
            paint_tiled(&mut image, &bg, tile, (0, 0), offset);
            Ok(SceneRecord {
                image,
                ..scene.clone()
            })
        }
        BackgroundMode::Shape => grow_enclosed_regions(scene, &bg),
    }
}

/// Grows every region enclosed by the background to its convex hull. A grown
/// pixel takes the label and colour of the nearest original pixel of its
/// region; equal distances go to the smaller label.
fn grow_enclosed_regions(scene: &SceneRecord, bg: &BinaryMask) -> Result<SceneRecord> {
    let n = scene.width() * scene.height();
    let mut best: Vec<(f64, u16, usize)> = vec![(f64::INFINITY, u16::MAX, 0); n];
    let raw = scene.masks.as_raw();
    for region in subcontour_regions(bg) {
        let hull = convex_hull(&region)?.mask;
        let grow = hull.intersection(bg);
        if grow.is_empty() {
            continue;
        }
        let mut ids: Vec<u16> = region.iter_indices().map(|i| raw[i]).collect();
        ids.sort_unstable();
        ids.dedup();
        for id in ids {
            let part = BinaryMask::from_bits(
                scene.width(),
                scene.height(),
                (0..n).map(|i| region.get_index(i) && raw[i] == id).collect(),
            );
            let (dist, nearest) = nearest_feature_transform(&part);
            for i in grow.iter_indices() {
                let cand = (dist[i], id, nearest[i].expect("part is nonempty"));
                if (cand.0, cand.1) < (best[i].0, best[i].1) {
                    best[i] = cand;
                }
            }
        }
    }
    let mut image = scene.image.clone();
    let mut labels = scene.masks.clone();
    for (i, &(d, id, src)) in best.iter().enumerate() {
        if d.is_finite() {
            labels.set_index(i, id);
            image.set_index(i, scene.image.get_index(src));
        }
    }
    rebuild(&scene.id, image, labels)
}

/// Outcome of ablating one scene.
#[derive(Debug, Clone)]
pub struct AblatedScene {
    pub scene: SceneRecord,
    /// Objects that lost more than half their area while rescaling.
    pub scale_flagged: Vec<u16>,
}

/// Runs every op of the spec on one scene, in execution order.
pub fn ablate_scene(scene: &SceneRecord, spec: &AblationSpec) -> Result<AblatedScene> {
    let mut cur = scene.clone();
    let mut scale_flagged = Vec::new();
    let bank = spec.bank();
    for &op in spec.ops() {
        cur = match op {
            AblationOp::S => ablate_object_shape(&cur)?,
            AblationOp::T => ablate_scene_texture(&cur, bank.ok_or(Error::BankMissing)?, spec.seed())?,
            AblationOp::C => ablate_object_color(&cur),
            AblationOp::U => {
                let (s, flagged) = scale_objects(&cur)?;
                scale_flagged = flagged;
                s
            }
            AblationOp::BgS => ablate_background(&cur, BackgroundMode::Shape, bank, spec.seed())?,
            AblationOp::BgT => ablate_background(&cur, BackgroundMode::Texture, bank, spec.seed())?,
            AblationOp::BgC => ablate_background(&cur, BackgroundMode::Color, bank, spec.seed())?,
        };
    }
    Ok(AblatedScene { scene: cur, scale_flagged })
}

/// Ablates every scene of `dataset` and writes the result under `out`. Scenes
/// are processed on the current rayon pool; the manifest is written last.
pub fn apply_ablations(dataset: &DatasetManifest, spec: &AblationSpec, out: &Path) -> Result<DatasetManifest> {
    let results: Vec<Result<Vec<u16>>> = dataset
        .ids
        .par_iter()
        .map(|id| {
            let scene = load_scene(dataset, id)?;
            let done = ablate_scene(&scene, spec).map_err(|e| Error::in_scene(id, e))?;
            write_scene(out, &done.scene)?;
            Ok(done.scale_flagged)
        })
        .collect();
    let mut flagged = BTreeMap::new();
    for (id, r) in dataset.ids.iter().zip(results) {
        let f = r?;
        if !f.is_empty() {
            flagged.insert(id.clone(), json!(f));
        }
    }
    let mut provenance = dataset.provenance.clone();
    let prior: Vec<Value> = match provenance.remove("ablations") {
        Some(Value::Array(a)) => a,
        _ => Vec::new(),
    };
    let mut history = prior;
    history.push(json!({
        "ops": spec.ops().iter().map(|o| o.as_str()).collect::<Vec<_>>(),
        "seed": spec.seed(),
        "texture_bank": spec.bank().map(|b| b.source().to_string()),
        "fill_rule": "nearest-original-pixel",
        "source_root": dataset.root.display().to_string(),
        "scale_flagged": flagged,
    }));
    provenance.insert("ablations".into(), Value::Array(history));
    let manifest = DatasetManifest {
        root: out.to_path_buf(),
        version: MANIFEST_VERSION,
        split: dataset.split,
        ids: dataset.ids.clone(),
        provenance,
    };
    write_manifest(&manifest)?;
    Ok(manifest)
}
