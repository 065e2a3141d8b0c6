//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use segcomplex::dataset::{write_dataset, DatasetManifest, SceneRecord, Split};
use segcomplex::image::LabelMap;
use segcomplex::maskgeo::BinaryMask;
use segcomplex::metrics::{SegmentationPrediction, SoftMask};
use segcomplex::synth::{corpus, SceneKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn write_corpus(kind: SceneKind, prefix: &str, n: usize, seed: u64, root: &Path) -> DatasetManifest {
    let scenes = corpus(kind, prefix, n, seed);
    let mut prov = BTreeMap::new();
    prov.insert("dataset".to_string(), serde_json::json!(prefix));
    write_dataset(&scenes, root, Split::Test, prov).unwrap()
}

/// 4-connected blob grown from the centre of a `w`×`h` grid.
pub fn random_blob(rng: &mut ChaCha8Rng, w: usize, h: usize, target: usize) -> BinaryMask {
    let mut m = BinaryMask::new(w, h);
    let start = (w / 2, h / 2);
    m.set(start.0, start.1, true);
    let mut frontier = vec![start];
    let mut n = 1;
    while n < target && !frontier.is_empty() {
        let k = rng.random_range(0..frontier.len());
        let (x, y) = frontier[k];
        let dirs = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
        let (dx, dy) = dirs[rng.random_range(0..4)];
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
            continue;
        }
        let (nx, ny) = (nx as usize, ny as usize);
        if !m.get(nx, ny) {
            m.set(nx, ny, true);
            frontier.push((nx, ny));
            n += 1;
        } else if rng.random_bool(0.05) {
            frontier.swap_remove(k);
        }
    }
    m
}

/// Union of a few random axis-aligned rectangles and discs, 8-connected or not.
pub fn random_shapes(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    let mut m = BinaryMask::new(w, h);
    for _ in 0..rng.random_range(1..=3) {
        let (cx, cy) = (rng.random_range(0..w) as f64, rng.random_range(0..h) as f64);
        let r = rng.random_range(1.0..(w.min(h) as f64 / 2.0).max(1.5));
        let disc = rng.random_bool(0.5);
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                let inside = if disc { dx * dx + dy * dy <= r * r } else { dx.abs() <= r && dy.abs() <= r * 0.6 };
                if inside {
                    m.set(x, y, true);
                }
            }
        }
    }
    m
}

/// Whether the lattice point lies inside or on the convex polygon (positive
/// orientation).
pub fn point_in_convex(vertices: &[(i64, i64)], p: (i64, i64)) -> bool {
    match vertices.len() {
        0 => false,
        1 => vertices[0] == p,
        2 => {
            let (a, b) = (vertices[0], vertices[1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            cross == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
        }
        n => (0..n).all(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0
        }),
    }
}

/// Hull of the set pixel centres by testing every directed pair: `a -> b` is a
/// hull edge when every point lies left of or on it.
pub fn brute_hull_mask(mask: &BinaryMask) -> BinaryMask {
    // the hull of a pixel set is the hull of each row's two extreme pixels
    let mut pts: Vec<(i64, i64)> = Vec::new();
    for y in 0..mask.height() {
        let xs: Vec<usize> = (0..mask.width()).filter(|&x| mask.get(x, y)).collect();
        if let (Some(&a), Some(&b)) = (xs.first(), xs.last()) {
            pts.push((a as i64, y as i64));
            if b != a {
                pts.push((b as i64, y as i64));
            }
        }
    }
    let mut out = BinaryMask::new(mask.width(), mask.height());
    let mut edges = Vec::new();
    for &a in &pts {
        for &b in &pts {
            if a == b {
                continue;
            }
            let all_left = pts
                .iter()
                .all(|&p| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0);
            if all_left {
                edges.push((a, b));
            }
        }
    }
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let p = (x as i64, y as i64);
            let inside = if edges.is_empty() {
                pts.contains(&p)
            } else {
                edges
                    .iter()
                    .all(|&(a, b)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0)
                    && segment_span(&pts, p)
            };
            out.set(x, y, inside);
        }
    }
    out
}

/// For collinear point sets every edge test passes on the whole line; keep
/// only points within the bounding box of the set.
fn segment_span(pts: &[(i64, i64)], p: (i64, i64)) -> bool {
    let (minx, maxx) = (pts.iter().map(|q| q.0).min().unwrap(), pts.iter().map(|q| q.0).max().unwrap());
    let (miny, maxy) = (pts.iter().map(|q| q.1).min().unwrap(), pts.iter().map(|q| q.1).max().unwrap());
    (minx..=maxx).contains(&p.0) && (miny..=maxy).contains(&p.1)
}

/// Minimum total cost over all injective maps from the smaller side.
pub fn brute_assignment(cost: &[Vec<f64>]) -> f64 {
    let (r, c) = (cost.len(), cost[0].len());
    let transpose = r > c;
    let (small, large) = if transpose { (c, r) } else { (r, c) };
    let at = |i: usize, j: usize| if transpose { cost[j][i] } else { cost[i][j] };
    let mut best = f64::INFINITY;
    let mut used = vec![false; large];
    fn rec(
        i: usize,
        small: usize,
        large: usize,
        acc: f64,
        used: &mut [bool],
        best: &mut f64,
        at: &dyn Fn(usize, usize) -> f64,
    ) {
        if i == small {
            *best = best.min(acc);
            return;
        }
        for j in 0..large {
            if !used[j] {
                used[j] = true;
                rec(i + 1, small, large, acc + at(i, j), used, best, at);
                used[j] = false;
            }
        }
    }
    rec(0, small, large, 0.0, &mut used, &mut best, &at);
    best
}

/// Random ground truth and prediction on a grid of at most 16×16.
pub fn random_metric_case(rng: &mut ChaCha8Rng) -> (LabelMap, SegmentationPrediction) {
    let (w, h) = (rng.random_range(2..=16), rng.random_range(2..=16));
    let mut gt = LabelMap::new(w, h);
    let k = rng.random_range(0..=4u16);
    for id in 1..=k {
        let (x0, y0) = (rng.random_range(0..w), rng.random_range(0..h));
        let (bw, bh) = (rng.random_range(1..=w - x0), rng.random_range(1..=h - y0));
        for y in y0..y0 + bh {
            for x in x0..x0 + bw {
                gt.set(x, y, id);
            }
        }
    }
    let mut masks = Vec::new();
    let n_pred = rng.random_range(0..=5);
    let levels = [0.55f32, 0.7, 0.8, 0.9, 1.0];
    for _ in 0..n_pred {
        let mut values = vec![0.0f32; w * h];
        let ids = gt.object_ids();
        if !ids.is_empty() && rng.random_bool(0.7) {
            // noisy copy of a ground-truth object
            let id = ids[rng.random_range(0..ids.len())];
            for i in 0..w * h {
                let mut on = gt.get_index(i) == id;
                if rng.random_bool(0.15) {
                    on = !on;
                }
                if on {
                    values[i] = *levels.choose(rng).unwrap();
                }
            }
        } else {
            let (x0, y0) = (rng.random_range(0..w), rng.random_range(0..h));
            let (bw, bh) = (rng.random_range(1..=w - x0), rng.random_range(1..=h - y0));
            let v = *levels.choose(rng).unwrap();
            for y in y0..y0 + bh {
                for x in x0..x0 + bw {
                    values[y * w + x] = v;
                }
            }
        }
        // a few sub-threshold pixels change the confidence without changing the mask
        for _ in 0..rng.random_range(0..4) {
            let i = rng.random_range(0..w * h);
            if values[i] == 0.0 {
                values[i] = 0.3;
            }
        }
        masks.push(SoftMask::new(w, h, values).unwrap());
    }
    (
        gt,
        SegmentationPrediction {
            scene_id: "case".into(),
            masks,
            background: None,
        },
    )
}

fn conf_of(m: &SoftMask) -> f64 {
    m.values().iter().map(|&v| v as f64).sum::<f64>() / m.values().len() as f64
}

fn on(m: &SoftMask, i: usize) -> bool {
    m.values()[i] >= 0.5
}

fn iou_pixels(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn gt_sets(gt: &LabelMap) -> Vec<Vec<bool>> {
    gt.object_ids()
        .into_iter()
        .map(|id| gt.as_raw().iter().map(|&l| l == id).collect())
        .collect()
}

/// Area under the interpolated precision/recall curve, evaluated segment by
/// segment over the distinct recall values. Valid for thresholds >= 0.5,
/// where each prediction can match at most one object.
pub fn oracle_ap(gt: &LabelMap, pred: &SegmentationPrediction, thr: f64) -> Option<f64> {
    let objs = gt_sets(gt);
    if objs.is_empty() {
        return None;
    }
    let n = gt.as_raw().len();
    let mut preds: Vec<(f64, usize, Vec<bool>)> = pred
        .masks
        .iter()
        .enumerate()
        .map(|(k, m)| (conf_of(m), k, (0..n).map(|i| on(m, i)).collect::<Vec<bool>>()))
        .filter(|p| p.2.iter().any(|&b| b))
        .collect();
    preds.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut claimed = vec![false; objs.len()];
    let mut points = Vec::new();
    let mut tp = 0;
    for (rank, p) in preds.iter().enumerate() {
        if let Some(g) = (0..objs.len()).find(|&g| iou_pixels(&objs[g], &p.2) > thr) {
            if !claimed[g] {
                claimed[g] = true;
                tp += 1;
            }
        }
        points.push((tp as f64 / objs.len() as f64, tp as f64 / (rank + 1) as f64));
    }
    let mut recalls: Vec<f64> = points.iter().map(|p| p.0).filter(|&r| r > 0.0).collect();
    recalls.sort_by(|a, b| a.partial_cmp(b).unwrap());
    recalls.dedup();
    let mut area = 0.0;
    let mut prev = 0.0;
    for r in recalls {
        let p = points.iter().filter(|q| q.0 >= r).map(|q| q.1).fold(0.0, f64::max);
        area += (r - prev) * p;
        prev = r;
    }
    Some(area)
}

/// Per-pixel owner among binarized masks: highest confidence, ties to the
/// lower index; 0 when uncovered.
pub fn oracle_partition(pred: &SegmentationPrediction, n: usize) -> Vec<u32> {
    let confs: Vec<f64> = pred.masks.iter().map(conf_of).collect();
    (0..n)
        .map(|i| {
            let mut best: Option<usize> = None;
            for (k, m) in pred.masks.iter().enumerate() {
                if on(m, i) && best.is_none_or(|b| confs[k] > confs[b]) {
                    best = Some(k);
                }
            }
            best.map_or(0, |k| k as u32 + 1)
        })
        .collect()
}

/// Panoptic quality with matches found directly as pairs above the
/// threshold (unique for thresholds >= 0.5).
pub fn oracle_pq(gt: &LabelMap, pred: &SegmentationPrediction, thr: f64) -> Option<f64> {
    let n = gt.as_raw().len();
    let part = oracle_partition(pred, n);
    let mut segs: Vec<Vec<bool>> = Vec::new();
    for k in 1..=pred.masks.len() as u32 {
        let s: Vec<bool> = part.iter().map(|&p| p == k).collect();
        if s.iter().any(|&b| b) {
            segs.push(s);
        }
    }
    let objs = gt_sets(gt);
    let mut sum = 0.0;
    let mut tp = 0;
    for o in &objs {
        for s in &segs {
            let iou = iou_pixels(o, s);
            if iou > thr {
                sum += iou;
                tp += 1;
            }
        }
    }
    let fp = segs.len() - tp;
    let fn_ = objs.len() - tp;
    let denom = tp as f64 + 0.5 * fp as f64 + 0.5 * fn_ as f64;
    (denom > 0.0).then(|| sum / denom)
}

/// Pair-enumeration counts: (same in both, same in `a`, same in `b`, all).
fn pair_enum(a: &[u32], b: &[u32]) -> (f64, f64, f64, f64) {
    let (mut both, mut sa, mut sb, mut all) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let (x, y) = (a[i] == a[j], b[i] == b[j]);
            both += (x && y) as u64;
            sa += x as u64;
            sb += y as u64;
            all += 1;
        }
    }
    (both as f64, sa as f64, sb as f64, all as f64)
}

/// Adjusted Rand index from explicit pair enumeration, with the expected
/// index under a random pairing of the same cluster sizes.
pub fn oracle_ari(a: &[u32], b: &[u32]) -> Option<f64> {
    if a.len() < 2 {
        return None;
    }
    let (both, sa, sb, all) = pair_enum(a, b);
    let expected = sa * sb / all;
    let max = (sa + sb) / 2.0;
    if max == expected {
        return Some(1.0);
    }
    Some((both - expected) / (max - expected))
}

/// (ARP, ARR) from explicit pair enumeration.
pub fn oracle_arp_arr(gt: &[u32], pred: &[u32]) -> (Option<f64>, Option<f64>) {
    if gt.len() < 2 {
        return (None, None);
    }
    let (both, sg, sp, all) = pair_enum(gt, pred);
    let e = sg * sp / all;
    ((sp != e).then(|| (both - e) / (sp - e)), (sg != e).then(|| (both - e) / (sg - e)))
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        (None, None) => true,
        _ => false,
    }
}

pub fn shuffled<T>(mut v: Vec<T>, rng: &mut ChaCha8Rng) -> Vec<T> {
    v.shuffle(rng);
    v
}

pub fn scene_from_labels(id: &str, labels: LabelMap, color: impl Fn(u16, usize, usize) -> [u8; 3]) -> SceneRecord {
    let mut img = segcomplex::image::RgbImage::new(labels.width(), labels.height());
    for y in 0..labels.height() {
        for x in 0..labels.width() {
            img.set(x, y, color(labels.get(x, y), x, y));
        }
    }
    SceneRecord::new(id, img, labels).unwrap()
}
