//! Segmentation scores: AP, PQ, precision/recall, background recall,
//! ARI / FG-ARI, ARP / ARR and mean best overlap.
//!
//! Ground truth is a label map; predictions are soft masks. A soft mask's
//! confidence is its mean value, its binary form is `value >= 0.5`, and masks
//! that binarize to nothing are ignored.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::LabelMap;
use crate::maskgeo::BinaryMask;

pub const BINARIZE_THRESHOLD: f32 = 0.5;
pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;
pub const ARP_ARR_VARIANT: &str = "pair-hypergeometric";

/// Per-pixel membership in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask {
    width: usize,
    height: usize,
    values: Vec<f32>,
}

impl SoftMask {
    pub fn new(width: usize, height: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                what: format!("soft mask of {} values for {width}x{height}", values.len()),
            });
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidConfig(format!("soft mask value {v} outside [0, 1]")));
        }
        Ok(Self { width, height, values })
    }

    pub fn from_u8(width: usize, height: usize, data: &[u8]) -> Self {
        assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            values: data.iter().map(|&v| v as f32 / 255.0).collect(),
        }
    }

    /// Hard mask with the given value inside and 0 outside.
    pub fn from_binary(mask: &BinaryMask, value: f32) -> Self {
        Self {
            width: mask.width(),
            height: mask.height(),
            values: mask.bits().iter().map(|&b| if b { value } else { 0.0 }).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn confidence(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum::<f64>() / self.values.len().max(1) as f64
    }

    pub fn binarize(&self) -> BinaryMask {
        BinaryMask::from_bits(
            self.width,
            self.height,
            self.values.iter().map(|&v| v >= BINARIZE_THRESHOLD).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationPrediction {
    pub scene_id: String,
    pub masks: Vec<SoftMask>,
    /// Explicit background prediction; when absent the background is whatever
    /// no foreground mask covers.
    pub background: Option<SoftMask>,
}

impl SegmentationPrediction {
    /// One hard mask per object of `labels`, in ascending id order.
    pub fn from_labels(scene_id: impl Into<String>, labels: &LabelMap) -> Self {
        Self {
            scene_id: scene_id.into(),
            masks: labels
                .object_ids()
                .into_iter()
                .map(|id| SoftMask::from_binary(&labels.mask_of(id), 1.0))
                .collect(),
            background: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    /// `(gt id, prediction index, IoU)`, by decreasing IoU.
    pub pairs: Vec<(u16, usize, f64)>,
    pub unmatched_gt: Vec<u16>,
    pub unmatched_pred: Vec<usize>,
}

/// Ground truth and binarized predictions with their overlap table.
struct Prepared {
    gt_ids: Vec<u16>,
    gt_sizes: Vec<usize>,
    /// Index into the prediction's mask list.
    pred_index: Vec<usize>,
    pred_sizes: Vec<usize>,
    confidences: Vec<f64>,
    /// `inter[g * p + k]`.
    inter: Vec<usize>,
}

impl Prepared {
    fn new(gt: &LabelMap, masks: &[BinaryMask], confidences: &[f64], keep_index: &[usize]) -> Self {
        let gt_ids = gt.object_ids();
        let mut slot = vec![usize::MAX; u16::MAX as usize + 1];
        for (g, &id) in gt_ids.iter().enumerate() {
            slot[id as usize] = g;
        }
        let mut gt_sizes = vec![0usize; gt_ids.len()];
        for &l in gt.as_raw() {
            if l != 0 {
                gt_sizes[slot[l as usize]] += 1;
            }
        }
        let p = masks.len();
        let mut inter = vec![0usize; gt_ids.len() * p];
        let mut pred_sizes = vec![0usize; p];
        for (k, m) in masks.iter().enumerate() {
            for i in m.iter_indices() {
                pred_sizes[k] += 1;
                let l = gt.get_index(i);
                if l != 0 {
                    inter[slot[l as usize] * p + k] += 1;
                }
            }
        }
        Self {
            gt_ids,
            gt_sizes,
            pred_index: keep_index.to_vec(),
            pred_sizes,
            confidences: confidences.to_vec(),
            inter,
        }
    }

    fn n_pred(&self) -> usize {
        self.pred_sizes.len()
    }

    fn iou(&self, g: usize, k: usize) -> f64 {
        let i = self.inter[g * self.n_pred() + k];
        let u = self.gt_sizes[g] + self.pred_sizes[k] - i;
        if u == 0 {
            0.0
        } else {
            i as f64 / u as f64
        }
    }

    /// Greedy one-to-one matching by decreasing IoU among pairs above `thr`.
    fn matching(&self, thr: f64) -> MatchResult {
        let mut cand = Vec::new();
        for g in 0..self.gt_ids.len() {
            for k in 0..self.n_pred() {
                let iou = self.iou(g, k);
                if iou > thr {
                    cand.push((g, k, iou));
                }
            }
        }
        cand.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        let mut gt_used = vec![false; self.gt_ids.len()];
        let mut pred_used = vec![false; self.n_pred()];
        let mut pairs = Vec::new();
        for (g, k, iou) in cand {
            if !gt_used[g] && !pred_used[k] {
                gt_used[g] = true;
                pred_used[k] = true;
                pairs.push((self.gt_ids[g], self.pred_index[k], iou));
            }
        }
        MatchResult {
            pairs,
            unmatched_gt: (0..self.gt_ids.len()).filter(|&g| !gt_used[g]).map(|g| self.gt_ids[g]).collect(),
            unmatched_pred: (0..self.n_pred())
                .filter(|&k| !pred_used[k])
                .map(|k| self.pred_index[k])
                .collect(),
        }
    }
}

fn check_dims(gt: &LabelMap, pred: &SegmentationPrediction) -> Result<()> {
    for m in pred.masks.iter().chain(pred.background.as_ref()) {
        if m.width() != gt.width() || m.height() != gt.height() {
            return Err(Error::DimensionMismatch {
                what: format!(
                    "prediction {}x{} vs ground truth {}x{}",
                    m.width(),
                    m.height(),
                    gt.width(),
                    gt.height()
                ),
            });
        }
    }
    Ok(())
}

/// Binarized non-empty masks, their confidences and original indices.
fn binarized(pred: &SegmentationPrediction) -> (Vec<BinaryMask>, Vec<f64>, Vec<usize>) {
    let mut masks = Vec::new();
    let mut conf = Vec::new();
    let mut idx = Vec::new();
    for (k, m) in pred.masks.iter().enumerate() {
        let b = m.binarize();
        if !b.is_empty() {
            masks.push(b);
            conf.push(m.confidence());
            idx.push(k);
        }
    }
    (masks, conf, idx)
}

fn overlapping(gt: &LabelMap, pred: &SegmentationPrediction) -> Result<Prepared> {
    check_dims(gt, pred)?;
    let (masks, conf, idx) = binarized(pred);
    Ok(Prepared::new(gt, &masks, &conf, &idx))
}

/// Pixel partition: each pixel goes to the most confident covering mask (ties
/// to the lower index); 0 = uncovered, `k + 1` = binarized mask `k`.
fn partition_labels(width: usize, height: usize, masks: &[BinaryMask], conf: &[f64]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..masks.len()).collect();
    order.sort_by(|&a, &b| conf[b].total_cmp(&conf[a]).then(a.cmp(&b)));
    let mut labels = vec![0u32; width * height];
    // paint least confident first so the most confident wins
    for &k in order.iter().rev() {
        for i in masks[k].iter_indices() {
            labels[i] = k as u32 + 1;
        }
    }
    labels
}

fn partitioned(gt: &LabelMap, pred: &SegmentationPrediction) -> Result<(Prepared, Vec<u32>)> {
    check_dims(gt, pred)?;
    let (masks, conf, idx) = binarized(pred);
    let labels = partition_labels(gt.width(), gt.height(), &masks, &conf);
    let mut parts: Vec<BinaryMask> = vec![BinaryMask::new(gt.width(), gt.height()); masks.len()];
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 {
            parts[l as usize - 1].set_index(i, true);
        }
    }
    let keep: Vec<usize> = (0..parts.len()).filter(|&k| !parts[k].is_empty()).collect();
    let parts: Vec<BinaryMask> = keep.iter().map(|&k| parts[k].clone()).collect();
    let conf: Vec<f64> = keep.iter().map(|&k| conf[k]).collect();
    let idx: Vec<usize> = keep.iter().map(|&k| idx[k]).collect();
    Ok((Prepared::new(gt, &parts, &conf, &idx), labels))
}

pub fn match_instances(gt: &LabelMap, pred: &SegmentationPrediction, iou_thresh: f64) -> Result<MatchResult> {
    Ok(overlapping(gt, pred)?.matching(iou_thresh))
}

fn ap_of(p: &Prepared, thr: f64) -> Option<f64> {
    let n_gt = p.gt_ids.len();
    if n_gt == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..p.n_pred()).collect();
    order.sort_by(|&a, &b| p.confidences[b].total_cmp(&p.confidences[a]).then(a.cmp(&b)));
    let mut claimed = vec![false; n_gt];
    let mut tp = 0usize;
    let mut curve = Vec::with_capacity(order.len());
    for (rank, &k) in order.iter().enumerate() {
        let hit = (0..n_gt)
            .filter(|&g| !claimed[g] && p.iou(g, k) > thr)
            .max_by(|&a, &b| p.iou(a, k).total_cmp(&p.iou(b, k)).then(b.cmp(&a)));
        if let Some(g) = hit {
            claimed[g] = true;
            tp += 1;
        }
        curve.push((tp as f64 / n_gt as f64, tp as f64 / (rank + 1) as f64));
    }
    // running max of precision from the right, then sum over recall steps
    let mut ap = 0.0;
    let mut best = 0.0f64;
    let mut prec_env = vec![0.0; curve.len()];
    for i in (0..curve.len()).rev() {
        best = best.max(curve[i].1);
        prec_env[i] = best;
    }
    let mut prev_recall = 0.0;
    for (i, &(r, _)) in curve.iter().enumerate() {
        ap += (r - prev_recall) * prec_env[i];
        prev_recall = r;
    }
    Some(ap)
}

/// All-point interpolated AP at a single IoU threshold; `None` without
/// ground-truth objects.
pub fn average_precision(gt: &LabelMap, pred: &SegmentationPrediction, iou_thresh: f64) -> Result<Option<f64>> {
    Ok(ap_of(&overlapping(gt, pred)?, iou_thresh))
}

fn pq_of(p: &Prepared, thr: f64) -> Option<f64> {
    let m = p.matching(thr);
    let tp = m.pairs.len() as f64;
    let denom = tp + 0.5 * m.unmatched_pred.len() as f64 + 0.5 * m.unmatched_gt.len() as f64;
    (denom > 0.0).then(|| m.pairs.iter().map(|x| x.2).sum::<f64>() / denom)
}

/// Panoptic quality over non-overlapping predictions (single class).
pub fn panoptic_quality(gt: &LabelMap, pred: &SegmentationPrediction, iou_thresh: f64) -> Result<Option<f64>> {
    Ok(pq_of(&partitioned(gt, pred)?.0, iou_thresh))
}

fn pr_of(p: &Prepared, thr: f64) -> (Option<f64>, Option<f64>) {
    let tp = p.matching(thr).pairs.len() as f64;
    let n_gt = p.gt_ids.len();
    let precision = if p.n_pred() > 0 {
        Some(tp / p.n_pred() as f64)
    } else if n_gt > 0 {
        Some(0.0)
    } else {
        None
    };
    let recall = (n_gt > 0).then(|| tp / n_gt as f64);
    (precision, recall)
}

pub fn precision_recall(
    gt: &LabelMap,
    pred: &SegmentationPrediction,
    iou_thresh: f64,
) -> Result<(Option<f64>, Option<f64>)> {
    Ok(pr_of(&overlapping(gt, pred)?, iou_thresh))
}

/// 1 when the predicted background overlaps the true one with IoU above the
/// threshold, else 0. `None` when both backgrounds are empty.
pub fn bg_recall(gt: &LabelMap, pred: &SegmentationPrediction, iou_thresh: f64) -> Result<Option<f64>> {
    check_dims(gt, pred)?;
    let gt_bg = gt.background();
    let pred_bg = match &pred.background {
        Some(b) => b.binarize(),
        None => {
            let mut covered = BinaryMask::new(gt.width(), gt.height());
            for m in &pred.masks {
                covered = covered.union(&m.binarize());
            }
            covered.complement()
        }
    };
    let inter = gt_bg.intersection_count(&pred_bg);
    let union = gt_bg.count() + pred_bg.count() - inter;
    Ok((union > 0).then(|| if inter as f64 / union as f64 > iou_thresh { 1.0 } else { 0.0 }))
}

/// Pair counts of a contingency table: `(sum_ij C(n_ij,2), sum_i C(a_i,2),
/// sum_j C(b_j,2), C(n,2))`.
fn pair_counts(a: &[u32], b: &[u32]) -> (f64, f64, f64, f64) {
    let c2 = |n: u64| (n * n.saturating_sub(1) / 2) as f64;
    let ra = a.iter().copied().max().map_or(0, |m| m as usize + 1);
    let rb = b.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut table = vec![0u64; ra * rb];
    let mut rows = vec![0u64; ra];
    let mut cols = vec![0u64; rb];
    for (&x, &y) in a.iter().zip(b) {
        table[x as usize * rb + y as usize] += 1;
        rows[x as usize] += 1;
        cols[y as usize] += 1;
    }
    (
        table.iter().map(|&n| c2(n)).sum(),
        rows.iter().map(|&n| c2(n)).sum(),
        cols.iter().map(|&n| c2(n)).sum(),
        c2(a.len() as u64),
    )
}

fn ari(a: &[u32], b: &[u32]) -> Option<f64> {
    if a.len() < 2 {
        return None;
    }
    let (index, sa, sb, total) = pair_counts(a, b);
    let expected = sa * sb / total;
    let max = 0.5 * (sa + sb);
    if max == expected {
        // both partitions trivial in the same way (one cluster, or all singletons)
        return Some(1.0);
    }
    Some((index - expected) / (max - expected))
}

fn dense_gt(gt: &LabelMap) -> Vec<u32> {
    gt.as_raw().iter().map(|&l| l as u32).collect()
}

/// Adjusted Rand index between the ground-truth partition and the
/// non-overlapping prediction partition, optionally over foreground pixels
/// only. Raw value in `[-1, 1]`; `None` with fewer than two pixels.
pub fn adjusted_rand(gt: &LabelMap, pred: &SegmentationPrediction, foreground_only: bool) -> Result<Option<f64>> {
    let (_, labels) = partitioned(gt, pred)?;
    Ok(ari_of(gt, &labels, foreground_only))
}

fn ari_of(gt: &LabelMap, labels: &[u32], foreground_only: bool) -> Option<f64> {
    let g = dense_gt(gt);
    if foreground_only {
        let (a, b): (Vec<u32>, Vec<u32>) = g.iter().zip(labels).filter(|(&x, _)| x != 0).map(|(&x, &y)| (x, y)).unzip();
        ari(&a, &b)
    } else {
        ari(&g, labels)
    }
}

fn arp_arr(a: &[u32], b: &[u32]) -> (Option<f64>, Option<f64>) {
    if a.len() < 2 {
        return (None, None);
    }
    let (index, s, p, total) = pair_counts(a, b);
    let e = s * p / total;
    let arp = (p != e).then(|| (index - e) / (p - e));
    let arr = (s != e).then(|| (index - e) / (s - e));
    (arp, arr)
}

/// Chance-corrected pair precision and recall: same-cluster pairs of the
/// prediction that are also same-cluster in the ground truth, and vice versa,
/// each corrected by the hypergeometric expectation.
pub fn rand_precision_recall(gt: &LabelMap, pred: &SegmentationPrediction) -> Result<(Option<f64>, Option<f64>)> {
    let (_, labels) = partitioned(gt, pred)?;
    Ok(arp_arr(&dense_gt(gt), &labels))
}

fn mbo_of(p: &Prepared) -> Option<f64> {
    let n = p.gt_ids.len();
    (n > 0).then(|| {
        (0..n)
            .map(|g| (0..p.n_pred()).map(|k| p.iou(g, k)).fold(0.0, f64::max))
            .sum::<f64>()
            / n as f64
    })
}

pub fn mean_best_overlap(gt: &LabelMap, pred: &SegmentationPrediction) -> Result<Option<f64>> {
    Ok(mbo_of(&overlapping(gt, pred)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSelection {
    pub ap: bool,
    pub pq: bool,
    pub pr: bool,
    pub ari: bool,
    pub fg_ari: bool,
    pub arp_arr: bool,
    pub mbo: bool,
    pub bg_recall: bool,
}

impl MetricSelection {
    pub fn all() -> Self {
        Self {
            ap: true,
            pq: true,
            pr: true,
            ari: true,
            fg_ari: true,
            arp_arr: true,
            mbo: true,
            bg_recall: true,
        }
    }

    pub fn none() -> Self {
        Self {
            ap: false,
            pq: false,
            pr: false,
            ari: false,
            fg_ari: false,
            arp_arr: false,
            mbo: false,
            bg_recall: false,
        }
    }

    /// Parses `ap,pq,pr,ari,fgari,arp-arr,mbo,bg-recall` or `all`.
    pub fn parse(list: &str) -> Result<Self> {
        let mut s = Self::none();
        for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "all" => s = Self::all(),
                "ap" => s.ap = true,
                "pq" => s.pq = true,
                "pr" => s.pr = true,
                "ari" => s.ari = true,
                "fgari" => s.fg_ari = true,
                "arp-arr" => s.arp_arr = true,
                "mbo" => s.mbo = true,
                "bg-recall" => s.bg_recall = true,
                other => return Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
            }
        }
        if s == Self::none() {
            return Err(Error::InvalidConfig("no metrics selected".into()));
        }
        Ok(s)
    }
}

/// Scores of one scene. Adjusted indices are clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMetrics {
    pub scene_id: String,
    pub ap: Option<f64>,
    pub pq: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub bg_recall: Option<f64>,
    pub ari: Option<f64>,
    pub fg_ari: Option<f64>,
    pub arp: Option<f64>,
    pub arr: Option<f64>,
    pub mbo: Option<f64>,
}

fn clamp01(v: Option<f64>) -> Option<f64> {
    v.map(|x| x.clamp(0.0, 1.0))
}

pub fn evaluate_scene(
    gt: &LabelMap,
    pred: &SegmentationPrediction,
    sel: &MetricSelection,
    iou_thresh: f64,
) -> Result<SceneMetrics> {
    let over = overlapping(gt, pred)?;
    let needs_partition = sel.pq || sel.ari || sel.fg_ari || sel.arp_arr;
    let part = if needs_partition { Some(partitioned(gt, pred)?) } else { None };
    let (precision, recall) = if sel.pr { pr_of(&over, iou_thresh) } else { (None, None) };
    let (arp, arr) = match &part {
        Some((_, labels)) if sel.arp_arr => arp_arr(&dense_gt(gt), labels),
        _ => (None, None),
    };
    Ok(SceneMetrics {
        scene_id: pred.scene_id.clone(),
        ap: if sel.ap { ap_of(&over, iou_thresh) } else { None },
        pq: match &part {
            Some((p, _)) if sel.pq => pq_of(p, iou_thresh),
            _ => None,
        },
        precision,
        recall,
        bg_recall: if sel.bg_recall { bg_recall(gt, pred, iou_thresh)? } else { None },
        ari: match &part {
            Some((_, l)) if sel.ari => clamp01(ari_of(gt, l, false)),
            _ => None,
        },
        fg_ari: match &part {
            Some((_, l)) if sel.fg_ari => clamp01(ari_of(gt, l, true)),
            _ => None,
        },
        arp: clamp01(arp),
        arr: clamp01(arr),
        mbo: if sel.mbo { mbo_of(&over) } else { None },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Scenes contributing a value.
    pub count: usize,
}

impl Aggregate {
    pub fn of(values: impl Iterator<Item = Option<f64>>) -> Self {
        let v: Vec<f64> = values.flatten().collect();
        if v.is_empty() {
            return Self {
                mean: None,
                std: None,
                count: 0,
            };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean: Some(mean),
            std: Some(var.sqrt()),
            count: v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub version: u32,
    pub arp_arr_variant: String,
    pub iou_threshold: f64,
    pub metrics: MetricSelection,
    pub ap: Aggregate,
    pub pq: Aggregate,
    pub precision: Aggregate,
    pub recall: Aggregate,
    pub bg_recall: Aggregate,
    pub ari: Aggregate,
    pub fg_ari: Aggregate,
    pub arp: Aggregate,
    pub arr: Aggregate,
    pub mbo: Aggregate,
    pub scenes: Vec<SceneMetrics>,
}

pub const METRIC_REPORT_VERSION: u32 = 1;

impl MetricReport {
    /// Corpus means and standard deviations over per-scene values, skipping
    /// missing ones. `scenes` must already be in scene-id order.
    pub fn aggregate(scenes: Vec<SceneMetrics>, metrics: MetricSelection, iou_threshold: f64) -> Self {
        let agg = |f: fn(&SceneMetrics) -> Option<f64>| Aggregate::of(scenes.iter().map(f));
        Self {
            version: METRIC_REPORT_VERSION,
            arp_arr_variant: ARP_ARR_VARIANT.to_string(),
            iou_threshold,
            metrics,
            ap: agg(|s| s.ap),
            pq: agg(|s| s.pq),
            precision: agg(|s| s.precision),
            recall: agg(|s| s.recall),
            bg_recall: agg(|s| s.bg_recall),
            ari: agg(|s| s.ari),
            fg_ari: agg(|s| s.fg_ari),
            arp: agg(|s| s.arp),
            arr: agg(|s| s.arr),
            mbo: agg(|s| s.mbo),
            scenes,
        }
    }
}
