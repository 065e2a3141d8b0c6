//! Corpus-level runs: factor analysis with histograms and summaries, metric
//! evaluation, ablation and preparation, each on a fixed-size worker pool.
//!
//! Scenes are processed in parallel but collected in manifest order, and all
//! randomness is keyed by `(seed, scene id)`, so the emitted bytes do not depend
//! on the number of workers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ablation::{apply_ablations, AblationSpec};
use crate::dataset::{
    list_raw_pairs, load_prediction, load_scene, prepare_scene, read_label_png, read_rgb_png, split_for,
    write_manifest, write_scene, DatasetManifest, PrepareConfig, SceneRecord, Split, MANIFEST_VERSION,
};
use crate::error::{Error, Result};
use crate::factors::{
    analyze_background, analyze_objects, analyze_scene, BackgroundFactorRecord, FactorSelection, FactorValue,
    Measured, ObjectFactorRecord, SceneFactorRecord, DEFAULT_HUNGARIAN_BUDGET,
};
use crate::metrics::{evaluate_scene, MetricReport, MetricSelection};

pub const FACTOR_REPORT_VERSION: u32 = 1;
pub const DEFAULT_BINS: usize = 50;
/// Upper edge of the regular gradient bins; larger values land in the overflow bin.
pub const GRADIENT_RANGE: f64 = 100.0;
/// Upper edge for per-pixel entropies of 8-bit values.
pub const ENTROPY_RANGE: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub jobs: usize,
    pub seed: u64,
    pub factors: FactorSelection,
    pub bins: usize,
    pub hungarian_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            jobs: 1,
            seed: 0,
            factors: FactorSelection::all(),
            bins: DEFAULT_BINS,
            hungarian_budget: DEFAULT_HUNGARIAN_BUDGET,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        if self.bins < 2 {
            return Err(Error::InvalidConfig("bins must be at least 2".into()));
        }
        if self.hungarian_budget == 0 {
            return Err(Error::InvalidConfig("hungarian budget must be positive".into()));
        }
        Ok(())
    }
}

/// Runs `f` on a dedicated pool of `jobs` threads.
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Factor values of one scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFactors {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(default)]
    pub objects: Vec<ObjectFactorRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scene: Option<SceneFactorRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub background: Option<BackgroundFactorRecord>,
}

pub fn analyze_scene_factors(scene: &SceneRecord, cfg: &RunConfig) -> SceneFactors {
    let sel = cfg.factors;
    let objects = if sel.object || sel.candidates {
        analyze_objects(scene, sel.object, sel.candidates)
    } else {
        Vec::new()
    };
    SceneFactors {
        id: scene.id.clone(),
        error: None,
        objects,
        scene: (sel.scene || sel.candidates).then(|| analyze_scene(scene, sel.scene, sel.candidates, cfg.seed)),
        background: sel
            .background
            .then(|| analyze_background(scene, cfg.hungarian_budget, cfg.seed)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// `[0, 1]`.
    Unit,
    /// `[0, 100]` plus an overflow bin.
    Gradient,
    /// `[0, 8]` bits.
    Entropy,
    /// `[0, max]` of the observed values.
    Range,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub overflow: Option<usize>,
}

impl Histogram {
    pub fn build(values: &[f64], binning: Binning, bins: usize) -> Self {
        let hi = match binning {
            Binning::Unit => 1.0,
            Binning::Gradient => GRADIENT_RANGE,
            Binning::Entropy => ENTROPY_RANGE,
            Binning::Range => {
                let m = values.iter().copied().fold(0.0, f64::max);
                if m > 0.0 {
                    m
                } else {
                    1.0
                }
            }
        };
        let edges: Vec<f64> = (0..=bins).map(|i| hi * i as f64 / bins as f64).collect();
        let mut counts = vec![0; bins];
        let mut overflow = (binning == Binning::Gradient).then_some(0);
        for &v in values {
            if v > hi {
                if let Some(o) = overflow.as_mut() {
                    *o += 1;
                    continue;
                }
            }
            let k = ((v / hi) * bins as f64).floor();
            counts[(k.max(0.0) as usize).min(bins - 1)] += 1;
        }
        Self { edges, counts, overflow }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.overflow.unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub missing: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub p5: Option<f64>,
    pub p95: Option<f64>,
}

/// Percentile by linear interpolation between closest ranks; `sorted` must be
/// ascending and nonempty.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Summary {
    pub fn of(values: &[f64], missing: usize) -> Self {
        if values.is_empty() {
            return Self {
                count: 0,
                missing,
                mean: None,
                median: None,
                p5: None,
                p95: None,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            count: values.len(),
            missing,
            mean: Some(values.iter().sum::<f64>() / values.len() as f64),
            median: Some(percentile(&sorted, 0.5)),
            p5: Some(percentile(&sorted, 0.05)),
            p95: Some(percentile(&sorted, 0.95)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorDistribution {
    pub name: String,
    pub level: String,
    pub binning: Binning,
    pub summary: Summary,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub seed: u64,
    pub factors: Vec<String>,
    pub bins: usize,
    pub hungarian_budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub version: u32,
    pub dataset: String,
    pub config: ReportConfig,
    pub factors: Vec<FactorDistribution>,
    pub scenes: Vec<SceneFactors>,
}

/// One value (or its absence) of a named factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub scene: String,
    pub object: Option<u16>,
    pub factor: &'static str,
    pub value: std::result::Result<f64, String>,
}

fn from_measured(v: &FactorValue) -> std::result::Result<f64, String> {
    match v {
        Measured::Value(x) => Ok(*x),
        Measured::Missing { missing } => Err(missing.clone()),
    }
}

struct FactorDef {
    name: &'static str,
    level: &'static str,
    binning: Binning,
}

const fn def(name: &'static str, level: &'static str, binning: Binning) -> FactorDef {
    FactorDef { name, level, binning }
}

const OBJECT_FACTORS: [FactorDef; 2] = [
    def("object_color_gradient", "object", Binning::Gradient),
    def("object_shape_concavity", "object", Binning::Unit),
];
const SCENE_FACTORS: [FactorDef; 2] = [
    def("inter_object_color_similarity", "scene", Binning::Unit),
    def("inter_object_shape_variation", "scene", Binning::Range),
];
const BACKGROUND_FACTORS: [FactorDef; 3] = [
    def("bg_color_gradient", "background", Binning::Gradient),
    def("bg_fg_color_similarity", "background", Binning::Unit),
    def("bg_shape_irregularity", "background", Binning::Unit),
];
const OBJECT_CANDIDATES: [FactorDef; 6] = [
    def("color_count", "object", Binning::Range),
    def("color_entropy", "object", Binning::Entropy),
    def("non_rectangularity", "object", Binning::Unit),
    def("incompactness", "object", Binning::Unit),
    def("discontinuity", "object", Binning::Unit),
    def("decentralization", "object", Binning::Range),
];
const SCENE_CANDIDATES: [FactorDef; 7] = [
    def("chamfer_color_similarity", "scene", Binning::Unit),
    def("hausdorff_color_similarity", "scene", Binning::Unit),
    def("boundary_shape_similarity", "scene", Binning::Unit),
    def("shape_entropy", "scene", Binning::Range),
    def("centroid_proximity", "scene", Binning::Range),
    def("chamfer_proximity", "scene", Binning::Range),
    def("area_variation", "scene", Binning::Range),
];

fn selected_defs(sel: FactorSelection) -> Vec<&'static FactorDef> {
    let mut out: Vec<&'static FactorDef> = Vec::new();
    if sel.object {
        out.extend(OBJECT_FACTORS.iter());
    }
    if sel.scene {
        out.extend(SCENE_FACTORS.iter());
    }
    if sel.background {
        out.extend(BACKGROUND_FACTORS.iter());
    }
    if sel.candidates {
        out.extend(OBJECT_CANDIDATES.iter());
        out.extend(SCENE_CANDIDATES.iter());
    }
    out
}

/// Flattens per-scene records into samples, in scene then object order.
pub fn samples(scenes: &[SceneFactors], sel: FactorSelection) -> Vec<Sample> {
    let mut out = Vec::new();
    for s in scenes {
        let mut push = |object: Option<u16>, factor: &'static str, value: std::result::Result<f64, String>| {
            out.push(Sample {
                scene: s.id.clone(),
                object,
                factor,
                value,
            })
        };
        if let Some(err) = &s.error {
            // objects are unknown when the scene could not be read
            for d in selected_defs(sel).into_iter().filter(|d| d.level != "object") {
                push(None, d.name, Err(err.clone()));
            }
            continue;
        }
        for o in &s.objects {
            if sel.object {
                if let Some(v) = &o.color_gradient {
                    push(Some(o.id), "object_color_gradient", from_measured(v));
                }
                if let Some(v) = &o.shape_concavity {
                    push(Some(o.id), "object_shape_concavity", from_measured(v));
                }
            }
            if let Some(c) = &o.candidates {
                match c {
                    Measured::Value(c) => {
                        push(Some(o.id), "color_count", Ok(c.color_count as f64));
                        push(Some(o.id), "color_entropy", Ok(c.color_entropy));
                        push(Some(o.id), "non_rectangularity", Ok(c.non_rectangularity));
                        push(Some(o.id), "incompactness", Ok(c.incompactness));
                        push(Some(o.id), "discontinuity", Ok(c.discontinuity));
                        push(Some(o.id), "decentralization", Ok(c.decentralization));
                    }
                    Measured::Missing { missing } => {
                        for d in &OBJECT_CANDIDATES {
                            push(Some(o.id), d.name, Err(missing.clone()));
                        }
                    }
                }
            }
        }
        if let Some(r) = &s.scene {
            if let Some(v) = &r.inter_object_color_similarity {
                push(None, "inter_object_color_similarity", from_measured(v));
            }
            if let Some(v) = &r.inter_object_shape_variation {
                push(None, "inter_object_shape_variation", from_measured(v));
            }
            if let Some(c) = &r.candidates {
                match c {
                    Measured::Value(c) => {
                        push(None, "chamfer_color_similarity", Ok(c.chamfer_color_similarity));
                        push(None, "hausdorff_color_similarity", Ok(c.hausdorff_color_similarity));
                        push(None, "boundary_shape_similarity", Ok(c.boundary_shape_similarity));
                        push(None, "shape_entropy", Ok(c.shape_entropy));
                        push(None, "centroid_proximity", Ok(c.centroid_proximity));
                        push(None, "chamfer_proximity", Ok(c.chamfer_proximity));
                        push(None, "area_variation", Ok(c.area_variation));
                    }
                    Measured::Missing { missing } => {
                        for d in &SCENE_CANDIDATES {
                            push(None, d.name, Err(missing.clone()));
                        }
                    }
                }
            }
        }
        if let Some(b) = &s.background {
            push(None, "bg_color_gradient", from_measured(&b.bg_color_gradient));
            push(None, "bg_fg_color_similarity", from_measured(&b.bg_fg_color_similarity));
            let irr = match &b.bg_shape_irregularity {
                Measured::Value(v) => Ok(v.score),
                Measured::Missing { missing } => Err(missing.clone()),
            };
            push(None, "bg_shape_irregularity", irr);
        }
    }
    out
}

impl FactorReport {
    pub fn build(dataset: String, scenes: Vec<SceneFactors>, cfg: &RunConfig) -> Self {
        let all = samples(&scenes, cfg.factors);
        let factors = selected_defs(cfg.factors)
            .into_iter()
            .map(|d| {
                let mut values = Vec::new();
                let mut missing = 0;
                for s in all.iter().filter(|s| s.factor == d.name) {
                    match s.value {
                        Ok(v) => values.push(v),
                        Err(_) => missing += 1,
                    }
                }
                FactorDistribution {
                    name: d.name.to_string(),
                    level: d.level.to_string(),
                    binning: d.binning,
                    summary: Summary::of(&values, missing),
                    histogram: Histogram::build(&values, d.binning, cfg.bins),
                }
            })
            .collect();
        let sel = cfg.factors;
        let families = [
            (sel.object, "object"),
            (sel.scene, "scene"),
            (sel.background, "background"),
            (sel.candidates, "candidates"),
        ];
        Self {
            version: FACTOR_REPORT_VERSION,
            dataset,
            config: ReportConfig {
                seed: cfg.seed,
                factors: families.iter().filter(|f| f.0).map(|f| f.1.to_string()).collect(),
                bins: cfg.bins,
                hungarian_budget: cfg.hungarian_budget,
            },
            factors,
            scenes,
        }
    }

    pub fn factor(&self, name: &str) -> Option<&FactorDistribution> {
        self.factors.iter().find(|f| f.name == name)
    }
}

fn dataset_name(manifest: &DatasetManifest) -> String {
    manifest
        .provenance
        .get("dataset")
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .or_else(|| manifest.root.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_default()
}

/// Computes the selected factors for every scene of the dataset. Scenes that
/// cannot be read are kept with an error and count as missing values.
pub fn analyze_dataset(manifest: &DatasetManifest, cfg: &RunConfig) -> Result<FactorReport> {
    cfg.validate()?;
    let scenes = with_pool(cfg.jobs, || {
        manifest
            .ids
            .par_iter()
            .map(|id| match load_scene(manifest, id) {
                Ok(scene) => analyze_scene_factors(&scene, cfg),
                Err(e) => SceneFactors {
                    id: id.clone(),
                    error: Some(e.to_string()),
                    objects: Vec::new(),
                    scene: None,
                    background: None,
                },
            })
            .collect::<Vec<_>>()
    })?;
    Ok(FactorReport::build(dataset_name(manifest), scenes, cfg))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Per-sample CSV: `scene,object,factor,value,missing`.
pub fn write_samples_csv(path: &Path, report: &FactorReport, sel: FactorSelection) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let csv_err = |e: csv::Error| Error::io(path, std::io::Error::other(e.to_string()));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["scene", "object", "factor", "value", "missing"]).map_err(csv_err)?;
    for s in samples(&report.scenes, sel) {
        let object = s.object.map(|o| o.to_string()).unwrap_or_default();
        let (value, missing) = match &s.value {
            Ok(v) => (v.to_string(), String::new()),
            Err(r) => (String::new(), r.clone()),
        };
        w.write_record([s.scene.as_str(), &object, s.factor, &value, &missing])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn cmd_analyze(dataset: &Path, cfg: &RunConfig, out: &Path, csv: Option<&Path>) -> Result<FactorReport> {
    let manifest = DatasetManifest::load(dataset)?;
    let report = analyze_dataset(&manifest, cfg)?;
    write_json(out, &report)?;
    if let Some(p) = csv {
        write_samples_csv(p, &report, cfg.factors)?;
    }
    Ok(report)
}

pub fn cmd_ablate(dataset: &Path, spec: &AblationSpec, out: &Path, jobs: usize) -> Result<DatasetManifest> {
    let manifest = DatasetManifest::load(dataset)?;
    with_pool(jobs, || apply_ablations(&manifest, spec, out))?
}

/// Scores predictions under `pred_dir` against the dataset's label maps.
/// Scenes without predictions score as empty predictions.
pub fn evaluate_dataset(
    manifest: &DatasetManifest,
    pred_dir: &Path,
    sel: MetricSelection,
    iou_thresh: f64,
    jobs: usize,
) -> Result<MetricReport> {
    if !(iou_thresh > 0.0 && iou_thresh < 1.0) {
        return Err(Error::InvalidConfig(format!("iou threshold {iou_thresh} outside (0, 1)")));
    }
    let scenes = with_pool(jobs, || {
        manifest
            .ids
            .par_iter()
            .map(|id| {
                let gt = load_scene(manifest, id)?;
                let pred = load_prediction(pred_dir, id, gt.width(), gt.height())?;
                evaluate_scene(&gt.masks, &pred, &sel, iou_thresh).map_err(|e| Error::in_scene(id, e))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(MetricReport::aggregate(scenes, sel, iou_thresh))
}

pub fn cmd_evaluate(
    dataset: &Path,
    pred_dir: &Path,
    sel: MetricSelection,
    iou_thresh: f64,
    jobs: usize,
    out: &Path,
) -> Result<MetricReport> {
    let manifest = DatasetManifest::load(dataset)?;
    let report = evaluate_dataset(&manifest, pred_dir, sel, iou_thresh, jobs)?;
    write_json(out, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrepareSummary {
    pub input: usize,
    pub kept: usize,
    pub train: Option<DatasetManifest>,
    pub test: Option<DatasetManifest>,
}

/// Crops, resizes and filters a raw `images/` + `masks/` directory, then
/// writes the kept scenes into `out/train` and `out/test` by a hash split.
pub fn cmd_prepare(
    raw: &Path,
    cfg: &PrepareConfig,
    test_ratio: f64,
    seed: u64,
    jobs: usize,
    out: &Path,
) -> Result<PrepareSummary> {
    if !(0.0..=1.0).contains(&test_ratio) {
        return Err(Error::InvalidConfig(format!("test ratio {test_ratio} outside [0, 1]")));
    }
    let pairs = list_raw_pairs(raw)?;
    let prepared: Vec<Option<SceneRecord>> = with_pool(jobs, || {
        pairs
            .par_iter()
            .map(|(id, img, mask)| {
                let image = read_rgb_png(img)?;
                let labels = read_label_png(mask)?;
                prepare_scene(id, &image, &labels, cfg).map_err(|e| Error::in_scene(id, e))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let kept: Vec<SceneRecord> = prepared.into_iter().flatten().collect();
    if kept.is_empty() {
        return Err(Error::AllFiltered {
            input: pairs.len(),
            criteria: format!(
                "objects per scene {}..={}, area bounds {:?}",
                cfg.min_objects, cfg.max_objects, cfg.area_fraction
            ),
        });
    }
    let mut parts: BTreeMap<Split, Vec<&SceneRecord>> = BTreeMap::new();
    for s in &kept {
        parts.entry(split_for(&s.id, test_ratio, seed)).or_default().push(s);
    }
    let mut summary = PrepareSummary {
        input: pairs.len(),
        kept: kept.len(),
        train: None,
        test: None,
    };
    for (split, scenes) in parts {
        let root: PathBuf = out.join(split.as_str());
        with_pool(jobs, || scenes.par_iter().try_for_each(|s| write_scene(&root, s)))??;
        let mut provenance = BTreeMap::new();
        provenance.insert("source_root".to_string(), json!(raw.display().to_string()));
        provenance.insert("prepare".to_string(), json!(cfg));
        provenance.insert("split_seed".to_string(), json!(seed));
        provenance.insert("test_ratio".to_string(), json!(test_ratio));
        let mut ids: Vec<String> = scenes.iter().map(|s| s.id.clone()).collect();
        ids.sort();
        let manifest = DatasetManifest {
            root: root.clone(),
            version: MANIFEST_VERSION,
            split,
            ids,
            provenance,
        };
        write_manifest(&manifest)?;
        match split {
            Split::Train => summary.train = Some(manifest),
            Split::Test => summary.test = Some(manifest),
        }
    }
    Ok(summary)
}
