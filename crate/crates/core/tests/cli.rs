mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::write_corpus;
use segcomplex::dataset::{write_label_png, write_prediction, write_rgb_png, DatasetManifest};
use segcomplex::image::{LabelMap, RgbImage};
use segcomplex::metrics::SegmentationPrediction;
use segcomplex::synth::SceneKind;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_segcomplex")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    write_corpus(SceneKind::Sprites, "sp", 2, 1, &data);
    let out = dir.path().join("x");
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["ablate", s(&data), "--out", s(&out), "--ops", "C,Q"]).0, 2);
    assert_eq!(run(&["analyze", s(&data), "--out", s(&out), "--factors", "colour"]).0, 2);
    assert_eq!(run(&["analyze", s(&data), "--out", s(&out), "--bins", "1"]).0, 2);
    assert_eq!(run(&["analyze", s(&data), "--out", s(&out), "--jobs", "0"]).0, 2);
    assert_eq!(run(&["evaluate", s(&data), s(&out), "--out", s(&out), "--metrics", "nope"]).0, 2);
    assert_eq!(run(&["analyze", s(&data)]).0, 2);
}

#[test]
fn data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["analyze", s(&dir.path().join("missing")), "--out", s(&dir.path().join("r.json"))]);
    assert_eq!(code, 1, "{err}");
    // a raw corpus where every scene has one object is filtered out entirely
    let raw = dir.path().join("raw");
    for i in 0..3 {
        let mut labels = LabelMap::new(20, 20);
        labels.set(3, 3, 1);
        write_rgb_png(&raw.join("images").join(format!("r{i}.png")), &RgbImage::new(20, 20)).unwrap();
        write_label_png(&raw.join("masks").join(format!("r{i}.png")), &labels).unwrap();
    }
    let (code, err) = run(&["prepare", s(&raw), "--out", s(&dir.path().join("p"))]);
    assert_eq!(code, 1);
    assert!(err.contains("all 3 scenes"), "{err}");
}

#[test]
fn analyze_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    write_corpus(SceneKind::Sprites, "sp", 4, 1, &data);
    let (json, csv) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    let (code, err) = run(&["analyze", s(&data), "--out", s(&json), "--csv", s(&csv), "--factors", "all"]);
    assert_eq!(code, 0, "{err}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["version"], 1);
    assert_eq!(report["dataset"], "sp");
    assert!(report["config"].get("jobs").is_none());
    let grad = report["factors"].as_array().unwrap().iter().find(|f| f["name"] == "object_color_gradient").unwrap();
    // flat sprites: every sample in the first bin
    let counts: Vec<u64> = grad["histogram"]["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(counts[0], grad["summary"]["count"].as_u64().unwrap());
    assert_eq!(counts.len(), 50);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("scene,object,factor,value,missing\n"));
    assert!(text.contains(",bg_shape_irregularity,"));
}

#[test]
fn ablate_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    let m = write_corpus(SceneKind::RealLike, "rl", 3, 1, &data);
    let abl = dir.path().join("abl");
    let (code, err) = run(&["ablate", s(&data), "--out", s(&abl), "--ops", "C,bgC", "--seed", "4"]);
    assert_eq!(code, 0, "{err}");
    let am = DatasetManifest::load(&abl).unwrap();
    assert_eq!(am.ids, m.ids);
    let abl_report = dir.path().join("a.json");
    assert_eq!(run(&["analyze", s(&abl), "--out", s(&abl_report), "--factors", "object,background"]).0, 0);
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&abl_report).unwrap()).unwrap();
    for f in r["factors"].as_array().unwrap() {
        if f["name"] == "object_color_gradient" || f["name"] == "bg_color_gradient" {
            assert_eq!(f["summary"]["p95"], 0.0, "{f}");
        }
    }

    // perfect predictions for two scenes, none for the third
    let preds = dir.path().join("pred");
    for id in &m.ids[..2] {
        let scene = segcomplex::dataset::load_scene(&m, id).unwrap();
        write_prediction(&preds, &SegmentationPrediction::from_labels(id.clone(), &scene.masks)).unwrap();
    }
    let out = dir.path().join("m.json");
    let (code, err) = run(&["evaluate", s(&data), s(&preds), "--out", s(&out), "--metrics", "ap,pr"]);
    assert_eq!(code, 0, "{err}");
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let scenes = r["scenes"].as_array().unwrap();
    assert_eq!(scenes[0]["ap"], 1.0);
    assert_eq!(scenes[1]["recall"], 1.0);
    assert_eq!(scenes[2]["ap"], 0.0);
    assert_eq!(scenes[2]["recall"], 0.0);
}

#[test]
fn prepare_splits_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw");
    for (i, s) in segcomplex::synth::corpus(SceneKind::Sprites, "r", 12, 9).iter().enumerate() {
        // 160×128 raw frames exercise the centre crop
        let mut img = RgbImage::new(160, 128);
        let mut labels = LabelMap::new(160, 128);
        for y in 0..128 {
            for x in 0..128 {
                img.set(x + 16, y, s.image.get(x, y));
                labels.set(x + 16, y, s.masks.get(x, y));
            }
        }
        write_rgb_png(&raw.join("images").join(format!("r{i:02}.png")), &img).unwrap();
        write_label_png(&raw.join("masks").join(format!("r{i:02}.png")), &labels).unwrap();
    }
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let (code, err) = run(&["prepare", s(&raw), "--out", s(out), "--size", "64", "--test-ratio", "0.5", "--jobs", "3"]);
        assert_eq!(code, 0, "{err}");
    }
    let train = DatasetManifest::load(a.join("train")).unwrap();
    let test = DatasetManifest::load(a.join("test")).unwrap();
    assert_eq!(train.ids.len() + test.ids.len(), 12);
    assert_eq!(fs::read(a.join("test/manifest.json")).unwrap().len(), fs::read(b.join("test/manifest.json")).unwrap().len());
    assert_eq!(DatasetManifest::load(b.join("test")).unwrap().ids, test.ids);
    let scene = segcomplex::dataset::load_scene(&train, &train.ids[0]).unwrap();
    assert_eq!((scene.width(), scene.height()), (64, 64));
}
