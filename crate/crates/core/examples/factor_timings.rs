//! Per-scene time of each factor family on the synthetic corpora.
//!
//! `cargo run --release --example factor_timings`

use std::time::{Duration, Instant};

use segcomplex::factors::{
    analyze_objects, analyze_scene, bg_color_gradient, bg_fg_color_similarity, bg_shape_irregularity,
};
use segcomplex::synth::{corpus, SceneKind};

const N: u32 = 20;

fn time(f: impl FnOnce()) -> Duration {
    let t = Instant::now();
    f();
    t.elapsed() / N
}

fn main() {
    for kind in [SceneKind::RealLike, SceneKind::TexturedConcave, SceneKind::Sprites, SceneKind::HighSimilarity] {
        let scenes = corpus(kind, "t", N as usize, 1);
        let obj = time(|| scenes.iter().for_each(|s| drop(analyze_objects(s, true, false))));
        let scene = time(|| scenes.iter().for_each(|s| drop(analyze_scene(s, true, false, 0))));
        let grad = time(|| scenes.iter().for_each(|s| drop(bg_color_gradient(s))));
        let sim = time(|| scenes.iter().for_each(|s| drop(bg_fg_color_similarity(s, 2048, 0))));
        let irr = time(|| scenes.iter().for_each(|s| drop(bg_shape_irregularity(s))));
        println!("{kind:?}: objects {obj:?}, scene {scene:?}, bg gradient {grad:?}, bg-fg similarity {sim:?}, bg irregularity {irr:?}");
    }
}
