//! Procedural scene generators used as fixture corpora.
//!
//! * [`SceneKind::Sprites`]: flat-coloured convex sprites of similar size on black.
//! * [`SceneKind::TexturedConcave`]: noisy, concave objects of widely varying
//!   size in closely related colours.
//! * [`SceneKind::RealLike`]: multi-coloured concave objects of varied size on
//!   a textured background, one object per quadrant with near-square boxes.
//! * [`SceneKind::HighSimilarity`]: objects whose colours are nearly identical.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::SceneRecord;
use crate::image::{LabelMap, RgbImage};
use crate::sampling::rng_for;

pub const SYNTH_SIZE: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    Sprites,
    TexturedConcave,
    RealLike,
    HighSimilarity,
}

impl SceneKind {
    fn tag(self) -> &'static [u8] {
        match self {
            SceneKind::Sprites => b"sprites",
            SceneKind::TexturedConcave => b"textured-concave",
            SceneKind::RealLike => b"real-like",
            SceneKind::HighSimilarity => b"high-similarity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Rect,
    Ellipse,
    Triangle,
    L,
    U,
    Cross,
    Arc,
}

const CONVEX: [Shape; 3] = [Shape::Rect, Shape::Ellipse, Shape::Triangle];
const CONCAVE: [Shape; 4] = [Shape::L, Shape::U, Shape::Cross, Shape::Arc];

/// Whether local pixel `(x, y)` of a `w`×`h` box belongs to the shape.
fn inside(shape: Shape, x: usize, y: usize, w: usize, h: usize) -> bool {
    let (u, v) = ((x as f64 + 0.5) / w as f64, (y as f64 + 0.5) / h as f64);
    match shape {
        Shape::Rect => true,
        Shape::Ellipse => (u - 0.5).powi(2) + (v - 0.5).powi(2) <= 0.25,
        Shape::Triangle => v >= 1.0 - 2.0 * u.min(1.0 - u),
        Shape::L => u < 0.45 || v > 0.55,
        Shape::U => u < 0.3 || u > 0.7 || v > 0.65,
        Shape::Cross => (0.33..0.67).contains(&u) || (0.33..0.67).contains(&v),
        Shape::Arc => {
            let r2 = (u - 0.5).powi(2) + (v - 0.5).powi(2);
            r2 <= 0.25 && r2 >= 0.06 && !(u > 0.6 && (v - 0.5).abs() < 0.15)
        }
    }
}

struct Placed {
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    shape: Shape,
}

fn random_color(rng: &mut ChaCha8Rng) -> [u8; 3] {
    [rng.random(), rng.random(), rng.random()]
}

fn jitter(c: [u8; 3], amount: i32, rng: &mut ChaCha8Rng) -> [u8; 3] {
    c.map(|v| (v as i32 + rng.random_range(-amount..=amount)).clamp(0, 255) as u8)
}

/// Tries to place `k` boxes without overlap (one pixel gap); gives up on a box
/// after a bounded number of attempts.
fn place_free(rng: &mut ChaCha8Rng, sizes: &[(usize, usize)], shapes: &[Shape]) -> Vec<Placed> {
    let mut out: Vec<Placed> = Vec::new();
    for (&(w, h), &shape) in sizes.iter().zip(shapes) {
        for _ in 0..200 {
            let x0 = rng.random_range(0..=SYNTH_SIZE - w);
            let y0 = rng.random_range(0..=SYNTH_SIZE - h);
            let clear = out.iter().all(|p| {
                x0 + w + 1 <= p.x0 || p.x0 + p.w + 1 <= x0 || y0 + h + 1 <= p.y0 || p.y0 + p.h + 1 <= y0
            });
            if clear {
                out.push(Placed { x0, y0, w, h, shape });
                break;
            }
        }
    }
    out
}

fn value_noise(rng: &mut ChaCha8Rng, cell: usize) -> impl Fn(usize, usize) -> f64 {
    let n = SYNTH_SIZE / cell + 2;
    let lattice: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>()).collect();
    move |x, y| {
        let (gx, gy) = (x as f64 / cell as f64, y as f64 / cell as f64);
        let (i, j) = (gx.floor() as usize, gy.floor() as usize);
        let (fx, fy) = (gx.fract(), gy.fract());
        let at = |a: usize, b: usize| lattice[b * n + a];
        let top = at(i, j) * (1.0 - fx) + at(i + 1, j) * fx;
        let bottom = at(i, j + 1) * (1.0 - fx) + at(i + 1, j + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

/// Generates one 128×128 scene of the given kind.
pub fn generate(kind: SceneKind, id: &str, seed: u64) -> SceneRecord {
    let mut rng = rng_for(seed, &[b"synth", kind.tag(), id.as_bytes()]);
    let mut image = RgbImage::new(SYNTH_SIZE, SYNTH_SIZE);
    let mut labels = LabelMap::new(SYNTH_SIZE, SYNTH_SIZE);

    let placed = match kind {
        SceneKind::Sprites => {
            let k = rng.random_range(2..=6);
            let sizes: Vec<(usize, usize)> = (0..k)
                .map(|_| {
                    let s = rng.random_range(16..=22);
                    (s, s)
                })
                .collect();
            let shapes: Vec<Shape> = (0..k).map(|_| CONVEX[rng.random_range(0..CONVEX.len())]).collect();
            place_free(&mut rng, &sizes, &shapes)
        }
        SceneKind::TexturedConcave | SceneKind::HighSimilarity => {
            let k = rng.random_range(2..=6);
            let sizes: Vec<(usize, usize)> = (0..k)
                .map(|_| (rng.random_range(10..=56), rng.random_range(10..=56)))
                .collect();
            let shapes: Vec<Shape> = (0..k).map(|_| CONCAVE[rng.random_range(0..CONCAVE.len())]).collect();
            place_free(&mut rng, &sizes, &shapes)
        }
        SceneKind::RealLike => {
            let k = rng.random_range(2..=4);
            let mut cells = [0usize, 1, 2, 3];
            for i in (1..4).rev() {
                cells.swap(i, rng.random_range(0..=i));
            }
            cells[..k]
                .iter()
                .map(|&c| {
                    let side = rng.random_range(12..=46);
                    let other = ((side as f64) * rng.random_range(0.9..1.1)).round() as usize;
                    let (w, h) = if rng.random() { (side, other) } else { (other, side) };
                    let (cx, cy) = (32 + 64 * (c % 2), 32 + 64 * (c / 2));
                    Placed {
                        x0: cx - w / 2,
                        y0: cy - h / 2,
                        w,
                        h,
                        shape: CONCAVE[rng.random_range(0..CONCAVE.len())],
                    }
                })
                .collect()
        }
    };

    // background
    match kind {
        SceneKind::Sprites => {}
        SceneKind::RealLike | SceneKind::TexturedConcave => {
            let base = random_color(&mut rng);
            let noise = value_noise(&mut rng, 8);
            let stripe = rng.random_range(3..9);
            for y in 0..SYNTH_SIZE {
                for x in 0..SYNTH_SIZE {
                    let t = noise(x, y) * 0.7 + if (x + y) / stripe % 2 == 0 { 0.3 } else { 0.0 };
                    image.set(x, y, base.map(|v| (v as f64 * (0.5 + 0.5 * t)).round() as u8));
                }
            }
        }
        SceneKind::HighSimilarity => {
            let c = rng.random_range(0..60u8);
            for i in 0..SYNTH_SIZE * SYNTH_SIZE {
                image.set_index(i, [c, c, c]);
            }
        }
    }

    let shared = random_color(&mut rng);
    for (k, p) in placed.iter().enumerate() {
        let id = k as u16 + 1;
        let color = match kind {
            SceneKind::Sprites | SceneKind::RealLike => random_color(&mut rng),
            SceneKind::TexturedConcave => jitter(shared, 25, &mut rng),
            SceneKind::HighSimilarity => jitter(shared, 6, &mut rng),
        };
        let second = random_color(&mut rng);
        let noise = value_noise(&mut rng, 3);
        for y in 0..p.h {
            for x in 0..p.w {
                if !inside(p.shape, x, y, p.w, p.h) {
                    continue;
                }
                let (gx, gy) = (p.x0 + x, p.y0 + y);
                let c = match kind {
                    SceneKind::Sprites | SceneKind::HighSimilarity => color,
                    SceneKind::TexturedConcave => {
                        let t = noise(gx, gy);
                        color.map(|v| (v as f64 * (0.55 + 0.45 * t)).round() as u8)
                    }
                    SceneKind::RealLike => {
                        let t = noise(gx, gy);
                        let base = if (x * 3 / p.w + y * 2 / p.h) % 2 == 0 { color } else { second };
                        base.map(|v| (v as f64 * (0.6 + 0.4 * t)).round() as u8)
                    }
                };
                image.set(gx, gy, c);
                labels.set(gx, gy, id);
            }
        }
    }
    SceneRecord::new(id, image, labels).expect("generator keeps dimensions")
}

/// `n` scenes with ids `<prefix>-0000`, `<prefix>-0001`, ...
pub fn corpus(kind: SceneKind, prefix: &str, n: usize, seed: u64) -> Vec<SceneRecord> {
    (0..n).map(|i| generate(kind, &format!("{prefix}-{i:04}"), seed)).collect()
}
