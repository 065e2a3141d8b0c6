use std::collections::VecDeque;

use super::{BinaryMask, Connectivity};
use crate::error::{Error, Result};

pub const INFINITE_DISTANCE: u32 = u32::MAX;

/// Integer per-pixel distances; unreachable pixels hold [`INFINITE_DISTANCE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    width: usize,
    height: usize,
    dist: Vec<u32>,
}

impl DistanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.dist[y * self.width + x]
    }

    pub fn as_raw(&self) -> &[u32] {
        &self.dist
    }
}

/// Geodesic 4-neighbour distance from `sources` with paths confined to `domain`.
pub fn constrained_distance_transform(domain: &BinaryMask, sources: &BinaryMask) -> Result<DistanceMap> {
    if domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let (w, h) = (domain.width(), domain.height());
    let mut dist = vec![INFINITE_DISTANCE; w * h];
    let mut queue = VecDeque::new();
    for i in 0..w * h {
        if domain.get_index(i) && sources.get_index(i) {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    bfs(&mut dist, &mut queue, w, h, |j| domain.get_index(j));
    Ok(DistanceMap {
        width: w,
        height: h,
        dist,
    })
}

pub(crate) fn bfs(
    dist: &mut [u32],
    queue: &mut VecDeque<usize>,
    w: usize,
    h: usize,
    passable: impl Fn(usize) -> bool,
) {
    while let Some(i) = queue.pop_front() {
        let d = dist[i] + 1;
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for &(dx, dy) in Connectivity::Four.offsets() {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                continue;
            }
            let j = ny as usize * w + nx as usize;
            if dist[j] == INFINITE_DISTANCE && passable(j) {
                dist[j] = d;
                queue.push_back(j);
            }
        }
    }
}

/// 1-D lower envelope of parabolas: `out[x] = min_q (x-q)^2 + f[q]` with argmin.
fn envelope_1d(f: &[f64], out: &mut [f64], arg: &mut [usize], v: &mut Vec<usize>, z: &mut Vec<f64>) {
    let n = f.len();
    v.clear();
    z.clear();
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        if v.is_empty() {
            v.push(q);
            z.push(f64::NEG_INFINITY);
            z.push(f64::INFINITY);
            continue;
        }
        let fq = f[q] + (q * q) as f64;
        // z[0] = -inf, so the first parabola is never dropped
        loop {
            let p = *v.last().unwrap();
            let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[v.len() - 1] {
                v.pop();
                z.pop();
            } else {
                *z.last_mut().unwrap() = s;
                z.push(f64::INFINITY);
                v.push(q);
                break;
            }
        }
    }
    if v.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut k = 0;
    for x in 0..n {
        while z[k + 1] < x as f64 {
            k += 1;
        }
        let q = v[k];
        let d = x as f64 - q as f64;
        out[x] = d * d + f[q];
        arg[x] = q;
    }
}

/// Exact squared Euclidean distance to the nearest set pixel of `features`,
/// together with that pixel's index. Returns infinities and `None` when
/// `features` is empty.
pub fn nearest_feature_transform(features: &BinaryMask) -> (Vec<f64>, Vec<Option<usize>>) {
    let (w, h) = (features.width(), features.height());
    let n = w * h;
    // column pass: squared vertical distance and nearest row per column
    let mut col_d = vec![f64::INFINITY; n];
    let mut col_row = vec![0usize; n];
    let mut f = vec![0.0; h];
    let mut out = vec![0.0; h.max(w)];
    let mut arg = vec![0usize; h.max(w)];
    let (mut v, mut z) = (Vec::new(), Vec::new());
    for x in 0..w {
        for y in 0..h {
            f[y] = if features.get(x, y) { 0.0 } else { f64::INFINITY };
        }
        envelope_1d(&f, &mut out[..h], &mut arg[..h], &mut v, &mut z);
        for y in 0..h {
            col_d[y * w + x] = out[y];
            col_row[y * w + x] = arg[y];
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut nearest = vec![None; n];
    let mut g = vec![0.0; w];
    for y in 0..h {
        g.copy_from_slice(&col_d[y * w..(y + 1) * w]);
        envelope_1d(&g, &mut out[..w], &mut arg[..w], &mut v, &mut z);
        for x in 0..w {
            let i = y * w + x;
            dist[i] = out[x];
            if out[x].is_finite() {
                let qx = arg[x];
                nearest[i] = Some(col_row[y * w + qx] * w + qx);
            }
        }
    }
    (dist, nearest)
}

/// Exact squared Euclidean distance transform to the set pixels of `features`.
pub fn euclidean_sq_distance_transform(features: &BinaryMask) -> Vec<f64> {
    nearest_feature_transform(features).0
}
