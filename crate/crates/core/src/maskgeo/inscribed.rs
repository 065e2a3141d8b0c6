//! Approximate maximal inscribed convex set of a raster region.
//!
//! Each iteration takes the convex deficiency `D = hull - region`, measures how
//! far every deficiency pixel sits from the outside of the hull (4-neighbour
//! paths through `D` only), and cuts at the deepest pixel `dc` along one of the
//! eight compass rays. The cut that removes the fewest region pixels wins. The
//! loop stops once the deepest concavity is at most [`CONVEXITY_DEPTH`].

use std::collections::VecDeque;

use super::components::label_components;
use super::distance::{bfs, INFINITE_DISTANCE};
use super::hull::convex_hull;
use super::{BinaryMask, Connectivity};
use crate::error::{Error, Result};

/// Deficiency depth at or below which a region counts as convex.
pub const CONVEXITY_DEPTH: u32 = 3;

const RAYS: [(isize, isize); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

#[derive(Debug, Clone)]
pub struct InscribedConvexState {
    pub region: BinaryMask,
    pub hull: BinaryMask,
    /// `hull - region`.
    pub deficiency: BinaryMask,
    /// Deepest concavity, `None` when the deficiency is empty.
    pub deepest: Option<(usize, usize)>,
    /// Distance label of `deepest`; [`INFINITE_DISTANCE`] for enclosed holes.
    pub depth: u32,
    /// Number of cuts applied so far.
    pub iteration: usize,
}

impl InscribedConvexState {
    pub fn is_convex(&self) -> bool {
        self.depth <= CONVEXITY_DEPTH
    }
}

struct Analysis {
    hull: BinaryMask,
    deficiency: BinaryMask,
    deepest: Option<(usize, usize)>,
    depth: u32,
}

fn analyze(region: &BinaryMask) -> Result<Analysis> {
    let hull = convex_hull(region)?.mask;
    let deficiency = hull.difference(region);
    if deficiency.is_empty() {
        return Ok(Analysis {
            hull,
            deficiency,
            deepest: None,
            depth: 0,
        });
    }
    let (w, h) = (region.width(), region.height());
    let mut dist = vec![INFINITE_DISTANCE; w * h];
    let mut queue = VecDeque::new();
    for i in 0..w * h {
        if !hull.get_index(i) {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    // pixels beyond the raster are outside the hull as well
    for x in 0..w {
        for y in [0, h - 1] {
            let i = y * w + x;
            if deficiency.get_index(i) && dist[i] == INFINITE_DISTANCE {
                dist[i] = 1;
                queue.push_back(i);
            }
        }
    }
    for y in 0..h {
        for x in [0, w - 1] {
            let i = y * w + x;
            if deficiency.get_index(i) && dist[i] == INFINITE_DISTANCE {
                dist[i] = 1;
                queue.push_back(i);
            }
        }
    }
    bfs(&mut dist, &mut queue, w, h, |j| deficiency.get_index(j));
    let mut best: Option<(usize, u32)> = None;
    for i in deficiency.iter_indices() {
        if best.is_none_or(|(_, d)| dist[i] > d) {
            best = Some((i, dist[i]));
        }
    }
    let (i, depth) = best.expect("deficiency is non-empty");
    Ok(Analysis {
        hull,
        deficiency,
        deepest: Some((i % w, i / w)),
        depth,
    })
}

/// Hull, deficiency and deepest concavity of `region` without cutting.
pub fn deficiency_depth(region: &BinaryMask) -> Result<InscribedConvexState> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let a = analyze(region)?;
    Ok(InscribedConvexState {
        region: region.clone(),
        hull: a.hull,
        deficiency: a.deficiency,
        deepest: a.deepest,
        depth: a.depth,
        iteration: 0,
    })
}

/// Pixels of the ray from `start` in direction `dir`, up to the last pixel
/// inside `hull`.
fn trace_ray(start: (usize, usize), dir: (isize, isize), hull: &BinaryMask) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut x, mut y) = (start.0 as isize, start.1 as isize);
    while hull.get_signed(x, y) {
        out.push(y as usize * hull.width() + x as usize);
        x += dir.0;
        y += dir.1;
    }
    out
}

/// Region left after cutting along `cut`: the largest 4-connected piece,
/// optionally with the cut pixels bordering it. Among equally large pieces the
/// one starting later in raster order is kept.
fn apply_cut(region: &BinaryMask, cut: &[usize], keep_cut: bool) -> Option<BinaryMask> {
    let mut rest = region.clone();
    let mut any = false;
    for &i in cut {
        if rest.get_index(i) {
            rest.set_index(i, false);
            any = true;
        }
    }
    if !any {
        return None;
    }
    let (labels, sizes) = label_components(&rest, Connectivity::Four);
    let keep = sizes
        .iter()
        .enumerate()
        .fold(None::<(usize, usize)>, |acc, (i, &s)| match acc {
            Some((_, best)) if best > s => acc,
            _ => Some((i, s)),
        })?
        .0 as u32
        + 1;
    let mut kept = BinaryMask::from_bits(
        region.width(),
        region.height(),
        labels.iter().map(|&l| l == keep).collect(),
    );
    if keep_cut {
        let w = region.width() as isize;
        let snapshot = kept.clone();
        for &i in cut {
            if !region.get_index(i) {
                continue;
            }
            let (x, y) = ((i as isize) % w, (i as isize) / w);
            if Connectivity::Four
                .offsets()
                .iter()
                .any(|&(dx, dy)| snapshot.get_signed(x + dx, y + dy))
            {
                kept.set_index(i, true);
            }
        }
    }
    Some(kept)
}

fn best_cut(
    region: &BinaryMask,
    area: usize,
    cuts: impl Iterator<Item = Vec<usize>>,
    keep_cut: bool,
) -> Option<BinaryMask> {
    let mut best: Option<(usize, BinaryMask)> = None;
    for cut in cuts {
        if let Some(kept) = apply_cut(region, &cut, keep_cut) {
            let removed = area - kept.count();
            if removed == 0 || kept.is_empty() {
                continue;
            }
            if best.as_ref().is_none_or(|(r, _)| removed < *r) {
                best = Some((removed, kept));
            }
        }
    }
    best.map(|(_, k)| k)
}

fn cut_once(region: &BinaryMask, hull: &BinaryMask, dc: (usize, usize)) -> Option<BinaryMask> {
    let area = region.count();
    let rays = || RAYS.iter().map(|&d| trace_ray(dc, d, hull));
    let lines = || {
        RAYS[..4].iter().map(|&(dx, dy)| {
            let mut l = trace_ray(dc, (dx, dy), hull);
            l.extend(trace_ray(dc, (-dx, -dy), hull));
            l
        })
    };
    best_cut(region, area, rays(), true)
        .or_else(|| best_cut(region, area, lines(), true))
        .or_else(|| best_cut(region, area, rays(), false))
        .or_else(|| {
            // no ray separates anything: shave the region pixels nearest dc
            let (cx, cy) = (dc.0 as isize, dc.1 as isize);
            let mut kept = region.clone();
            let mut removed = 0;
            for y in cy - 1..=cy + 1 {
                for x in cx - 1..=cx + 1 {
                    if region.get_signed(x, y) {
                        kept.set(x as usize, y as usize, false);
                        removed += 1;
                    }
                }
            }
            if removed == 0 {
                let nearest = region.iter_coords().min_by_key(|&(x, y)| {
                    let (dx, dy) = (x as isize - cx, y as isize - cy);
                    dx * dx + dy * dy
                })?;
                kept.set(nearest.0, nearest.1, false);
            }
            (!kept.is_empty()).then_some(kept)
        })
}

/// Runs the cutting loop and returns the final state; `state.region` is the
/// inscribed convex set in the coordinates of the input raster.
pub fn max_inscribed_convex_set_traced(region: &BinaryMask) -> Result<InscribedConvexState> {
    let bb = region.bounding_box().ok_or(Error::EmptyRegion)?;
    // work in a window padded by one pixel so the hull exterior always exists
    let (x0, y0) = (bb.min_x as isize - 1, bb.min_y as isize - 1);
    let (ww, wh) = (bb.width() + 2, bb.height() + 2);
    let mut cur = region.window(x0, y0, ww, wh);
    let (_, sizes) = label_components(&cur, Connectivity::Eight);
    if sizes.len() > 1 {
        return Err(Error::Disconnected);
    }
    let max_iterations = cur.count();
    let mut iteration = 0;
    let analysis = loop {
        let a = analyze(&cur)?;
        let dc = match a.deepest {
            Some(dc) if a.depth > CONVEXITY_DEPTH => dc,
            _ => break a,
        };
        match cut_once(&cur, &a.hull, dc) {
            Some(next) => {
                debug_assert!(next.count() < cur.count());
                cur = next;
            }
            None => break a,
        }
        iteration += 1;
        assert!(iteration <= max_iterations, "inscribed convex set failed to terminate");
    };
    let unwindow = |m: &BinaryMask| {
        let mut full = BinaryMask::new(region.width(), region.height());
        full.paste_window(m, x0, y0);
        full
    };
    Ok(InscribedConvexState {
        region: unwindow(&cur),
        hull: unwindow(&analysis.hull),
        deficiency: unwindow(&analysis.deficiency),
        deepest: analysis
            .deepest
            .map(|(x, y)| ((x as isize + x0) as usize, (y as isize + y0) as usize)),
        depth: analysis.depth,
        iteration,
    })
}

/// Approximately maximal convex subset of a connected region.
pub fn max_inscribed_convex_set(region: &BinaryMask) -> Result<BinaryMask> {
    Ok(max_inscribed_convex_set_traced(region)?.region)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(r: f64, canvas: usize) -> BinaryMask {
        let c = canvas as f64 / 2.0;
        BinaryMask::from_fn(canvas, canvas, |x, y| {
            let (dx, dy) = (x as f64 - c, y as f64 - c);
            dx * dx + dy * dy <= r * r
        })
    }

    fn l_shape() -> BinaryMask {
        BinaryMask::from_fn(14, 14, |x, y| {
            let (x, y) = (x as isize - 2, y as isize - 2);
            (0..10).contains(&x) && (0..10).contains(&y) && !(x >= 5 && y < 5)
        })
    }

    /// Largest axis-aligned rectangle contained in the mask, by exhaustion.
    fn best_rectangle(m: &BinaryMask) -> usize {
        let (w, h) = (m.width(), m.height());
        let mut best = 0;
        for y0 in 0..h {
            for x0 in 0..w {
                for y1 in y0..h {
                    for x1 in x0..w {
                        let area = (x1 - x0 + 1) * (y1 - y0 + 1);
                        if area <= best {
                            continue;
                        }
                        if (y0..=y1).all(|y| (x0..=x1).all(|x| m.get(x, y))) {
                            best = area;
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn disk_is_returned_unchanged() {
        let d = disk(15.0, 40);
        let out = max_inscribed_convex_set(&d).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn single_pixel() {
        let mut m = BinaryMask::new(5, 5);
        m.set(2, 2, true);
        assert_eq!(max_inscribed_convex_set(&m).unwrap(), m);
    }

    #[test]
    fn l_shape_keeps_dominant_rectangle() {
        let l = l_shape();
        let state = max_inscribed_convex_set_traced(&l).unwrap();
        let out = &state.region;
        assert!(out.is_subset_of(&l));
        assert!(state.is_convex());
        assert!(deficiency_depth(out).unwrap().is_convex());
        assert!(out.count() >= 50, "area {}", out.count());
        assert!(out.count() >= best_rectangle(&l));
        assert!(state.iteration >= 1);
    }

    #[test]
    fn l_shape_depth_exceeds_threshold() {
        let s = deficiency_depth(&l_shape()).unwrap();
        assert!(s.depth > CONVEXITY_DEPTH);
        let dc = s.deepest.unwrap();
        assert!(s.deficiency.get(dc.0, dc.1));
        assert!(s.deficiency.intersection_count(&s.region) == 0);
    }

    #[test]
    fn ring_hole_is_cut_open() {
        let ring = BinaryMask::from_fn(30, 30, |x, y| {
            let (dx, dy) = (x as f64 - 15.0, y as f64 - 15.0);
            let r2 = dx * dx + dy * dy;
            (36.0..=144.0).contains(&r2)
        });
        let s = max_inscribed_convex_set_traced(&ring).unwrap();
        assert!(s.region.is_subset_of(&ring));
        assert!(s.is_convex());
        assert!(!s.region.is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(max_inscribed_convex_set(&BinaryMask::new(4, 4)), Err(Error::EmptyRegion)));
        let two = BinaryMask::from_ascii(&["#..#"]);
        assert!(matches!(max_inscribed_convex_set(&two), Err(Error::Disconnected)));
    }
}
