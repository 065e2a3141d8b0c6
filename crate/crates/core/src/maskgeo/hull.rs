use super::BinaryMask;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexHullResult {
    /// Pixels whose centers lie inside or on the hull polygon.
    pub mask: BinaryMask,
    /// Hull vertices in positive orientation, collinear points dropped.
    pub vertices: Vec<(i64, i64)>,
}

#[inline]
fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Hull vertices of a set of lattice points (Andrew's monotone chain).
pub(crate) fn hull_vertices(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

/// Rasterizes a convex polygon (positive orientation) onto a `width`×`height`
/// grid: a pixel is set iff its center is inside or on the boundary.
pub(crate) fn rasterize_convex(vertices: &[(i64, i64)], width: usize, height: usize) -> BinaryMask {
    let mut out = BinaryMask::new(width, height);
    if vertices.is_empty() {
        return out;
    }
    let min_x = vertices.iter().map(|v| v.0).min().unwrap().max(0);
    let max_x = vertices.iter().map(|v| v.0).max().unwrap().min(width as i64 - 1);
    let min_y = vertices.iter().map(|v| v.1).min().unwrap().max(0);
    let max_y = vertices.iter().map(|v| v.1).max().unwrap().min(height as i64 - 1);
    let n = vertices.len();
    for py in min_y..=max_y {
        let mut lo = min_x;
        let mut hi = max_x;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let dx = b.0 - a.0;
            let dy = b.1 - a.1;
            // dx*(py-ay) - dy*(px-ax) >= 0  <=>  dy*px <= dx*(py-ay) + dy*ax
            let r = dx * (py - a.1) + dy * a.0;
            if dy > 0 {
                hi = hi.min(floor_div(r, dy));
            } else if dy < 0 {
                lo = lo.max(ceil_div(r, dy));
            } else if dx * (py - a.1) < 0 {
                hi = lo - 1;
            }
            if lo > hi {
                break;
            }
        }
        for px in lo..=hi {
            out.set(px as usize, py as usize, true);
        }
    }
    out
}

/// Smallest convex polygon over the set pixel centers, rasterized.
pub fn convex_hull(mask: &BinaryMask) -> Result<ConvexHullResult> {
    let mut pts = Vec::new();
    for y in 0..mask.height() {
        let row = &mask.bits()[y * mask.width()..(y + 1) * mask.width()];
        if let Some(first) = row.iter().position(|&b| b) {
            let last = row.iter().rposition(|&b| b).unwrap();
            pts.push((first as i64, y as i64));
            if last != first {
                pts.push((last as i64, y as i64));
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::EmptyMask);
    }
    let vertices = hull_vertices(pts);
    let hull = rasterize_convex(&vertices, mask.width(), mask.height());
    Ok(ConvexHullResult {
        mask: hull,
        vertices,
    })
}
