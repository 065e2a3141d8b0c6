use super::BinaryMask;

const NEIGHBORS8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Strips `width` layers of boundary pixels. A pixel is on the boundary when
/// one of its in-raster 8-neighbours is unset; the raster edge itself does not
/// erode, so masks touching the image border keep their border pixels.
pub fn erode_boundary(mask: &BinaryMask, width: usize) -> BinaryMask {
    let mut cur = mask.clone();
    for _ in 0..width {
        let prev = cur.clone();
        let (w, h) = (prev.width() as isize, prev.height() as isize);
        for (x, y) in prev.iter_coords() {
            let (xi, yi) = (x as isize, y as isize);
            let touches = NEIGHBORS8.iter().any(|&(dx, dy)| {
                let (nx, ny) = (xi + dx, yi + dy);
                nx >= 0 && ny >= 0 && nx < w && ny < h && !prev.get(nx as usize, ny as usize)
            });
            if touches {
                cur.set(x, y, false);
            }
        }
        if cur.is_empty() {
            break;
        }
    }
    cur
}

/// Set pixels with at least one unset 8-neighbour; pixels outside the raster
/// count as unset here.
pub fn boundary_pixels(mask: &BinaryMask) -> BinaryMask {
    let mut out = BinaryMask::new(mask.width(), mask.height());
    for (x, y) in mask.iter_coords() {
        let (xi, yi) = (x as isize, y as isize);
        if NEIGHBORS8.iter().any(|&(dx, dy)| !mask.get_signed(xi + dx, yi + dy)) {
            out.set(x, y, true);
        }
    }
    out
}
