//! Small raster filters shared by the factor computations.

/// Sobel gradient magnitude `sqrt(gx^2 + gy^2)` of a single-channel raster,
/// with replicated borders.
pub fn sobel_magnitude(gray: &[u8], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(gray.len(), width * height);
    let at = |x: isize, y: isize| -> i32 {
        let xc = x.clamp(0, width as isize - 1) as usize;
        let yc = y.clamp(0, height as isize - 1) as usize;
        gray[yc * width + xc] as i32
    };
    let mut out = vec![0.0; width * height];
    for y in 0..height as isize {
        for x in 0..width as isize {
            let gx = (at(x + 1, y - 1) + 2 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2 * at(x - 1, y) + at(x - 1, y + 1));
            let gy = (at(x - 1, y + 1) + 2 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2 * at(x, y - 1) + at(x + 1, y - 1));
            out[y as usize * width + x as usize] = ((gx * gx + gy * gy) as f64).sqrt();
        }
    }
    out
}

/// Shannon entropy (bits) of the in-raster 3×3 neighbourhood around `(x, y)`.
pub fn local_entropy<T: Copy + Ord>(values: &[T], width: usize, height: usize, x: usize, y: usize) -> f64 {
    local_entropy_where(values, width, height, x, y, |_| true)
}

/// Like [`local_entropy`], counting only neighbours whose index passes `keep`.
/// Returns 0 when no neighbour passes.
pub fn local_entropy_where<T: Copy + Ord>(
    values: &[T],
    width: usize,
    height: usize,
    x: usize,
    y: usize,
    keep: impl Fn(usize) -> bool,
) -> f64 {
    let mut window = [values[0]; 9];
    let mut n = 0;
    for ny in y.saturating_sub(1)..=(y + 1).min(height - 1) {
        for nx in x.saturating_sub(1)..=(x + 1).min(width - 1) {
            let i = ny * width + nx;
            if keep(i) {
                window[n] = values[i];
                n += 1;
            }
        }
    }
    let window = &mut window[..n];
    window.sort_unstable();
    let mut h = 0.0;
    let mut run = 1;
    for i in 1..=n {
        if i < n && window[i] == window[i - 1] {
            run += 1;
        } else {
            let p = run as f64 / n as f64;
            h -= p * p.log2();
            run = 1;
        }
    }
    // -0.0 for a single run
    h.max(0.0)
}
