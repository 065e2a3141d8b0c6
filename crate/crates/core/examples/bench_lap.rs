//! Times the assignment solvers on 2048-pixel color samples.

use rand::{Rng, SeedableRng};
use segcomplex::assignment::{solve, solve_weighted, CostMatrix};
use std::collections::BTreeMap;

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let n = 2048;
    let maxd = 255.0 * 3f64.sqrt();
    for kind in 0..3 {
        let bg: Vec<[u8; 3]> = (0..n)
            .map(|_| match kind {
                0 => [rng.random(), rng.random(), rng.random()],
                1 => {
                    let g = rng.random_range(90..140u8);
                    [g, g + 5, g - 3]
                }
                _ => [0, 0, 0],
            })
            .collect();
        let fg: Vec<[u8; 3]> = (0..n)
            .map(|_| {
                let r = rng.random_range(0..4u8);
                [60 * r + rng.random_range(0..20u8), 200 - 40 * r, rng.random()]
            })
            .collect();
        let dist = |a: [u8; 3], b: [u8; 3]| {
            (0..3).map(|k| (a[k] as f64 - b[k] as f64).powi(2)).sum::<f64>().sqrt()
        };
        let t = std::time::Instant::now();
        let a = solve(&CostMatrix::from_fn(n, n, |i, j| maxd - dist(bg[i], fg[j])));
        println!("kind {kind} dense: {:?} cost {}", t.elapsed(), a.total_cost);

        let t = std::time::Instant::now();
        let group = |v: &[[u8; 3]]| {
            let mut m = BTreeMap::new();
            for &c in v {
                *m.entry(c).or_insert(0usize) += 1;
            }
            m.into_iter().unzip::<_, _, Vec<_>, Vec<_>>()
        };
        let (bc, bn) = group(&bg);
        let (fc, fn_) = group(&fg);
        let w = solve_weighted(&CostMatrix::from_fn(bc.len(), fc.len(), |i, j| maxd - dist(bc[i], fc[j])), &bn, &fn_);
        println!("kind {kind} weighted ({}x{}): {:?} cost {}", bc.len(), fc.len(), t.elapsed(), w.total_cost);
    }
}
