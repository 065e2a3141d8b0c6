//! Linear assignment by shortest augmenting paths (Jonker–Volgenant).
//!
//! Rectangular problems are padded to square with zero-cost dummy rows or
//! columns, so exactly `min(rows, cols)` real pairs are formed.
//!
//! Large instances get their column prices from a coarse epsilon-scaling
//! auction before the augmentation phase. Any prices are valid starting duals
//! for the augmentation, so the result stays exactly optimal; good prices just
//! make the shortest-path searches short.
//!
//! [`solve_weighted`] handles multisets (identical rows or columns with
//! multiplicities), which the square solvers handle badly: when one side has
//! few distinct entries it runs successive shortest paths over that side's
//! groups instead.

/// Row-major dense cost matrix.
#[derive(Debug, Clone)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "cost matrix must be rows*cols");
        assert!(data.iter().all(|c| c.is_finite()), "costs must be finite");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

/// Minimum-cost assignment of `min(rows, cols)` pairs.
pub fn solve(cost: &CostMatrix) -> Assignment {
    let n = cost.rows.max(cost.cols);
    if cost.rows == 0 || cost.cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            total_cost: 0.0,
        };
    }
    let padded;
    let square: &[f64] = if cost.rows == cost.cols {
        &cost.data
    } else {
        let mut d = vec![0.0; n * n];
        for i in 0..cost.rows {
            d[i * n..i * n + cost.cols].copy_from_slice(&cost.data[i * cost.cols..(i + 1) * cost.cols]);
        }
        padded = d;
        &padded
    };
    let row_sol = if n <= WARM_START_MIN {
        lapjv(square, n)
    } else {
        lapjv_warm(square, n, auction_prices(square, n))
    };
    let mut pairs = Vec::with_capacity(cost.rows.min(cost.cols));
    let mut total = 0.0;
    for (i, &j) in row_sol.iter().enumerate().take(cost.rows) {
        if j < cost.cols {
            pairs.push((i, j));
            total += cost.get(i, j);
        }
    }
    Assignment {
        pairs,
        total_cost: total,
    }
}

/// Pairing of two multisets: `(row, col, count)` triples sorted by row, col.
#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    pub flows: Vec<(usize, usize, usize)>,
    pub total_cost: f64,
}

/// Minimum-cost pairing where row `i` stands for `row_counts[i]` identical
/// rows and column `j` for `col_counts[j]` identical columns. Forms
/// `min(sum(row_counts), sum(col_counts))` pairs.
pub fn solve_weighted(cost: &CostMatrix, row_counts: &[usize], col_counts: &[usize]) -> Transport {
    assert_eq!(row_counts.len(), cost.rows());
    assert_eq!(col_counts.len(), cost.cols());
    let rows: Vec<usize> = (0..cost.rows()).filter(|&i| row_counts[i] > 0).collect();
    let cols: Vec<usize> = (0..cost.cols()).filter(|&j| col_counts[j] > 0).collect();
    let mut flows: Vec<(usize, usize, usize)> = if rows.is_empty() || cols.is_empty() {
        Vec::new()
    } else if rows.len().min(cols.len()) <= GROUP_LIMIT {
        if rows.len() <= cols.len() {
            semi_assignment(&rows, &cols, row_counts, col_counts, |g, u| cost.get(g, u))
        } else {
            semi_assignment(&cols, &rows, col_counts, row_counts, |g, u| cost.get(u, g))
                .into_iter()
                .map(|(j, i, k)| (i, j, k))
                .collect()
        }
    } else {
        let expand = |ids: &[usize], counts: &[usize]| -> Vec<usize> {
            ids.iter().flat_map(|&i| std::iter::repeat_n(i, counts[i])).collect()
        };
        let er = expand(&rows, row_counts);
        let ec = expand(&cols, col_counts);
        let a = solve(&CostMatrix::from_fn(er.len(), ec.len(), |i, j| cost.get(er[i], ec[j])));
        let mut acc = std::collections::BTreeMap::new();
        for (i, j) in a.pairs {
            *acc.entry((er[i], ec[j])).or_insert(0) += 1;
        }
        acc.into_iter().map(|((i, j), k)| (i, j, k)).collect()
    };
    flows.sort_unstable();
    let total_cost = flows.iter().map(|&(i, j, k)| cost.get(i, j) * k as f64).sum();
    Transport { flows, total_cost }
}

/// Successive shortest paths with the `groups` side as capacitated nodes and
/// the units of each type on the other side inserted as a batch. Shortest paths
/// run over the groups only: moving a unit from group `a` to group `b` costs
/// `min over unit types t held by a of cost(b, t) - cost(a, t)`, and each
/// augmentation pushes as many units as the path allows. Returns
/// `(group, unit type, count)`.
fn semi_assignment(
    groups: &[usize],
    unit_types: &[usize],
    group_counts: &[usize],
    unit_counts: &[usize],
    cost: impl Fn(usize, usize) -> f64,
) -> Vec<(usize, usize, usize)> {
    let capacity: usize = groups.iter().map(|&g| group_counts[g]).sum();
    let demand: usize = unit_types.iter().map(|&t| unit_counts[t]).sum();
    let mut cap: Vec<usize> = groups.iter().map(|&g| group_counts[g]).collect();
    // a zero-cost overflow group absorbs the units that cannot be paired
    if demand > capacity {
        cap.push(demand - capacity);
    }
    let m = cap.len();
    let nt = unit_types.len();
    let table: Vec<f64> = (0..m)
        .flat_map(|g| {
            let cost = &cost;
            (0..nt).map(move |t| if g < groups.len() { cost(groups[g], unit_types[t]) } else { 0.0 })
        })
        .collect();
    let c = |g: usize, t: usize| table[g * nt + t];

    // held[g]: (unit type, count) pairs, load[g]: total units in g
    let mut held: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    let mut load = vec![0usize; m];
    let mut exchange = vec![f64::INFINITY; m * m];
    let mut via = vec![NONE; m * m];
    let mut pi = vec![0.0f64; m];
    let mut dist = vec![0.0f64; m];
    let mut pred = vec![NONE; m];
    let mut done = vec![false; m];
    let mut path = Vec::new();

    // by_type[t * m + g] = c(g, t), so refresh scans contiguous rows
    let by_type: Vec<f64> = (0..nt * m).map(|i| table[(i % m) * nt + i / m]).collect();
    let refresh = |g: usize, held: &[Vec<(usize, usize)>], exchange: &mut [f64], via: &mut [usize]| {
        let best = &mut exchange[g * m..(g + 1) * m];
        let arg = &mut via[g * m..(g + 1) * m];
        best.fill(f64::INFINITY);
        arg.fill(NONE);
        for &(t, _) in &held[g] {
            let base = c(g, t);
            let row = &by_type[t * m..(t + 1) * m];
            for h in 0..m {
                let w = row[h] - base;
                if w < best[h] || (w == best[h] && t < arg[h]) {
                    best[h] = w;
                    arg[h] = t;
                }
            }
        }
        best[g] = f64::INFINITY;
        arg[g] = NONE;
    };
    let add = |held: &mut Vec<(usize, usize)>, t: usize, k: isize| {
        let pos = held.iter().position(|e| e.0 == t);
        match pos {
            Some(p) => {
                let n = held[p].1 as isize + k;
                if n == 0 {
                    held.swap_remove(p);
                } else {
                    held[p].1 = n as usize;
                }
            }
            None => held.push((t, k as usize)),
        }
    };

    for t in 0..nt {
        let mut remaining = unit_counts[unit_types[t]];
        while remaining > 0 {
            for g in 0..m {
                dist[g] = c(g, t) - pi[g];
                pred[g] = NONE;
                done[g] = false;
            }
            // Dijkstra until the nearest group with spare capacity is settled
            let mut target = NONE;
            let mut a = (0..m).fold(NONE, |a, g| if a == NONE || dist[g] < dist[a] { g } else { a });
            while a != NONE {
                done[a] = true;
                if load[a] < cap[a] {
                    target = a;
                    break;
                }
                let base = dist[a] + pi[a];
                let row = &exchange[a * m..(a + 1) * m];
                let mut next = NONE;
                for b in 0..m {
                    if done[b] {
                        continue;
                    }
                    let nd = base + row[b] - pi[b];
                    if nd < dist[b] {
                        dist[b] = nd;
                        pred[b] = a;
                    }
                    if next == NONE || dist[b] < dist[next] {
                        next = b;
                    }
                }
                a = next;
            }
            assert!(target != NONE, "total capacity covers every unit");
            // unsettled groups are capped at the target distance, which keeps
            // every reduced cost non-negative
            let reach = dist[target];
            for g in 0..m {
                dist[g] = dist[g].min(reach) + pi[g];
            }
            path.clear();
            let mut g = target;
            while g != NONE {
                path.push(g);
                g = pred[g];
            }
            path.reverse();
            let mut push = remaining.min(cap[target] - load[target]);
            for w in path.windows(2) {
                let moved = via[w[0] * m + w[1]];
                let have = held[w[0]].iter().find(|e| e.0 == moved).expect("type in group").1;
                push = push.min(have);
            }
            for w in path.windows(2) {
                let moved = via[w[0] * m + w[1]];
                add(&mut held[w[0]], moved, -(push as isize));
                add(&mut held[w[1]], moved, push as isize);
            }
            add(&mut held[path[0]], t, push as isize);
            load[path[0]] += push;
            if path.len() > 1 {
                load[path[0]] -= push;
                load[target] += push;
            }
            remaining -= push;
            for &g in &path {
                refresh(g, &held, &mut exchange, &mut via);
            }
            pi.copy_from_slice(&dist);
        }
    }

    let mut acc = std::collections::BTreeMap::new();
    for (g, hs) in held.iter().enumerate().take(groups.len()) {
        for &(t, k) in hs {
            *acc.entry((groups[g], unit_types[t])).or_insert(0) += k;
        }
    }
    acc.into_iter().map(|((g, t), k)| (g, t, k)).collect()
}

const NONE: usize = usize::MAX;
const GROUP_LIMIT: usize = 512;
const WARM_START_MIN: usize = 64;
const AUCTION_FINAL_EPS: f32 = 1e-4;

/// Square dense LAPJV; returns the column assigned to each row.
fn lapjv(c: &[f64], n: usize) -> Vec<usize> {
    if n == 1 {
        return vec![0];
    }
    let cost = |i: usize, j: usize| c[i * n + j];
    let mut row_sol = vec![NONE; n];
    let mut col_sol = vec![NONE; n];
    let mut v = vec![0.0f64; n];
    let mut matches = vec![0u32; n];

    // column reduction, scanning columns in reverse
    for j in (0..n).rev() {
        let mut min = cost(0, j);
        let mut imin = 0;
        for i in 1..n {
            let h = cost(i, j);
            if h < min {
                min = h;
                imin = i;
            }
        }
        v[j] = min;
        matches[imin] += 1;
        if matches[imin] == 1 {
            row_sol[imin] = j;
            col_sol[j] = imin;
        }
    }

    // reduction transfer
    let mut free: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        match matches[i] {
            0 => free.push(i),
            1 => {
                let j1 = row_sol[i];
                let row = &c[i * n..(i + 1) * n];
                let mut min = f64::INFINITY;
                for (j, (&cij, &vj)) in row.iter().zip(&v).enumerate() {
                    if j != j1 && cij - vj < min {
                        min = cij - vj;
                    }
                }
                if min.is_finite() {
                    v[j1] -= min;
                }
            }
            _ => {}
        }
    }

    // augmenting row reduction, two passes
    for _ in 0..2 {
        let prev_free = std::mem::take(&mut free);
        let mut queue: std::collections::VecDeque<usize> = prev_free.into();
        // bound the number of re-queues per pass; leftovers are handled by
        // the augmentation phase, which is exact
        let mut budget = 4 * n + 16;
        while let Some(i) = queue.pop_front() {
            let row = &c[i * n..(i + 1) * n];
            let mut umin = row[0] - v[0];
            let mut j1 = 0;
            let mut usubmin = f64::INFINITY;
            let mut j2 = NONE;
            for j in 1..n {
                let h = row[j] - v[j];
                if h < usubmin {
                    if h >= umin {
                        usubmin = h;
                        j2 = j;
                    } else {
                        usubmin = umin;
                        umin = h;
                        j2 = j1;
                        j1 = j;
                    }
                }
            }
            let mut i0 = col_sol[j1];
            let strict = umin < usubmin;
            if strict {
                v[j1] -= usubmin - umin;
            } else if i0 != NONE && j2 != NONE {
                j1 = j2;
                i0 = col_sol[j2];
            }
            if i0 != NONE && row_sol[i0] == j1 {
                row_sol[i0] = NONE;
            }
            row_sol[i] = j1;
            col_sol[j1] = i;
            if i0 != NONE {
                if strict && budget > 0 {
                    budget -= 1;
                    queue.push_front(i0);
                } else {
                    free.push(i0);
                }
            }
        }
    }

    augment(c, n, &mut v, &mut row_sol, &mut col_sol, &free);
    row_sol
}

/// Augmentation from prices `v` alone: rows take their cheapest reduced column
/// when it is still free, the rest go through the shortest-path phase.
fn lapjv_warm(c: &[f64], n: usize, mut v: Vec<f64>) -> Vec<usize> {
    let mut row_sol = vec![NONE; n];
    let mut col_sol = vec![NONE; n];
    let mut free = Vec::new();
    for i in 0..n {
        let row = &c[i * n..(i + 1) * n];
        let mut best = 0;
        let mut min = row[0] - v[0];
        for j in 1..n {
            let h = row[j] - v[j];
            if h < min {
                min = h;
                best = j;
            }
        }
        if col_sol[best] == NONE {
            col_sol[best] = i;
            row_sol[i] = best;
        } else {
            free.push(i);
        }
    }
    augment(c, n, &mut v, &mut row_sol, &mut col_sol, &free);
    row_sol
}

/// Column prices from a Gauss–Seidel auction with epsilon scaling, stopped at
/// `range * AUCTION_FINAL_EPS`. Runs in single precision: the prices only
/// seed the exact augmentation phase.
fn auction_prices(c: &[f64], n: usize) -> Vec<f64> {
    let (lo, hi) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let range = (hi - lo) as f32;
    let mut price = vec![0.0f32; n];
    if !(range > 0.0) {
        return vec![0.0; n];
    }
    let c32: Vec<f32> = c.iter().map(|&x| (x - lo) as f32).collect();
    let eps_final = range * AUCTION_FINAL_EPS;
    let mut eps = range / 4.0;
    let mut owner = vec![NONE; n];
    let mut queue: Vec<usize> = Vec::with_capacity(n);
    loop {
        owner.fill(NONE);
        queue.clear();
        queue.extend((0..n).rev());
        while let Some(i) = queue.pop() {
            let row = &c32[i * n..(i + 1) * n];
            let (w1, w2) = two_smallest(row, &price);
            let j1 = row
                .iter()
                .zip(&price)
                .position(|(&cij, &pj)| cij + pj == w1)
                .expect("minimum is attained");
            price[j1] += (w2 - w1) + eps;
            let prev = std::mem::replace(&mut owner[j1], i);
            if prev != NONE {
                queue.push(prev);
            }
        }
        if eps <= eps_final {
            break;
        }
        eps = (eps / 4.0).max(eps_final);
    }
    price.iter().map(|&p| -(p as f64)).collect()
}

/// Smallest and second smallest of `row[j] + price[j]`.
fn two_smallest(row: &[f32], price: &[f32]) -> (f32, f32) {
    const L: usize = 8;
    let mut a1 = [f32::INFINITY; L];
    let mut a2 = [f32::INFINITY; L];
    let mut rc = row.chunks_exact(L);
    let mut pc = price.chunks_exact(L);
    for (r, p) in (&mut rc).zip(&mut pc) {
        for k in 0..L {
            let x = r[k] + p[k];
            a2[k] = a2[k].min(a1[k].max(x));
            a1[k] = a1[k].min(x);
        }
    }
    let (mut w1, mut w2) = (f32::INFINITY, f32::INFINITY);
    let tail = rc.remainder().iter().zip(pc.remainder()).map(|(r, p)| r + p);
    for x in a1.iter().copied().chain(tail) {
        w2 = w2.min(w1.max(x));
        w1 = w1.min(x);
    }
    for x in a2 {
        w2 = w2.min(x);
    }
    (w1, w2)
}

/// Shortest augmenting paths from each free row; `v` must make every assigned
/// column a minimum of its row's reduced costs.
fn augment(c: &[f64], n: usize, v: &mut [f64], row_sol: &mut [usize], col_sol: &mut [usize], free: &[usize]) {
    let cost = |i: usize, j: usize| c[i * n + j];
    let mut d = vec![0.0f64; n];
    let mut pred = vec![0usize; n];
    let mut collist: Vec<usize> = (0..n).collect();
    for &freerow in free {
        for j in 0..n {
            d[j] = cost(freerow, j) - v[j];
            pred[j] = freerow;
            collist[j] = j;
        }
        let mut low = 0;
        let mut up = 0;
        let mut last = 0;
        let mut min = 0.0;
        let endofpath;
        'search: loop {
            if up == low {
                last = low;
                min = d[collist[up]];
                up += 1;
                for k in up..n {
                    let j = collist[k];
                    let h = d[j];
                    if h <= min {
                        if h < min {
                            up = low;
                            min = h;
                        }
                        collist[k] = collist[up];
                        collist[up] = j;
                        up += 1;
                    }
                }
                for &j in &collist[low..up] {
                    if col_sol[j] == NONE {
                        endofpath = j;
                        break 'search;
                    }
                }
            }
            let j1 = collist[low];
            low += 1;
            let i = col_sol[j1];
            let h = cost(i, j1) - v[j1] - min;
            let row = &c[i * n..(i + 1) * n];
            let mut k = up;
            while k < n {
                let j = collist[k];
                let v2 = row[j] - v[j] - h;
                if v2 < d[j] {
                    pred[j] = i;
                    if v2 == min {
                        if col_sol[j] == NONE {
                            endofpath = j;
                            break 'search;
                        }
                        collist[k] = collist[up];
                        collist[up] = j;
                        up += 1;
                    }
                    d[j] = v2;
                }
                k += 1;
            }
        }
        // price update for scanned columns
        for &j1 in &collist[..last] {
            v[j1] += d[j1] - min;
        }
        let mut j = endofpath;
        loop {
            let i = pred[j];
            col_sol[j] = i;
            let next = row_sol[i];
            row_sol[i] = j;
            j = next;
            if i == freerow {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(cost: &CostMatrix) -> f64 {
        let (r, c) = (cost.rows(), cost.cols());
        let (small, large, transposed) = if r <= c { (r, c, false) } else { (c, r, true) };
        let mut best = f64::INFINITY;
        let mut used = vec![false; large];
        fn rec(
            k: usize,
            small: usize,
            large: usize,
            used: &mut [bool],
            acc: f64,
            best: &mut f64,
            f: &dyn Fn(usize, usize) -> f64,
        ) {
            if k == small {
                *best = best.min(acc);
                return;
            }
            for j in 0..large {
                if !used[j] {
                    used[j] = true;
                    rec(k + 1, small, large, used, acc + f(k, j), best, f);
                    used[j] = false;
                }
            }
        }
        let f = |a: usize, b: usize| if transposed { cost.get(b, a) } else { cost.get(a, b) };
        rec(0, small, large, &mut used, 0.0, &mut best, &f);
        if small == 0 {
            0.0
        } else {
            best
        }
    }

    #[test]
    fn small_square() {
        let c = CostMatrix::new(3, 3, vec![4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0]);
        let a = solve(&c);
        assert_eq!(a.total_cost, 5.0);
        assert_eq!(a.pairs.len(), 3);
    }

    #[test]
    fn rectangular_forms_min_pairs() {
        let c = CostMatrix::new(2, 4, vec![5.0, 1.0, 9.0, 9.0, 1.0, 5.0, 9.0, 9.0]);
        let a = solve(&c);
        assert_eq!(a.pairs, vec![(0, 1), (1, 0)]);
        let t = CostMatrix::from_fn(4, 2, |i, j| c.get(j, i));
        assert_eq!(solve(&t).total_cost, 2.0);
    }

    #[test]
    fn matches_brute_force_on_random_and_tied_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..400 {
            let r = rng.random_range(1..=6);
            let c = rng.random_range(1..=6);
            let cost = if trial % 2 == 0 {
                CostMatrix::from_fn(r, c, |_, _| rng.random_range(0.0..10.0))
            } else {
                CostMatrix::from_fn(r, c, |_, _| rng.random_range(0..3) as f64)
            };
            let a = solve(&cost);
            assert_eq!(a.pairs.len(), r.min(c));
            let mut rows: Vec<_> = a.pairs.iter().map(|p| p.0).collect();
            let mut cols: Vec<_> = a.pairs.iter().map(|p| p.1).collect();
            rows.dedup();
            cols.sort_unstable();
            cols.dedup();
            assert_eq!(rows.len(), r.min(c));
            assert_eq!(cols.len(), r.min(c));
            let bf = brute_force(&cost);
            assert!((a.total_cost - bf).abs() <= 1e-12, "trial {trial}: {} vs {bf}", a.total_cost);
        }
    }

    fn expanded_optimum(cost: &CostMatrix, rc: &[usize], cc: &[usize]) -> f64 {
        let er: Vec<usize> = (0..rc.len()).flat_map(|i| std::iter::repeat_n(i, rc[i])).collect();
        let ec: Vec<usize> = (0..cc.len()).flat_map(|j| std::iter::repeat_n(j, cc[j])).collect();
        let m = CostMatrix::from_fn(er.len(), ec.len(), |i, j| cost.get(er[i], ec[j]));
        if er.len().max(ec.len()) <= 7 {
            brute_force(&m)
        } else {
            solve(&m).total_cost
        }
    }

    #[test]
    fn weighted_matches_expanded_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..300 {
            let r = rng.random_range(1..=5);
            let c = rng.random_range(1..=5);
            let hi = if trial < 150 { 3 } else { 12 };
            let rc: Vec<usize> = (0..r).map(|_| rng.random_range(0..hi)).collect();
            let cc: Vec<usize> = (0..c).map(|_| rng.random_range(0..hi)).collect();
            let cost = if trial % 2 == 0 {
                CostMatrix::from_fn(r, c, |_, _| rng.random_range(0.0..10.0))
            } else {
                CostMatrix::from_fn(r, c, |_, _| rng.random_range(0..3) as f64)
            };
            let t = solve_weighted(&cost, &rc, &cc);
            let pairs: usize = t.flows.iter().map(|f| f.2).sum();
            assert_eq!(pairs, rc.iter().sum::<usize>().min(cc.iter().sum()));
            for i in 0..r {
                assert!(t.flows.iter().filter(|f| f.0 == i).map(|f| f.2).sum::<usize>() <= rc[i]);
            }
            for j in 0..c {
                assert!(t.flows.iter().filter(|f| f.1 == j).map(|f| f.2).sum::<usize>() <= cc[j]);
            }
            let want = expanded_optimum(&cost, &rc, &cc);
            assert!((t.total_cost - want).abs() <= 1e-9, "trial {trial}: {} vs {want}", t.total_cost);
        }
    }

    #[test]
    fn warm_started_solver_matches_plain_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..12 {
            let n = rng.random_range(65..160);
            let c: Vec<f64> = match trial % 3 {
                0 => (0..n * n).map(|_| rng.random_range(0.0..100.0)).collect(),
                1 => (0..n * n).map(|_| rng.random_range(0..3) as f64).collect(),
                _ => {
                    let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..255.0)).collect();
                    let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..255.0)).collect();
                    (0..n * n).map(|x| 300.0 - (a[x / n] - b[x % n]).abs()).collect()
                }
            };
            let total = |sol: &[usize]| sol.iter().enumerate().map(|(i, &j)| c[i * n + j]).sum::<f64>();
            let warm = lapjv_warm(&c, n, auction_prices(&c, n));
            let mut seen = warm.clone();
            seen.sort_unstable();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
            assert!((total(&lapjv(&c, n)) - total(&warm)).abs() <= 1e-9, "trial {trial}");
        }
    }

    #[test]
    fn large_instance_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200;
        let cost = CostMatrix::from_fn(n, n, |_, _| rng.random_range(0..50) as f64);
        let a = solve(&cost);
        assert_eq!(a.pairs.len(), n);
        // dual feasibility is implicit; compare against a greedy upper bound
        let greedy: f64 = {
            let mut used = vec![false; n];
            (0..n)
                .map(|i| {
                    let j = (0..n).filter(|&j| !used[j]).min_by(|&a, &b| cost.get(i, a).total_cmp(&cost.get(i, b))).unwrap();
                    used[j] = true;
                    cost.get(i, j)
                })
                .sum()
        };
        assert!(a.total_cost <= greedy);
    }
}
