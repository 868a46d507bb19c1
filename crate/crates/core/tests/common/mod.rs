//! Independent oracles shared by the integration tests and the acceptance
//! runner. Everything here is written for clarity, not speed.

#![allow(dead_code)]

use ctbp_select::engine::GrowthRecord;
use ctbp_select::model::AgingSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random simple undirected graph on `n` vertices with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn adjacency_matrix(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in edges {
        if u != v {
            a[u as usize][v as usize] = true;
            a[v as usize][u as usize] = true;
        }
    }
    a
}

pub fn brute_degrees(a: &[Vec<bool>]) -> Vec<usize> {
    a.iter().map(|row| row.iter().filter(|&&x| x).count()).collect()
}

/// Triangles through each vertex by checking every vertex triple.
pub fn brute_triangles(a: &[Vec<bool>]) -> Vec<u64> {
    let n = a.len();
    let mut t = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if a[i][j] && a[j][k] && a[i][k] {
                    t[i] += 1;
                    t[j] += 1;
                    t[k] += 1;
                }
            }
        }
    }
    t
}

/// Largest `k` such that the vertex survives repeated removal of vertices of
/// degree below `k`.
pub fn brute_coreness(a: &[Vec<bool>]) -> Vec<u32> {
    let n = a.len();
    let mut core = vec![0u32; n];
    for k in 1..n as u32 {
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if alive[v] {
                    let d = (0..n).filter(|&w| alive[w] && a[v][w]).count() as u32;
                    if d < k {
                        alive[v] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

/// Fraction of neighbor pairs that are adjacent; 0 below degree 2.
pub fn brute_local_clustering(a: &[Vec<bool>]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|v| {
            let nb: Vec<usize> = (0..n).filter(|&w| a[v][w]).collect();
            if nb.len() < 2 {
                return 0.0;
            }
            let mut linked = 0;
            let mut pairs = 0;
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    pairs += 1;
                    if a[nb[i]][nb[j]] {
                        linked += 1;
                    }
                }
            }
            linked as f64 / pairs as f64
        })
        .collect()
}

/// Closed ordered paths of length two over all ordered paths of length two.
pub fn brute_transitivity(a: &[Vec<bool>]) -> f64 {
    let n = a.len();
    let (mut closed, mut paths) = (0u64, 0u64);
    for m in 0..n {
        for u in 0..n {
            for w in 0..n {
                if u != w && a[m][u] && a[m][w] {
                    paths += 1;
                    if a[u][w] {
                        closed += 1;
                    }
                }
            }
        }
    }
    if paths == 0 {
        0.0
    } else {
        closed as f64 / paths as f64
    }
}

/// Pearson correlation of `(deg u, deg v)` over both orientations of each
/// edge, `None` when undefined.
pub fn brute_assortativity(a: &[Vec<bool>]) -> Option<f64> {
    let deg = brute_degrees(a);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for u in 0..a.len() {
        for v in 0..a.len() {
            if a[u][v] {
                xs.push(deg[u] as f64);
                ys.push(deg[v] as f64);
            }
        }
    }
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if vx < 1e-12 || vy < 1e-12 {
        None
    } else {
        Some(cov / (vx * vy).sqrt())
    }
}

/// The four-vertex instance with a hand-enumerated matrix: births at
/// 0, 1, 2, 3, edges B->A@1, C->A@2, D->B@3, D->A@3, observed until 4.
pub fn hand_record() -> GrowthRecord {
    GrowthRecord::from_parts(
        &[0.0, 1.0, 2.0, 3.0],
        &[(1.0, 1, 0), (2.0, 2, 0), (3.0, 3, 1), (3.0, 3, 0)],
        4.0,
    )
    .unwrap()
}

/// Expected 2x2 time-cohort matrix of [`hand_record`], row major.
pub const HAND_DFM: [f64; 4] = [0.5, 0.0, 0.5, 0.0];

/// Adaptive Simpson integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64, m: f64, fm: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Integrated intensity `rate * int_now^t h(s - birth) ds` by quadrature,
/// split on a geometric grid so that the lognormal peak is resolved.
pub fn intensity_by_quadrature(aging: &AgingSpec, rate: f64, birth: f64, now: f64, t: f64) -> f64 {
    let (lo, hi) = (now - birth, t - birth);
    if hi <= lo {
        return 0.0;
    }
    let h = |x: f64| aging.density(x);
    let mut knots = vec![lo];
    let mut x = lo.max(1e-8);
    while x * 1.25 < hi {
        x *= 1.25;
        if x > lo {
            knots.push(x);
        }
    }
    knots.push(hi);
    let total: f64 = knots.windows(2).map(|w| integrate(&h, w[0], w[1], 1e-14)).sum();
    rate * total
}

/// Central finite difference of `f` at `x` in coordinate `i`.
pub fn finite_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], i: usize, eps: f64) -> f64 {
    let mut up = x.to_vec();
    let mut down = x.to_vec();
    up[i] += eps;
    down[i] -= eps;
    (f(&up) - f(&down)) / (2.0 * eps)
}
