//! Snapshot features of the final network.
//!
//! All structural quantities are computed on the undirected simple graph
//! (self-loops dropped, parallel edges merged). The degree family uses the
//! in-degrees of the directed simple graph.

use crate::engine::GrowthRecord;
use crate::stats::{mean, quantile_sorted, std_dev};

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Vec<Vec<u32>>,
    in_degree: Vec<u32>,
}

impl SimpleGraph {
    /// Builds an undirected graph; the in-degree of a vertex is taken to be
    /// its undirected degree.
    pub fn from_undirected(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u != v {
                adjacency[u as usize].push(v);
                adjacency[v as usize].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let in_degree = adjacency.iter().map(|a| a.len() as u32).collect();
        Self { adjacency, in_degree }
    }

    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// In-degree in the directed simple graph the snapshot came from.
    pub fn in_degrees(&self) -> &[u32] {
        &self.in_degree
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }
}

/// Drops self-edges, merges parallel edges and symmetrizes.
pub fn simplify(record: &GrowthRecord) -> SimpleGraph {
    let n = record.num_vertices();
    let mut directed: Vec<(u32, u32)> = record
        .edges
        .iter()
        .filter(|e| !e.is_self())
        .map(|e| (e.source, e.target))
        .collect();
    directed.sort_unstable();
    directed.dedup();
    let mut g = SimpleGraph::from_undirected(n, &directed);
    let mut in_degree = vec![0u32; n];
    for &(_, t) in &directed {
        in_degree[t as usize] += 1;
    }
    g.in_degree = in_degree;
    g
}

/// A value with a flag marking a degenerate (fallback) computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub degenerate: bool,
}

/// Degree assortativity: Pearson correlation of the endpoint degrees over
/// both orientations of every edge. Zero, flagged, when undefined.
pub fn assortativity(g: &SimpleGraph) -> Flagged {
    let (mut n, mut sx, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for u in 0..g.num_vertices() {
        let du = g.degree(u) as f64;
        for &v in g.neighbors(u) {
            let dv = g.degree(v as usize) as f64;
            n += 1.0;
            sx += du;
            sxx += du * du;
            sxy += du * dv;
        }
    }
    if n == 0.0 {
        return Flagged {
            value: 0.0,
            degenerate: true,
        };
    }
    // both coordinates share the same marginal because each edge is counted twice
    let m = sx / n;
    let var = sxx / n - m * m;
    if var <= 1e-12 * m.max(1.0) * m.max(1.0) {
        return Flagged {
            value: 0.0,
            degenerate: true,
        };
    }
    Flagged {
        value: ((sxy / n - m * m) / var).clamp(-1.0, 1.0),
        degenerate: false,
    }
}

/// Number of triangles through every vertex.
pub fn triangles_per_vertex(g: &SimpleGraph) -> Vec<u64> {
    let n = g.num_vertices();
    // orient each edge from lower to higher (degree, id) rank
    let rank_less = |a: usize, b: usize| (g.degree(a), a) < (g.degree(b), b);
    let forward: Vec<Vec<u32>> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| rank_less(u, v as usize))
                .collect()
        })
        .collect();
    let mut tri = vec![0u64; n];
    for u in 0..n {
        for &v in &forward[u] {
            let (a, b) = (&forward[u], &forward[v as usize]);
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        tri[u] += 1;
                        tri[v as usize] += 1;
                        tri[a[i] as usize] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    tri
}

/// `3 * triangles / connected triples`; 0 without triples.
pub fn transitivity(g: &SimpleGraph) -> f64 {
    transitivity_from(g, &triangles_per_vertex(g))
}

fn transitivity_from(g: &SimpleGraph, tri: &[u64]) -> f64 {
    let closed: u64 = tri.iter().sum(); // = 3 * triangles
    let triples: u64 = (0..g.num_vertices())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

/// Core number of every vertex (bucket-based peeling).
pub fn coreness(g: &SimpleGraph) -> Vec<u32> {
    let n = g.num_vertices();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = *deg.iter().max().unwrap();
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg.into_iter().map(|d| d as u32).collect()
}

/// Fraction of adjacent neighbor pairs; 0 for degree below 2.
pub fn local_clustering(g: &SimpleGraph) -> Vec<f64> {
    local_clustering_from(g, &triangles_per_vertex(g))
}

fn local_clustering_from(g: &SimpleGraph, tri: &[u64]) -> Vec<f64> {
    (0..g.num_vertices())
        .map(|v| {
            let d = g.degree(v) as f64;
            if d < 2.0 {
                0.0
            } else {
                tri[v] as f64 / (d * (d - 1.0) / 2.0)
            }
        })
        .collect()
}

pub const STATIC_FEATURE_COUNT: usize = 36;

/// Version tag of the column order below.
pub const STATIC_SCHEMA_VERSION: u32 = 1;

const DEGREE_Q: [f64; 5] = [0.125, 0.25, 0.5, 0.75, 0.875];
const CORE_Q: [f64; 3] = [0.25, 0.5, 0.75];
const TRIANGLE_Q: [f64; 5] = [0.80, 0.90, 0.95, 0.97, 0.99];
const CLUSTER_Q: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

pub const STATIC_FEATURE_NAMES: [&str; STATIC_FEATURE_COUNT] = [
    "assortativity",
    "transitivity",
    "degree_min",
    "degree_max",
    "degree_mean",
    "degree_std",
    "degree_q0.125",
    "degree_q0.25",
    "degree_q0.5",
    "degree_q0.75",
    "degree_q0.875",
    "coreness_min",
    "coreness_max",
    "coreness_mean",
    "coreness_std",
    "coreness_q0.25",
    "coreness_q0.5",
    "coreness_q0.75",
    "triangles_min",
    "triangles_max",
    "triangles_mean",
    "triangles_std",
    "triangles_q0.8",
    "triangles_q0.9",
    "triangles_q0.95",
    "triangles_q0.97",
    "triangles_q0.99",
    "clustering_min",
    "clustering_max",
    "clustering_mean",
    "clustering_std",
    "clustering_q0.5",
    "clustering_q0.6",
    "clustering_q0.7",
    "clustering_q0.8",
    "clustering_q0.9",
];

#[derive(Debug, Clone, PartialEq)]
pub struct StaticFeatureVector {
    pub values: [f64; STATIC_FEATURE_COUNT],
    /// Set when assortativity fell back to 0.
    pub assortativity_degenerate: bool,
}

impl StaticFeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        STATIC_FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.values[i])
    }
}

fn summarize(out: &mut Vec<f64>, mut xs: Vec<f64>, qs: &[f64]) {
    xs.sort_by(f64::total_cmp);
    out.push(xs.first().copied().unwrap_or(0.0));
    out.push(xs.last().copied().unwrap_or(0.0));
    out.push(mean(&xs));
    out.push(std_dev(&xs));
    out.extend(qs.iter().map(|&q| quantile_sorted(&xs, q)));
}

/// Assembles the 36 features in [`STATIC_FEATURE_NAMES`] order.
pub fn static_vector(g: &SimpleGraph) -> StaticFeatureVector {
    let tri = triangles_per_vertex(g);
    let assort = assortativity(g);
    let mut v = Vec::with_capacity(STATIC_FEATURE_COUNT);
    v.push(assort.value);
    v.push(transitivity_from(g, &tri));
    summarize(&mut v, g.in_degrees().iter().map(|&d| d as f64).collect(), &DEGREE_Q);
    summarize(&mut v, coreness(g).into_iter().map(f64::from).collect(), &CORE_Q);
    summarize(&mut v, tri.iter().map(|&t| t as f64).collect(), &TRIANGLE_Q);
    summarize(&mut v, local_clustering_from(g, &tri), &CLUSTER_Q);
    StaticFeatureVector {
        values: v.try_into().expect("36 static features"),
        assortativity_degenerate: assort.degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32) -> SimpleGraph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        SimpleGraph::from_undirected(n as usize, &e)
    }

    fn path3() -> SimpleGraph {
        SimpleGraph::from_undirected(3, &[(0, 1), (1, 2)])
    }

    #[test]
    fn simplify_drops_loops_and_duplicates() {
        let r = GrowthRecord::from_parts(&[0.0, 1.0], &[(1.0, 1, 0), (2.0, 1, 0), (2.5, 1, 1)], 3.0).unwrap();
        let g = simplify(&r);
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.in_degrees(), &[1, 0]);
        let empty = GrowthRecord::from_parts(&[0.0, 1.0, 2.0], &[], 2.0).unwrap();
        assert_eq!(simplify(&empty).num_edges(), 0);
    }

    #[test]
    fn assortativity_examples() {
        let a = assortativity(&path3());
        assert!((a.value + 1.0).abs() < 1e-12 && !a.degenerate);
        let c4 = SimpleGraph::from_undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(assortativity(&c4), Flagged { value: 0.0, degenerate: true });
        assert!(assortativity(&complete(4)).degenerate);
        assert!(assortativity(&SimpleGraph::from_undirected(3, &[])).degenerate);
    }

    #[test]
    fn transitivity_examples() {
        assert_eq!(transitivity(&complete(3)), 1.0);
        assert_eq!(transitivity(&path3()), 0.0);
        // K4 minus an edge: 2 triangles, triples 3 + 3 + 1 + 1 = 8
        let g = SimpleGraph::from_undirected(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!((transitivity(&g) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn coreness_examples() {
        assert_eq!(coreness(&complete(4)), vec![3; 4]);
        let star = SimpleGraph::from_undirected(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(coreness(&star), vec![1; 6]);
    }

    #[test]
    fn triangle_and_clustering_examples() {
        assert_eq!(triangles_per_vertex(&complete(4)), vec![3; 4]);
        let tree = SimpleGraph::from_undirected(5, &[(0, 1), (0, 2), (1, 3), (1, 4)]);
        assert_eq!(triangles_per_vertex(&tree), vec![0; 5]);
        assert_eq!(local_clustering(&complete(4)), vec![1.0; 4]);
        let star = SimpleGraph::from_undirected(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(local_clustering(&star), vec![0.0; 4]);
    }

    #[test]
    fn complete_graph_vector() {
        let v = static_vector(&complete(4));
        assert_eq!(v.get("transitivity"), Some(1.0));
        for q in ["coreness_q0.25", "coreness_q0.5", "coreness_q0.75"] {
            assert_eq!(v.get(q), Some(3.0));
        }
        for q in ["clustering_q0.5", "clustering_q0.6", "clustering_q0.7", "clustering_q0.8", "clustering_q0.9"] {
            assert_eq!(v.get(q), Some(1.0));
        }
    }

    #[test]
    fn edgeless_vector() {
        let v = static_vector(&SimpleGraph::from_undirected(5, &[]));
        assert!(v.assortativity_degenerate);
        assert!(v.values.iter().all(|&x| x == 0.0));
    }
}
