use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    /// `None` for leaves.
    pub feature_index: Option<u32>,
    pub threshold: f64,
    pub left: Option<u32>,
    pub right: Option<u32>,
    pub leaf_value: f64,
}

impl TreeNode {
    fn leaf(value: f64) -> Self {
        Self {
            feature_index: None,
            threshold: 0.0,
            left: None,
            right: None,
            leaf_value: value,
        }
    }
}

/// Regression tree; samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0usize;
        loop {
            let n = &self.nodes[i];
            match (n.feature_index, n.left, n.right) {
                (Some(f), Some(l), Some(r)) => {
                    i = if x[f as usize] <= n.threshold { l as usize } else { r as usize };
                }
                _ => return n.leaf_value,
            }
        }
    }

    pub fn scale_leaves(&mut self, s: f64) {
        for n in &mut self.nodes {
            if n.feature_index.is_none() {
                n.leaf_value *= s;
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.feature_index.is_none()).count()
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match (t.nodes[i].left, t.nodes[i].right) {
                (Some(l), Some(r)) => 1 + go(t, l as usize).max(go(t, r as usize)),
                _ => 0,
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub l2: f64,
    pub learning_rate: f64,
}

#[derive(Clone, Copy, Default)]
struct Cell {
    g: f64,
    h: f64,
    n: u32,
}

struct Split {
    feature: usize,
    bin: usize,
    gain: f64,
}

/// Fits one tree to gradients and hessians on binned, column-major data
/// restricted to `rows`.
pub(crate) struct TreeGrower<'a> {
    pub bins: &'a [Vec<u8>],
    pub edges: &'a [Vec<f64>],
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub params: GrowParams,
    offsets: Vec<usize>,
}

impl<'a> TreeGrower<'a> {
    pub fn new(
        bins: &'a [Vec<u8>],
        edges: &'a [Vec<f64>],
        grad: &'a [f64],
        hess: &'a [f64],
        params: GrowParams,
    ) -> Self {
        let mut offsets = Vec::with_capacity(edges.len() + 1);
        let mut acc = 0;
        for e in edges {
            offsets.push(acc);
            acc += e.len() + 1;
        }
        offsets.push(acc);
        Self {
            bins,
            edges,
            grad,
            hess,
            params,
            offsets,
        }
    }

    pub fn grow(&self, rows: Vec<u32>) -> Tree {
        let mut nodes = Vec::new();
        let hist = self.histogram(&rows);
        self.grow_node(rows, hist, 0, &mut nodes);
        Tree { nodes }
    }

    fn histogram(&self, rows: &[u32]) -> Vec<Cell> {
        let mut hist = vec![Cell::default(); *self.offsets.last().unwrap()];
        for (f, col) in self.bins.iter().enumerate() {
            let h = &mut hist[self.offsets[f]..self.offsets[f + 1]];
            for &r in rows {
                let c = &mut h[col[r as usize] as usize];
                c.g += self.grad[r as usize];
                c.h += self.hess[r as usize];
                c.n += 1;
            }
        }
        hist
    }

    fn score(&self, g: f64, h: f64) -> f64 {
        g * g / (h + self.params.l2)
    }

    fn best_split(&self, hist: &[Cell], g: f64, h: f64, n: usize) -> Option<Split> {
        let min_leaf = self.params.min_samples_leaf.max(1) as u32;
        let parent = self.score(g, h);
        let mut best: Option<Split> = None;
        for f in 0..self.edges.len() {
            let cells = &hist[self.offsets[f]..self.offsets[f + 1]];
            let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0u32);
            for (b, c) in cells[..cells.len() - 1].iter().enumerate() {
                if c.n == 0 {
                    continue;
                }
                gl += c.g;
                hl += c.h;
                nl += c.n;
                let nr = n as u32 - nl;
                if nr < min_leaf {
                    break;
                }
                if nl < min_leaf {
                    continue;
                }
                let gain = self.score(gl, hl) + self.score(g - gl, h - hl) - parent;
                if gain > 1e-12 && best.as_ref().is_none_or(|s| gain > s.gain) {
                    best = Some(Split { feature: f, bin: b, gain });
                }
            }
        }
        best
    }

    fn grow_node(&self, rows: Vec<u32>, hist: Vec<Cell>, depth: usize, nodes: &mut Vec<TreeNode>) -> u32 {
        let (g, h) = rows.iter().fold((0.0, 0.0), |(g, h), &r| {
            (g + self.grad[r as usize], h + self.hess[r as usize])
        });
        let idx = nodes.len();
        nodes.push(TreeNode::leaf(-g / (h + self.params.l2) * self.params.learning_rate));
        if depth >= self.params.max_depth || rows.len() < 2 * self.params.min_samples_leaf.max(1) {
            return idx as u32;
        }
        let Some(split) = self.best_split(&hist, g, h, rows.len()) else {
            return idx as u32;
        };
        let col = &self.bins[split.feature];
        let (left, right): (Vec<u32>, Vec<u32>) =
            rows.into_iter().partition(|&r| col[r as usize] as usize <= split.bin);
        // Build the smaller child's histogram and derive the other by subtraction.
        let (small, large_is_left) = if left.len() <= right.len() { (&left, false) } else { (&right, true) };
        let small_hist = self.histogram(small);
        let large_hist: Vec<Cell> = hist
            .iter()
            .zip(&small_hist)
            .map(|(p, s)| Cell { g: p.g - s.g, h: p.h - s.h, n: p.n - s.n })
            .collect();
        let (lh, rh) = if large_is_left { (large_hist, small_hist) } else { (small_hist, large_hist) };
        let l = self.grow_node(left, lh, depth + 1, nodes);
        let r = self.grow_node(right, rh, depth + 1, nodes);
        nodes[idx] = TreeNode {
            feature_index: Some(split.feature as u32),
            threshold: self.edges[split.feature][split.bin],
            left: Some(l),
            right: Some(r),
            leaf_value: 0.0,
        };
        idx as u32
    }
}
