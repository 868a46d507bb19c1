use serde::{Deserialize, Serialize};

/// Per-feature split thresholds. A value `x` falls in bin `b` when exactly
/// `b` thresholds are strictly below it, so `bin(x) <= b` iff `x <= edges[b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMapper {
    pub edges: Vec<Vec<f64>>,
}

impl BinMapper {
    /// Up to `max_bins` bins per feature from the training columns. Features
    /// with at most `max_bins` distinct values get one bin per value, with
    /// thresholds at midpoints; otherwise thresholds sit at quantile cuts.
    pub fn fit(columns: &[Vec<f64>], max_bins: usize) -> Self {
        let max_bins = max_bins.clamp(2, 256);
        let edges = columns
            .iter()
            .map(|col| {
                let mut sorted = col.clone();
                sorted.sort_by(f64::total_cmp);
                let mut distinct: Vec<(f64, usize)> = Vec::new();
                for x in sorted {
                    match distinct.last_mut() {
                        Some((v, c)) if *v == x => *c += 1,
                        _ => distinct.push((x, 1)),
                    }
                }
                let mid = |a: f64, b: f64| a + (b - a) / 2.0;
                if distinct.len() <= max_bins {
                    distinct.windows(2).map(|w| mid(w[0].0, w[1].0)).collect()
                } else {
                    let n = col.len() as f64;
                    let mut out = Vec::with_capacity(max_bins - 1);
                    let mut cum = 0usize;
                    let mut next_cut = 1usize;
                    for w in distinct.windows(2) {
                        cum += w[0].1;
                        if out.len() + 1 >= max_bins {
                            break;
                        }
                        if cum as f64 >= next_cut as f64 * n / max_bins as f64 {
                            out.push(mid(w[0].0, w[1].0));
                            while next_cut as f64 * n / max_bins as f64 <= cum as f64 {
                                next_cut += 1;
                            }
                        }
                    }
                    out
                }
            })
            .collect();
        Self { edges }
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.edges[feature].len() + 1
    }

    #[inline]
    pub fn bin(&self, feature: usize, x: f64) -> u8 {
        self.edges[feature].partition_point(|&e| e < x) as u8
    }

    /// Column-major bin indices.
    pub fn transform(&self, columns: &[Vec<f64>]) -> Vec<Vec<u8>> {
        columns
            .iter()
            .enumerate()
            .map(|(f, col)| col.iter().map(|&x| self.bin(f, x)).collect())
            .collect()
    }
}
