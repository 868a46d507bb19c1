//! Dynamic feature matrices.
//!
//! Vertices are split into `r` equal groups by final degree (group 1 holds
//! the highest degrees) and time into `s` arrival cohorts. Cell `(i, j)` is
//! the average number of edges received during cohort `i` by a vertex of
//! group `j`, and the matrix is normalized to sum to one.

use serde::{Deserialize, Serialize};

use crate::engine::GrowthRecord;
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CohortMode {
    /// `tau_i = T i / s`.
    Time,
    /// `tau_i` is the birth time of vertex `floor(|V| i / s)`.
    Size,
}

impl CohortMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CohortMode::Time => "time",
            CohortMode::Size => "size",
        }
    }
}

/// Which degree defines the groups and the increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// Received edges, counting parallel and self edges.
    #[default]
    InDegree,
    /// Received plus sent edges.
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohortSpec {
    pub mode: CohortMode,
    /// Number of cohorts (rows).
    pub s: usize,
    /// Number of degree groups (columns).
    pub r: usize,
}

impl CohortSpec {
    pub fn new(mode: CohortMode, s: usize, r: usize) -> Result<Self> {
        if s == 0 || r == 0 {
            return Err(Error::invalid("cohort spec needs s >= 1 and r >= 1"));
        }
        Ok(Self { mode, s, r })
    }

    pub fn time_default() -> Self {
        Self {
            mode: CohortMode::Time,
            s: 10,
            r: 10,
        }
    }

    pub fn size_default() -> Self {
        Self {
            mode: CohortMode::Size,
            s: 10,
            r: 10,
        }
    }

    /// `D_1_1 ... D_s_r`, row-major.
    pub fn column_names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.s * self.r);
        for i in 1..=self.s {
            for j in 1..=self.r {
                out.push(format!("D_{i}_{j}"));
            }
        }
        out
    }

    /// Parses `time:10x10` / `size:5x8`.
    pub fn parse(text: &str) -> Result<Self> {
        let (mode, dims) = text
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("cohort spec {text:?} must look like time:10x10")))?;
        let mode = match mode.trim() {
            "time" => CohortMode::Time,
            "size" => CohortMode::Size,
            other => return Err(Error::invalid(format!("unknown cohort mode {other:?}"))),
        };
        let (s, r) = dims
            .split_once('x')
            .ok_or_else(|| Error::invalid(format!("cohort dims {dims:?} must look like 10x10")))?;
        let s = s.trim().parse().map_err(|_| Error::invalid(format!("bad s in {text:?}")))?;
        let r = r.trim().parse().map_err(|_| Error::invalid(format!("bad r in {text:?}")))?;
        Self::new(mode, s, r)
    }

    pub fn label(&self) -> String {
        format!("{}:{}x{}", self.mode.as_str(), self.s, self.r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicFeatureMatrix {
    /// Row-major `s x r` values.
    pub values: Vec<f64>,
    pub spec: CohortSpec,
    /// `C = 1 / sum(Delta)`; `None` for records without edges.
    pub normalization: Option<f64>,
}

impl DynamicFeatureMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i - 1) * self.spec.r + (j - 1)]
    }

    pub fn is_degenerate(&self) -> bool {
        self.normalization.is_none()
    }
}

fn degrees(record: &GrowthRecord, mode: DegreeMode) -> Vec<u32> {
    let mut deg = record.in_degrees();
    if mode == DegreeMode::Total {
        for (d, o) in deg.iter_mut().zip(record.out_degrees()) {
            *d += o;
        }
    }
    deg
}

/// Group index (0-based, 0 = highest degree) of every vertex.
///
/// Vertices are ranked by final degree, descending, ties broken by birth
/// order, and cut into `r` contiguous groups whose sizes differ by at most one.
pub fn degree_groups(record: &GrowthRecord, r: usize, mode: DegreeMode) -> Result<Vec<usize>> {
    let n = record.num_vertices();
    if r == 0 || r > n {
        return Err(Error::invalid(format!("cannot split {n} vertices into {r} groups")));
    }
    let deg = degrees(record, mode);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    let mut group = vec![0usize; n];
    for (rank, &v) in order.iter().enumerate() {
        group[v] = rank * r / n;
    }
    Ok(group)
}

/// `tau_0 = 0 <= tau_1 <= ... <= tau_s = T`.
pub fn cohort_boundaries(record: &GrowthRecord, s: usize, mode: CohortMode) -> Vec<f64> {
    let t_end = record.final_time;
    let n = record.num_vertices();
    let mut taus = Vec::with_capacity(s + 1);
    taus.push(0.0);
    for i in 1..s {
        let tau = match mode {
            CohortMode::Time => t_end * i as f64 / s as f64,
            CohortMode::Size => {
                let k = n * i / s;
                if k == 0 {
                    0.0
                } else {
                    record.vertices[k - 1].birth_time
                }
            }
        };
        taus.push(tau);
    }
    taus.push(t_end);
    taus
}

/// Computes the dynamic feature matrix with in-degree grouping.
pub fn compute_dfm(record: &GrowthRecord, spec: &CohortSpec) -> Result<DynamicFeatureMatrix> {
    compute_dfm_with(record, spec, DegreeMode::InDegree)
}

pub fn compute_dfm_with(record: &GrowthRecord, spec: &CohortSpec, mode: DegreeMode) -> Result<DynamicFeatureMatrix> {
    let CohortSpec { s, r, .. } = *spec;
    if s == 0 {
        return Err(Error::invalid("s must be positive"));
    }
    let group = degree_groups(record, r, mode)?;
    let mut sizes = vec![0usize; r];
    for &g in &group {
        sizes[g] += 1;
    }
    let taus = cohort_boundaries(record, s, spec.mode);
    // edges at exactly tau_i belong to cohort i
    let cohort_of = |t: f64| taus[1..s].partition_point(|&tau| tau < t);

    let mut counts = vec![0u64; s * r];
    for e in &record.edges {
        let i = cohort_of(e.time);
        counts[i * r + group[e.target as usize]] += 1;
        if mode == DegreeMode::Total {
            counts[i * r + group[e.source as usize]] += 1;
        }
    }
    let mut values: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(idx, &c)| c as f64 / sizes[idx % r] as f64)
        .collect();
    let total: f64 = values.iter().sum();
    let normalization = if total > 0.0 {
        let c = 1.0 / total;
        values.iter_mut().for_each(|v| *v *= c);
        Some(c)
    } else {
        None
    };
    Ok(DynamicFeatureMatrix {
        values,
        spec: *spec,
        normalization,
    })
}

/// Cell-wise mean of a set of matrices with the same shape.
pub fn mean_matrix<'a, I>(matrices: I) -> Option<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut acc: Option<Vec<f64>> = None;
    let mut n = 0usize;
    for m in matrices {
        let a = acc.get_or_insert_with(|| vec![0.0; m.len()]);
        for (x, y) in a.iter_mut().zip(m) {
            *x += y;
        }
        n += 1;
    }
    acc.map(|mut a| {
        a.iter_mut().for_each(|x| *x /= n as f64);
        a
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMatrix {
    pub class: ModelClass,
    /// Row-major, same shape as the input matrices.
    pub values: Vec<f64>,
}

/// Relative deviation of each class mean from the mean over classes:
/// `delta = (D - Dbar) / Dbar`, reported as 0 where `Dbar = 0`.
pub fn delta_matrices(class_means: &[(ModelClass, Vec<f64>)]) -> Result<Vec<DeltaMatrix>> {
    let Some((_, first)) = class_means.first() else {
        return Err(Error::invalid("no class means"));
    };
    if class_means.iter().any(|(_, m)| m.len() != first.len()) {
        return Err(Error::invalid("class means have different shapes"));
    }
    let grand = mean_matrix(class_means.iter().map(|(_, m)| m.as_slice())).unwrap();
    Ok(class_means
        .iter()
        .map(|(class, m)| DeltaMatrix {
            class: *class,
            values: m
                .iter()
                .zip(&grand)
                .map(|(&d, &g)| if g > 0.0 { (d - g) / g } else { 0.0 })
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CornerCorrelation {
    /// 1-based `(row, column)` of the corner cell.
    pub corner: (usize, usize),
    /// Pearson correlation of the corner with every cell, row-major.
    pub values: Vec<f64>,
    /// Cells where either side had zero variance (value reported as 0).
    pub zero_variance: Vec<bool>,
}

/// Correlations across a dataset between each of the four corner cells and
/// every cell, in the order `(1,1), (1,r), (s,1), (s,r)`.
pub fn corner_correlations(dfms: &[DynamicFeatureMatrix]) -> Result<Vec<CornerCorrelation>> {
    if dfms.len() < 3 {
        return Err(Error::invalid("corner correlations need at least 3 matrices"));
    }
    let spec = dfms[0].spec;
    if dfms.iter().any(|d| d.spec.s != spec.s || d.spec.r != spec.r) {
        return Err(Error::invalid("matrices have different shapes"));
    }
    let (s, r) = (spec.s, spec.r);
    let column = |idx: usize| dfms.iter().map(|d| d.values[idx]).collect::<Vec<f64>>();
    let corners = [(1, 1), (1, r), (s, 1), (s, r)];
    Ok(corners
        .iter()
        .map(|&(ci, cj)| {
            let cx = column((ci - 1) * r + cj - 1);
            let mut values = Vec::with_capacity(s * r);
            let mut zero_variance = Vec::with_capacity(s * r);
            for idx in 0..s * r {
                match stats::pearson(&cx, &column(idx)) {
                    Some(c) => {
                        values.push(c);
                        zero_variance.push(false);
                    }
                    None => {
                        values.push(0.0);
                        zero_variance.push(true);
                    }
                }
            }
            CornerCorrelation {
                corner: (ci, cj),
                values,
                zero_variance,
            }
        })
        .collect())
}
