use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{train, GbdtModel, TrainConfig, N_CLASSES};
use super::table::FeatureTable;
use crate::error::{Error, Result};
use crate::seed::{rng_from, stream};

fn indices_by_class(labels: &[u8]) -> Vec<Vec<usize>> {
    let mut by = vec![Vec::new(); N_CLASSES];
    for (i, &l) in labels.iter().enumerate() {
        by[l as usize].push(i);
    }
    by
}

/// Splits row indices into (train, test), holding out
/// `round(count * test_fraction)` rows of each class. Both lists are sorted.
pub fn stratified_split(table: &FeatureTable, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid("test_fraction must be in [0, 1)"));
    }
    let labels = table.labels()?;
    let mut rng = rng_from(seed, &[stream::SPLIT]);
    let (mut train_idx, mut test_idx) = (Vec::new(), Vec::new());
    for mut idx in indices_by_class(&labels) {
        idx.shuffle(&mut rng);
        let k = ((idx.len() as f64 * test_fraction).round() as usize).min(idx.len().saturating_sub(1));
        test_idx.extend_from_slice(&idx[..k]);
        train_idx.extend_from_slice(&idx[k..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((train_idx, test_idx))
}

/// Fold assignment per row; each class is dealt round-robin after a
/// seeded shuffle, so per-class fold sizes differ by at most one.
pub fn stratified_folds(labels: &[u8], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from(seed, &[stream::FOLDS]);
    let mut fold = vec![0; labels.len()];
    for mut idx in indices_by_class(labels) {
        idx.shuffle(&mut rng);
        for (j, i) in idx.into_iter().enumerate() {
            fold[i] = j % k;
        }
    }
    fold
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub grid: Vec<TrainConfig>,
    /// Accuracy per grid point per fold.
    pub fold_accuracy: Vec<Vec<f64>>,
    pub best_index: usize,
}

impl CvResult {
    pub fn best(&self) -> TrainConfig {
        self.grid[self.best_index]
    }

    pub fn mean_accuracy(&self, i: usize) -> f64 {
        crate::stats::mean(&self.fold_accuracy[i])
    }
}

/// Picks the grid point with the highest mean fold accuracy; ties go to
/// fewer trees, then to shallower trees.
pub fn cross_validate(table: &FeatureTable, grid: &[TrainConfig], k: usize, seed: u64) -> Result<CvResult> {
    if grid.is_empty() || k < 2 {
        return Err(Error::invalid("cross-validation needs a grid and at least two folds"));
    }
    let labels = table.labels()?;
    let fold = stratified_folds(&labels, k, seed);
    let mut fold_accuracy = vec![Vec::with_capacity(k); grid.len()];
    for f in 0..k {
        let train_idx: Vec<usize> = (0..labels.len()).filter(|&i| fold[i] != f).collect();
        let test_idx: Vec<usize> = (0..labels.len()).filter(|&i| fold[i] == f).collect();
        let (tr, te) = (table.subset(&train_idx), table.subset(&test_idx));
        for (g, cfg) in grid.iter().enumerate() {
            let model = train(&tr, cfg)?;
            fold_accuracy[g].push(evaluate(&model, &te)?.accuracy);
        }
    }
    let mut best_index = 0;
    for i in 1..grid.len() {
        let (a, b) = (crate::stats::mean(&fold_accuracy[i]), crate::stats::mean(&fold_accuracy[best_index]));
        let key = |c: &TrainConfig| (c.n_trees, c.max_depth);
        if a > b || (a == b && key(&grid[i]) < key(&grid[best_index])) {
            best_index = i;
        }
    }
    Ok(CvResult {
        grid: grid.to_vec(),
        fold_accuracy,
        best_index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    /// `None` where the class was never predicted.
    pub precision: Vec<Option<f64>>,
    /// `None` where the class has no rows.
    pub recall: Vec<Option<f64>>,
}

impl EvalReport {
    pub fn from_predictions(truth: &[u8], predicted: &[u8]) -> Self {
        let mut confusion = vec![vec![0u64; N_CLASSES]; N_CLASSES];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[t as usize][p as usize] += 1;
        }
        let correct: u64 = (0..N_CLASSES).map(|k| confusion[k][k]).sum();
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        let precision = (0..N_CLASSES)
            .map(|k| ratio(confusion[k][k], (0..N_CLASSES).map(|t| confusion[t][k]).sum()))
            .collect();
        let recall = (0..N_CLASSES)
            .map(|k| ratio(confusion[k][k], confusion[k].iter().sum()))
            .collect();
        Self {
            accuracy: if truth.is_empty() { 0.0 } else { correct as f64 / truth.len() as f64 },
            confusion,
            precision,
            recall,
        }
    }

    /// Fraction of class `k` rows assigned to class `j`.
    pub fn row_fraction(&self, k: usize, j: usize) -> f64 {
        let total: u64 = self.confusion[k].iter().sum();
        if total == 0 { 0.0 } else { self.confusion[k][j] as f64 / total as f64 }
    }

    pub fn confusion_csv(&self) -> String {
        let names: Vec<&str> = crate::model::ModelClass::ALL.iter().map(|c| c.name()).collect();
        let mut out = format!("true\\predicted,{}\n", names.join(","));
        for (k, row) in self.confusion.iter().enumerate() {
            out.push_str(names[k]);
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn evaluate(model: &GbdtModel, table: &FeatureTable) -> Result<EvalReport> {
    let truth = table.labels()?;
    let predicted = model.predict_table(table)?;
    Ok(EvalReport::from_predictions(&truth, &predicted))
}

fn accuracy_of(model: &GbdtModel, rows: &[Vec<f64>], truth: &[u8]) -> f64 {
    let hits = rows
        .iter()
        .zip(truth)
        .filter(|(x, &t)| model.predict(x) == t)
        .count();
    hits as f64 / truth.len().max(1) as f64
}

/// Mean drop in accuracy when one column is shuffled, per column, over
/// `n_repeats` seeded permutations.
pub fn permutation_importance(model: &GbdtModel, table: &FeatureTable, n_repeats: usize, seed: u64) -> Result<Vec<f64>> {
    model.check_columns(table.columns())?;
    let truth = table.labels()?;
    let mut rows: Vec<Vec<f64>> = table.rows().iter().map(|r| r.features.clone()).collect();
    let baseline = accuracy_of(model, &rows, &truth);
    let mut out = Vec::with_capacity(table.width());
    for f in 0..table.width() {
        let original: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        let mut drop = 0.0;
        for rep in 0..n_repeats {
            let mut rng = rng_from(seed, &[stream::PERMUTE, f as u64, rep as u64]);
            let mut col = original.clone();
            col.shuffle(&mut rng);
            rows.iter_mut().zip(&col).for_each(|(r, &v)| r[f] = v);
            drop += baseline - accuracy_of(model, &rows, &truth);
        }
        rows.iter_mut().zip(&original).for_each(|(r, &v)| r[f] = v);
        out.push(if n_repeats == 0 { 0.0 } else { drop / n_repeats as f64 });
    }
    Ok(out)
}
