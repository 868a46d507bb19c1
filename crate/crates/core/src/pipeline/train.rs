use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gbdt::{cross_validate, evaluate, stratified_split, train, CvResult, EvalReport, FeatureTable, GbdtModel, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    /// Share of each class held out for testing.
    pub test_fraction: f64,
    /// Folds of the hyperparameter search on the training part; `None`
    /// trains `base` directly.
    pub cv_folds: Option<usize>,
    pub base: TrainConfig,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            cv_folds: Some(5),
            base: TrainConfig::default(),
            seed: 0,
        }
    }
}

/// Network ids on each side of a split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFile {
    pub seed: u64,
    pub test_fraction: f64,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: GbdtModel,
    pub cv: Option<CvResult>,
    pub split: SplitFile,
    /// Held-out evaluation; `None` when nothing was held out.
    pub test_report: Option<EvalReport>,
}

/// Stratified split, optional cross-validated grid search on the training
/// part, final fit with the chosen configuration and held-out evaluation.
pub fn train_and_evaluate(table: &FeatureTable, options: &TrainOptions) -> Result<TrainOutcome> {
    let (train_idx, test_idx) = stratified_split(table, options.test_fraction, options.seed)?;
    let (train_table, test_table) = (table.subset(&train_idx), table.subset(&test_idx));
    let base = TrainConfig { seed: options.seed, ..options.base };
    let cv = match options.cv_folds {
        Some(k) => Some(cross_validate(&train_table, &base.grid(), k, options.seed)?),
        None => None,
    };
    let config = cv.as_ref().map_or(base, |c| c.best());
    let model = train(&train_table, &config)?;
    let test_report = if test_table.is_empty() { None } else { Some(evaluate(&model, &test_table)?) };
    let ids = |t: &FeatureTable| t.rows().iter().map(|r| r.network_id.clone()).collect();
    Ok(TrainOutcome {
        model,
        cv,
        split: SplitFile {
            seed: options.seed,
            test_fraction: options.test_fraction,
            train: ids(&train_table),
            test: ids(&test_table),
        },
        test_report,
    })
}
