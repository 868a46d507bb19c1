use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::binning::BinMapper;
use super::table::FeatureTable;
use super::tree::{GrowParams, Tree, TreeGrower};
use crate::error::{Error, Result};
use crate::model::ModelClass;
use crate::seed::{rng_from, stream};

pub const N_CLASSES: usize = ModelClass::COUNT;
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Pseudo-count used for classes absent from training so every class keeps
/// a strictly positive prior.
const ABSENT_CLASS_COUNT: f64 = 1e-3;
const HESSIAN_FLOOR: f64 = 1e-16;
const MAX_HALVINGS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub max_bins: usize,
    pub min_samples_leaf: usize,
    pub l2_regularization: f64,
    /// Fraction of rows sampled per round; 1.0 disables sampling.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_trees: 300,
            learning_rate: 0.1,
            max_depth: 8,
            max_bins: 255,
            min_samples_leaf: 20,
            l2_regularization: 1.0,
            subsample: 1.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.max_bins < 2 || self.max_bins > 256 {
            return Err(Error::invalid("max_bins must be in [2, 256]"));
        }
        if !(self.l2_regularization >= 0.0) {
            return Err(Error::invalid("l2_regularization must be non-negative"));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::invalid("subsample must be in (0, 1]"));
        }
        Ok(())
    }

    /// The cross-validation grid: trees {100, 300} x depth {4, 8} x rate
    /// {0.05, 0.1}, other settings copied from `self`.
    pub fn grid(&self) -> Vec<TrainConfig> {
        let mut out = Vec::new();
        for n_trees in [100, 300] {
            for max_depth in [4, 8] {
                for learning_rate in [0.05, 0.1] {
                    out.push(TrainConfig {
                        n_trees,
                        max_depth,
                        learning_rate,
                        ..*self
                    });
                }
            }
        }
        out
    }
}

/// Softmax boosted trees over the nine model classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub base_margins: Vec<f64>,
    /// One tree per class per boosting round.
    pub stages: Vec<Vec<Tree>>,
    pub bin_edges: Vec<Vec<f64>>,
    pub config: TrainConfig,
    /// Mean cross-entropy on the training rows after each round.
    pub train_loss: Vec<f64>,
}

fn softmax_into(margins: &[f64], out: &mut [f64]) {
    let m = margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for (o, &z) in out.iter_mut().zip(margins) {
        *o = (z - m).exp();
        s += *o;
    }
    out.iter_mut().for_each(|o| *o /= s);
}

/// Cross-entropy of one sample and its gradient with respect to the margins.
pub fn softmax_loss_and_gradient(margins: &[f64], label: usize) -> (f64, Vec<f64>) {
    let mut p = vec![0.0; margins.len()];
    softmax_into(margins, &mut p);
    let m = margins.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + margins.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
    let g = p
        .iter()
        .enumerate()
        .map(|(k, &pk)| pk - if k == label { 1.0 } else { 0.0 })
        .collect();
    (lse - margins[label], g)
}

fn mean_loss(margins: &[f64], labels: &[u8]) -> f64 {
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let z = &margins[i * N_CLASSES..(i + 1) * N_CLASSES];
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        total += lse - z[y as usize];
    }
    total / labels.len() as f64
}

fn columns_of(table: &FeatureTable) -> Vec<Vec<f64>> {
    (0..table.width())
        .map(|f| table.rows().iter().map(|r| r.features[f]).collect())
        .collect()
}

/// Trains on every row of `table`; all rows must be labeled and at least two
/// classes present. Training loss never increases between rounds: a round
/// whose trees would raise it is shrunk by halving.
pub fn train(table: &FeatureTable, config: &TrainConfig) -> Result<GbdtModel> {
    config.validate()?;
    let labels = table.labels()?;
    if labels.is_empty() {
        return Err(Error::data("cannot train on an empty table"));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l as usize >= N_CLASSES) {
        return Err(Error::data(format!("class code {bad} out of range")));
    }
    let n = labels.len();
    let mut counts = [0usize; N_CLASSES];
    labels.iter().for_each(|&l| counts[l as usize] += 1);
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::data("training needs at least two classes"));
    }
    let base_margins: Vec<f64> = counts
        .iter()
        .map(|&c| (if c > 0 { c as f64 } else { ABSENT_CLASS_COUNT } / n as f64).ln())
        .collect();

    let columns = columns_of(table);
    let mapper = BinMapper::fit(&columns, config.max_bins);
    let bins = mapper.transform(&columns);
    let params = GrowParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        l2: config.l2_regularization,
        learning_rate: config.learning_rate,
    };

    let mut margins: Vec<f64> = (0..n).flat_map(|_| base_margins.iter().cloned()).collect();
    let mut loss = mean_loss(&margins, &labels);
    let mut stages = Vec::with_capacity(config.n_trees);
    let mut train_loss = Vec::with_capacity(config.n_trees);
    let mut probs = vec![0.0; n * N_CLASSES];

    for round in 0..config.n_trees {
        for i in 0..n {
            softmax_into(&margins[i * N_CLASSES..(i + 1) * N_CLASSES], &mut probs[i * N_CLASSES..(i + 1) * N_CLASSES]);
        }
        let rows: Vec<u32> = if config.subsample < 1.0 {
            let mut rng = rng_from(config.seed, &[stream::SUBSAMPLE, round as u64]);
            let picked: Vec<u32> = (0..n as u32).filter(|_| rng.random::<f64>() < config.subsample).collect();
            if picked.is_empty() { (0..n as u32).collect() } else { picked }
        } else {
            (0..n as u32).collect()
        };

        let mut trees: Vec<Tree> = (0..N_CLASSES)
            .into_par_iter()
            .map(|k| {
                let mut grad = vec![0.0; n];
                let mut hess = vec![0.0; n];
                for i in 0..n {
                    let p = probs[i * N_CLASSES + k];
                    grad[i] = p - if labels[i] as usize == k { 1.0 } else { 0.0 };
                    hess[i] = (p * (1.0 - p)).max(HESSIAN_FLOOR);
                }
                TreeGrower::new(&bins, &mapper.edges, &grad, &hess, params).grow(rows.clone())
            })
            .collect();

        let updates: Vec<f64> = (0..n)
            .flat_map(|i| {
                let x = &table.rows()[i].features;
                trees.iter().map(move |t| t.predict(x)).collect::<Vec<_>>()
            })
            .collect();
        let mut scale = 1.0;
        let mut candidate = margins.clone();
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            for (c, (m, u)) in candidate.iter_mut().zip(margins.iter().zip(&updates)) {
                *c = m + scale * u;
            }
            let l = mean_loss(&candidate, &labels);
            if l <= loss {
                loss = l;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if accepted {
            margins = candidate;
            if scale != 1.0 {
                trees.iter_mut().for_each(|t| t.scale_leaves(scale));
            }
        } else {
            trees.iter_mut().for_each(|t| t.scale_leaves(0.0));
        }
        stages.push(trees);
        train_loss.push(loss);
    }

    Ok(GbdtModel {
        format_version: MODEL_FORMAT_VERSION,
        feature_names: table.columns().to_vec(),
        class_names: ModelClass::ALL.iter().map(|c| c.name().to_string()).collect(),
        base_margins,
        stages,
        bin_edges: mapper.edges,
        config: *config,
        train_loss,
    })
}

impl GbdtModel {
    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.base_margins.clone();
        for stage in &self.stages {
            for (k, t) in stage.iter().enumerate() {
                z[k] += t.predict(x);
            }
        }
        z
    }

    /// Class probabilities, indexed by class code.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let z = self.margins(x);
        let mut p = vec![0.0; z.len()];
        softmax_into(&z, &mut p);
        p
    }

    /// Most probable class code; ties go to the lower code.
    pub fn predict(&self, x: &[f64]) -> u8 {
        let z = self.margins(x);
        let mut best = 0;
        for k in 1..z.len() {
            if z[k] > z[best] {
                best = k;
            }
        }
        best as u8
    }

    pub fn predict_table(&self, table: &FeatureTable) -> Result<Vec<u8>> {
        self.check_columns(table.columns())?;
        Ok(table.rows().iter().map(|r| self.predict(&r.features)).collect())
    }

    /// Errors unless `columns` equals the training columns exactly.
    pub fn check_columns(&self, columns: &[String]) -> Result<()> {
        if columns == self.feature_names.as_slice() {
            return Ok(());
        }
        let missing: Vec<String> = self
            .feature_names
            .iter()
            .filter(|c| !columns.contains(c))
            .cloned()
            .collect();
        let unexpected: Vec<String> = columns
            .iter()
            .filter(|c| !self.feature_names.contains(c))
            .cloned()
            .collect();
        Err(Error::SchemaMismatch { missing, unexpected })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: GbdtModel = serde_json::from_str(text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::data(format!(
                "unsupported model format version {}",
                m.format_version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::FeatureRow;

    fn toy(n_per: usize) -> FeatureTable {
        let mut t = FeatureTable::new(vec!["a".into(), "b".into()]);
        for i in 0..n_per {
            for (c, off) in [(0u8, 0.0), (4u8, 10.0)] {
                t.push(FeatureRow {
                    network_id: format!("{c}-{i}"),
                    label: Some(c),
                    features: vec![off + i as f64 * 0.01, (i % 3) as f64],
                })
                .unwrap();
            }
        }
        t
    }

    #[test]
    fn zero_trees_predicts_priors() {
        let mut t = toy(30);
        t.push(FeatureRow { network_id: "x".into(), label: Some(4), features: vec![1.0, 1.0] }).unwrap();
        let m = train(&t, &TrainConfig { n_trees: 0, ..Default::default() }).unwrap();
        let p = m.predict_proba(&[5.0, 0.0]);
        assert!((p[0] - 30.0 / 61.0).abs() < 1e-4);
        assert!((p[4] - 31.0 / 61.0).abs() < 1e-4);
        assert!(p.iter().all(|&x| x > 0.0));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn learns_separable_classes() {
        let t = toy(40);
        let m = train(&t, &TrainConfig { n_trees: 20, min_samples_leaf: 5, ..Default::default() }).unwrap();
        assert_eq!(m.predict_table(&t).unwrap(), t.labels().unwrap());
        assert!(m.train_loss.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let z = [0.3, -1.2, 2.0, 0.0, 0.5, -0.7, 1.1, 0.2, -2.5];
        for label in [0, 2, 8] {
            let (_, g) = softmax_loss_and_gradient(&z, label);
            for k in 0..z.len() {
                let h = 1e-6;
                let mut up = z;
                let mut dn = z;
                up[k] += h;
                dn[k] -= h;
                let fd = (softmax_loss_and_gradient(&up, label).0 - softmax_loss_and_gradient(&dn, label).0) / (2.0 * h);
                assert!((fd - g[k]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let mut t = FeatureTable::new(vec!["a".into()]);
        t.push(FeatureRow { network_id: "0".into(), label: Some(1), features: vec![0.0] }).unwrap();
        assert!(train(&t, &TrainConfig::default()).is_err());
    }

    #[test]
    fn json_round_trip_preserves_predictions() {
        let t = toy(25);
        let m = train(&t, &TrainConfig { n_trees: 5, min_samples_leaf: 3, ..Default::default() }).unwrap();
        let back = GbdtModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        for r in t.rows() {
            assert_eq!(back.predict_proba(&r.features), m.predict_proba(&r.features));
        }
    }

    #[test]
    fn schema_mismatch_lists_columns() {
        let t = toy(25);
        let m = train(&t, &TrainConfig { n_trees: 1, min_samples_leaf: 3, ..Default::default() }).unwrap();
        match m.check_columns(&["a".into(), "c".into()]) {
            Err(Error::SchemaMismatch { missing, unexpected }) => {
                assert_eq!(missing, vec!["b".to_string()]);
                assert_eq!(unexpected, vec!["c".to_string()]);
            }
            other => panic!("{other:?}"),
        }
    }
}
