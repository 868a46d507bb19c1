//! Dataset generation, feature extraction, training, ingestion and reports.

mod features;
mod ingest;
mod manifest;
mod report;
mod train;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use features::{extract_features, ExtractedFeatures, FeatureFamily, FeatureSet};
pub use ingest::{export_edge_list, ingest_files, ingest_real_network, IngestResult, RejectedRow};
pub use manifest::{
    DatasetManifest, DroppedConfig, ManifestEntry, MANIFEST_FILE, MANIFEST_FORMAT_VERSION, PARTIAL_MANIFEST_FILE,
};
pub use report::{
    class_mean_matrices, classify_network, read_matrix_csv, write_corner_correlations, write_delta_matrices,
    write_eval_report, write_matrix_csv, ClassificationReport,
};
pub use train::{train_and_evaluate, SplitFile, TrainOptions, TrainOutcome};

use crate::dynamic::CohortSpec;
use crate::engine::simulate_with_retries;
use crate::error::{Error, Result};
use crate::model::{sample_config, BatchRate, ModelClass, OutDegreePmf, PmfSource};
use crate::seed::{config_seed, SimRng};

/// Everything that determines a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub classes: Vec<ModelClass>,
    pub networks_per_class: usize,
    pub target_size: usize,
    pub master_seed: u64,
    pub max_attempts: u32,
    /// `None` uses the shipped distribution.
    pub outdeg_pmf: Option<PathBuf>,
    pub cohorts: Vec<CohortSpec>,
    pub batch_rate: BatchRate,
    pub gzip: bool,
    #[serde(skip)]
    pub out_dir: PathBuf,
    /// Worker threads; 0 picks one per core. Results do not depend on it.
    #[serde(skip)]
    pub workers: usize,
}

impl RunSpec {
    /// Desk-scale defaults: every class, 120 networks of 5,000 vertices,
    /// time and size cohorts of 10 x 10.
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            classes: ModelClass::ALL.to_vec(),
            networks_per_class: 120,
            target_size: 5000,
            master_seed: 0,
            max_attempts: crate::engine::DEFAULT_MAX_ATTEMPTS,
            outdeg_pmf: None,
            cohorts: vec![CohortSpec::time_default(), CohortSpec::size_default()],
            batch_rate: BatchRate::default(),
            gzip: false,
            out_dir: out_dir.into(),
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::invalid("no classes selected"));
        }
        if self.networks_per_class == 0 {
            return Err(Error::invalid("networks_per_class must be at least 1"));
        }
        if self.max_attempts == 0 {
            return Err(Error::invalid("max_attempts must be at least 1"));
        }
        if let Some(c) = self.cohorts.iter().find(|c| c.r > self.target_size) {
            return Err(Error::invalid(format!(
                "target size {} is smaller than the {} degree groups of {}",
                self.target_size,
                c.r,
                c.label()
            )));
        }
        if self.target_size == 0 {
            return Err(Error::invalid("target_size must be positive"));
        }
        Ok(())
    }

    fn load_pmf(&self) -> Result<(Arc<OutDegreePmf>, PmfSource)> {
        match &self.outdeg_pmf {
            None => Ok((OutDegreePmf::default_shared(), PmfSource::Default)),
            Some(p) => Ok((Arc::new(OutDegreePmf::from_path(p)?), PmfSource::File(p.clone()))),
        }
    }
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

pub fn network_id(class: ModelClass, index: u64) -> String {
    format!("{}_{index:05}", class.name())
}

enum TaskOutcome {
    Kept(ManifestEntry),
    Dropped(DroppedConfig),
}

/// Samples, simulates and stores every network of the run, then writes
/// `manifest.json`. Configurations that go extinct on every attempt are
/// listed in `dropped`. On an I/O failure the networks finished so far are
/// listed in `manifest.partial.json` and the error is returned.
pub fn generate_dataset(spec: &RunSpec) -> Result<DatasetManifest> {
    spec.validate()?;
    let root = &spec.out_dir;
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let (pmf, source) = spec.load_pmf()?;
    let tasks: Vec<(ModelClass, u64)> = spec
        .classes
        .iter()
        .flat_map(|&c| (0..spec.networks_per_class as u64).map(move |i| (c, i)))
        .collect();

    let run_task = |&(class, index): &(ModelClass, u64)| -> Result<TaskOutcome> {
        let mut rng = SimRng::seed_from_u64(config_seed(spec.master_seed, class.code(), index));
        let config = sample_config(class, pmf.clone(), &mut rng)
            .with_pmf_source(source.clone())
            .with_batch_rate(spec.batch_rate);
        match simulate_with_retries(&config, spec.target_size, spec.max_attempts, spec.master_seed, index) {
            Ok(run) => {
                let id = network_id(class, index);
                let rel = format!("networks/{id}");
                let files = run
                    .record
                    .write_dir(&root.join(&rel), spec.gzip)?
                    .iter()
                    .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
                    .collect();
                log::debug!("{id}: {} attempt(s)", run.attempts_used);
                Ok(TaskOutcome::Kept(ManifestEntry {
                    network_id: id,
                    class,
                    class_code: class.code(),
                    config_index: index,
                    config: config.to_json(),
                    seed: run.seed,
                    attempts_used: run.attempts_used,
                    path: rel,
                    files,
                }))
            }
            Err(Error::AllExtinct { attempts }) => {
                log::warn!("{} config {index}: all {attempts} attempts went extinct, dropped", class.name());
                Ok(TaskOutcome::Dropped(DroppedConfig {
                    class,
                    config_index: index,
                    config: config.to_json(),
                    attempts,
                }))
            }
            Err(e) => Err(e),
        }
    };
    let outcomes: Vec<Result<TaskOutcome>> = thread_pool(spec.workers)?.install(|| tasks.par_iter().map(run_task).collect());

    let mut manifest = DatasetManifest {
        format_version: MANIFEST_FORMAT_VERSION,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        run: RunSpec {
            out_dir: PathBuf::new(),
            workers: 0,
            ..spec.clone()
        },
        entries: Vec::new(),
        dropped: Vec::new(),
    };
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(TaskOutcome::Kept(e)) => manifest.entries.push(e),
            Ok(TaskOutcome::Dropped(d)) => manifest.dropped.push(d),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if let Some(e) = first_error {
        manifest.write_atomic(root, PARTIAL_MANIFEST_FILE)?;
        return Err(e);
    }
    manifest.write_atomic(root, MANIFEST_FILE)?;
    Ok(manifest)
}

/// Reads a record listed in a manifest.
pub fn load_network(dataset_dir: &Path, entry: &ManifestEntry) -> Result<crate::engine::GrowthRecord> {
    crate::engine::GrowthRecord::read_dir(&dataset_dir.join(&entry.path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path, workers: usize) -> RunSpec {
        RunSpec {
            classes: vec![ModelClass::U, ModelClass::FExpA],
            networks_per_class: 3,
            target_size: 100,
            master_seed: 11,
            workers,
            ..RunSpec::new(dir)
        }
    }

    #[test]
    fn manifest_lists_every_network() {
        let dir = tempfile::tempdir().unwrap();
        let m = generate_dataset(&small(dir.path(), 1)).unwrap();
        assert_eq!(m.entries.len() + m.dropped.len(), 6);
        for e in m.entries.iter().filter(|e| e.class == ModelClass::U) {
            assert_eq!(e.attempts_used, 1);
        }
        assert_eq!(DatasetManifest::read(dir.path()).unwrap(), m);
        for e in &m.entries {
            let r = load_network(dir.path(), e).unwrap();
            assert_eq!(r.num_vertices(), 100);
        }
        let on_disk = std::fs::read_dir(dir.path().join("networks")).unwrap().count();
        assert_eq!(on_disk, m.entries.len());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let mut m1 = generate_dataset(&small(a.path(), 1)).unwrap();
        let mut m2 = generate_dataset(&small(b.path(), 3)).unwrap();
        m1.created_unix = 0;
        m2.created_unix = 0;
        assert_eq!(m1, m2);
        let e = &m1.entries[0];
        assert_eq!(
            std::fs::read(a.path().join(&e.path).join("edges.csv")).unwrap(),
            std::fs::read(b.path().join(&e.path).join("edges.csv")).unwrap()
        );
    }

    #[test]
    fn rejects_too_few_vertices_for_groups() {
        let spec = RunSpec { target_size: 5, ..RunSpec::new("unused") };
        assert!(spec.validate().is_err());
    }
}
