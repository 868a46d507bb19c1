//! Trains a dynamic-feature model on a small synthetic dataset and reports
//! the class distribution for a timestamped edge list.
//!
//! The edge file has `time,source,target` rows (citing vertex first); an
//! optional vertex file has `vertex_id,birth_time` rows. Without arguments a
//! synthetic network is exported and read back in place of real data.
//!
//!     cargo run --release --example classify_real_network -- edges.csv [vertices.csv]

use std::path::PathBuf;

use ctbp_select::dynamic::CohortSpec;
use ctbp_select::engine::simulate_with_retries;
use ctbp_select::gbdt::TrainConfig;
use ctbp_select::model::{sample_config, ModelClass, OutDegreePmf};
use ctbp_select::pipeline::{
    classify_network, export_edge_list, extract_features, generate_dataset, ingest_files, train_and_evaluate,
    FeatureFamily, FeatureSet, RunSpec, TrainOptions,
};
use ctbp_select::seed::rng_from;

fn main() -> ctbp_select::Result<()> {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let work = tmp.path();
    let args: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let (edges, vertices) = match args.as_slice() {
        [e] => (e.clone(), None),
        [e, v] => (e.clone(), Some(v.clone())),
        _ => {
            let config = sample_config(ModelClass::FPlA, OutDegreePmf::default_shared(), &mut rng_from(3, &[0]));
            let rec = simulate_with_retries(&config, 3000, 1000, 3, 0)?.record;
            let dir = work.join("export");
            export_edge_list(&rec, &dir)?;
            println!("no input given, classifying a synthetic F_plA network");
            (dir.join("edges.csv"), Some(dir.join("vertices.csv")))
        }
    };
    let ingested = ingest_files(&edges, vertices.as_deref())?;
    for row in &ingested.rejected {
        eprintln!("rejected {row:?}");
    }

    let data = work.join("train");
    let manifest = generate_dataset(&RunSpec {
        networks_per_class: 30,
        target_size: 3000,
        master_seed: 5,
        ..RunSpec::new(&data)
    })?;
    let family = FeatureFamily::Dynamic(CohortSpec::time_default());
    let extracted = extract_features(&manifest, &data, &[family], 0)?;
    let options = TrainOptions {
        cv_folds: None,
        base: TrainConfig { n_trees: 150, min_samples_leaf: 5, ..TrainConfig::default() },
        ..TrainOptions::default()
    };
    let outcome = train_and_evaluate(extracted.table(family).unwrap(), &options)?;
    println!("held-out accuracy {:.3}", outcome.test_report.unwrap().accuracy);

    let report = classify_network(&outcome.model, &ingested.record, &FeatureSet::single(family), &edges.display().to_string())?;
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
    Ok(())
}
