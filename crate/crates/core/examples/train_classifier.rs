//! Generates a small dataset, extracts static and dynamic features, and
//! compares held-out accuracy of the three feature sets.
//!
//!     cargo run --release --example train_classifier -- 40 2000

use ctbp_select::dynamic::CohortSpec;
use ctbp_select::gbdt::{FeatureTable, TrainConfig};
use ctbp_select::pipeline::{extract_features, generate_dataset, train_and_evaluate, FeatureFamily, RunSpec, TrainOptions};

fn main() -> ctbp_select::Result<()> {
    let mut args = std::env::args().skip(1);
    let per_class: usize = args.next().map(|a| a.parse().expect("networks per class")).unwrap_or(40);
    let size: usize = args.next().map(|a| a.parse().expect("vertex count")).unwrap_or(2000);
    let tmp = tempfile::tempdir().expect("temporary directory");
    let dir = tmp.path().to_path_buf();
    let manifest = generate_dataset(&RunSpec {
        networks_per_class: per_class,
        target_size: size,
        master_seed: 11,
        ..RunSpec::new(&dir)
    })?;
    let time = FeatureFamily::Dynamic(CohortSpec::time_default());
    let extracted = extract_features(&manifest, &dir, &[FeatureFamily::Static, time], 0)?;

    let options = TrainOptions {
        cv_folds: Some(3),
        base: TrainConfig { min_samples_leaf: 5, ..TrainConfig::default() },
        ..TrainOptions::default()
    };
    let tables: [(&str, &FeatureTable); 3] = [
        ("static", extracted.table(FeatureFamily::Static).unwrap()),
        ("dynamic", extracted.table(time).unwrap()),
        ("joined", &extracted.joined),
    ];
    for (name, table) in tables {
        let out = train_and_evaluate(table, &options)?;
        let report = out.test_report.unwrap();
        println!("{name:<8} {} columns, held-out accuracy {:.3}", table.width(), report.accuracy);
        if name == "joined" {
            println!("confusion (rows true, columns predicted):\n{}", report.confusion_csv());
        }
    }
    Ok(())
}
