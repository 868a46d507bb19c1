//! Evaluates the survival condition for a few configurations and compares it
//! with how often short runs actually survive.
//!
//!     cargo run --release --example supercriticality

use std::collections::BTreeMap;

use ctbp_select::engine::simulate;
use ctbp_select::model::{check_supercritical, ModelClass, ModelConfig, OutDegreePmf};
use ctbp_select::seed::SimRng;
use rand::SeedableRng;

fn main() -> ctbp_select::Result<()> {
    let cases: [(ModelClass, &[(&str, f64)]); 6] = [
        (ModelClass::FExpA, &[("lambda", 0.5), ("mu", 1.0), ("sigma", 1.0)]),
        (ModelClass::FExpA, &[("lambda", 1.5), ("mu", 1.0), ("sigma", 1.0)]),
        (ModelClass::FPlA, &[("x_min", 0.8), ("tau", 2.5), ("mu", 1.0), ("sigma", 1.0)]),
        (ModelClass::FPlA, &[("x_min", 0.2), ("tau", 3.0), ("mu", 1.0), ("sigma", 1.0)]),
        (ModelClass::AP, &[("a", 1.0), ("b", 1.0), ("mu", 1.0), ("sigma", 1.0)]),
        (ModelClass::FExpAP, &[("a", 1.0), ("b", 1.0), ("lambda", 3.0), ("mu", 1.0), ("sigma", 1.0)]),
    ];
    for (class, params) in cases {
        let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let config = ModelConfig::from_params(class, &map, OutDegreePmf::default_shared())?;
        let report = check_supercritical(&config);
        let survived = (0..200u64)
            .filter(|&s| simulate(&config, 2000, &mut SimRng::seed_from_u64(s), None).survived().is_some())
            .count();
        println!(
            "{:<8} {:<40} condition {:>8.4}  supercritical {:<5}  survived {survived}/200",
            class.name(),
            format!("{params:?}"),
            report.condition_value,
            report.is_supercritical
        );
    }
    Ok(())
}
