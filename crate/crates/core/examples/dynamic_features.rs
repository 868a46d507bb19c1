//! Computes the time-cohort and size-cohort degree-increment matrices of
//! one simulated network and prints them as grids.
//!
//!     cargo run --release --example dynamic_features -- F_expAP

use ctbp_select::dynamic::{compute_dfm, CohortSpec, DynamicFeatureMatrix};
use ctbp_select::engine::simulate_with_retries;
use ctbp_select::model::{sample_config, ModelClass, OutDegreePmf};
use ctbp_select::seed::rng_from;

fn print(m: &DynamicFeatureMatrix) {
    println!("{} (rows: arrival cohorts, columns: final-degree groups, largest first)", m.spec.label());
    for i in 1..=m.spec.s {
        let row: Vec<String> = (1..=m.spec.r).map(|j| format!("{:.4}", m.get(i, j))).collect();
        println!("  {}", row.join(" "));
    }
}

fn main() -> ctbp_select::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "F_expAP".into());
    let class: ModelClass = name.parse()?;
    let config = sample_config(class, OutDegreePmf::default_shared(), &mut rng_from(1, &[class.code() as u64]));
    println!("{}", serde_json::to_string(&config.to_json()).expect("serializable config"));
    let rec = simulate_with_retries(&config, 5000, 1000, 1, 0)?.record;
    for spec in [CohortSpec::time_default(), CohortSpec::size_default()] {
        print(&compute_dfm(&rec, &spec)?);
    }
    Ok(())
}
