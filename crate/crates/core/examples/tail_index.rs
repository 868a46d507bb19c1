//! Hill estimates of the in-degree tail exponent at shrinking cut-offs. A
//! power-law fitness model settles near its fitness exponent; exponential
//! fitness keeps drifting upward.
//!
//!     cargo run --release --example tail_index

use std::collections::BTreeMap;

use ctbp_select::engine::simulate;
use ctbp_select::model::{ModelClass, ModelConfig, OutDegreePmf};
use ctbp_select::seed::SimRng;
use ctbp_select::stats::hill_tail_index;
use rand::SeedableRng;

fn main() -> ctbp_select::Result<()> {
    let cases: [(ModelClass, &[(&str, f64)]); 2] =
        [(ModelClass::FPl, &[("x_min", 0.8), ("tau", 2.5)]), (ModelClass::FExp, &[("lambda", 1.0)])];
    let fractions = [0.2, 0.1, 0.05, 0.025, 0.0125];
    for (class, params) in cases {
        let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let config = ModelConfig::from_params(class, &map, OutDegreePmf::default_shared())?;
        let rec = simulate(&config, 20_000, &mut SimRng::seed_from_u64(0), None).survived().expect("no aging, survives");
        let deg: Vec<f64> = rec.in_degrees().iter().map(|&d| d as f64).collect();
        let est: Vec<String> = fractions
            .iter()
            .map(|f| {
                let k = (f * deg.len() as f64) as usize;
                format!("top {:>5.2}%: {:.3}", 100.0 * f, 1.0 + hill_tail_index(&deg, k).unwrap_or(f64::NAN))
            })
            .collect();
        println!("{}\n  {}", class.name(), est.join("\n  "));
    }
    Ok(())
}
