//! Grows one network from a fitness + aging model and prints its degree
//! profile.
//!
//!     cargo run --release --example simulate_network -- 5000 out/F_plA

use std::collections::BTreeMap;
use std::path::PathBuf;

use ctbp_select::engine::simulate_with_retries;
use ctbp_select::model::{check_supercritical, ModelClass, ModelConfig, OutDegreePmf};

fn main() -> ctbp_select::Result<()> {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().map(|a| a.parse().expect("vertex count")).unwrap_or(5000);
    let out: Option<PathBuf> = args.next().map(PathBuf::from);

    let params: BTreeMap<String, f64> =
        [("x_min", 0.8), ("tau", 2.4), ("mu", 1.0), ("sigma", 1.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let config = ModelConfig::from_params(ModelClass::FPlA, &params, OutDegreePmf::default_shared())?;
    let report = check_supercritical(&config);
    println!("offspring mean {:.3}, supercritical {}", report.condition_value, report.is_supercritical);

    let run = simulate_with_retries(&config, size, 1000, 42, 0)?;
    let rec = &run.record;
    println!(
        "{} vertices, {} edges, final time {:.3}, survived on attempt {}",
        rec.num_vertices(),
        rec.num_edges(),
        rec.final_time,
        run.attempts_used
    );

    let mut deg = rec.in_degrees();
    deg.sort_unstable_by(|a, b| b.cmp(a));
    let isolated = deg.iter().filter(|&&d| d == 0).count();
    println!("top in-degrees {:?}", &deg[..deg.len().min(10)]);
    println!("vertices never cited {isolated} ({:.1}%)", 100.0 * isolated as f64 / deg.len() as f64);

    if let Some(dir) = out {
        for path in rec.write_dir(&dir, false)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
