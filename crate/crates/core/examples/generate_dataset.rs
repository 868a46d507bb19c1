//! Generates a small labeled dataset of all nine classes on every core.
//!
//!     cargo run --release --example generate_dataset -- data/small 10 1000

use std::path::PathBuf;

use ctbp_select::pipeline::{generate_dataset, RunSpec};

fn main() -> ctbp_select::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "data/small".into()));
    let per_class: usize = args.next().map(|a| a.parse().expect("networks per class")).unwrap_or(10);
    let size: usize = args.next().map(|a| a.parse().expect("vertex count")).unwrap_or(1000);
    let spec = RunSpec {
        networks_per_class: per_class,
        target_size: size,
        master_seed: 7,
        ..RunSpec::new(&dir)
    };
    let manifest = generate_dataset(&spec)?;
    for (class, count) in spec.classes.iter().zip(manifest.class_counts()) {
        let attempts: Vec<u32> = manifest.entries.iter().filter(|e| e.class == *class).map(|e| e.attempts_used).collect();
        let mean = attempts.iter().sum::<u32>() as f64 / attempts.len().max(1) as f64;
        println!("{:<8} {count} networks, mean attempts {mean:.1}", class.name());
    }
    println!("{} dropped configurations, manifest in {}", manifest.dropped.len(), dir.display());
    Ok(())
}
