//! Prints the 36 snapshot features of a simulated network.
//!
//!     cargo run --release --example static_features -- P

use ctbp_select::engine::simulate_with_retries;
use ctbp_select::model::{sample_config, ModelClass, OutDegreePmf};
use ctbp_select::seed::rng_from;
use ctbp_select::static_features::{simplify, static_vector, STATIC_FEATURE_NAMES};

fn main() -> ctbp_select::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "P".into());
    let class: ModelClass = name.parse()?;
    let config = sample_config(class, OutDegreePmf::default_shared(), &mut rng_from(2, &[class.code() as u64]));
    let rec = simulate_with_retries(&config, 5000, 1000, 2, 0)?.record;
    let graph = simplify(&rec);
    println!(
        "{} vertices, {} directed edges, {} undirected simple edges",
        rec.num_vertices(),
        rec.num_edges(),
        graph.num_edges()
    );
    let v = static_vector(&graph);
    for (name, x) in STATIC_FEATURE_NAMES.iter().zip(v.values) {
        println!("{name:<22} {x:.6}");
    }
    if v.assortativity_degenerate {
        println!("assortativity undefined, reported as 0");
    }
    Ok(())
}
