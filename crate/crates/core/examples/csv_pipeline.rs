//! From CSV files on disk to solver outputs on disk.
//!
//! cargo run --example csv_pipeline -- [output dir]

use std::path::PathBuf;

use transit_tree::io::{load_instance, write_instance, write_outputs, LoadOptions, RunManifest};
use transit_tree::{generate_synthetic, solve, SolverConfig};

fn main() -> transit_tree::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("transit-tree-example"));
    let data = dir.join("data");
    write_instance(&generate_synthetic(30, 2, 5)?, &data)?;

    let city = load_instance(
        &data.join("nodes.csv"),
        &data.join("demand.csv"),
        Some(&data.join("distances.csv")),
        LoadOptions::default(),
    )?;
    let config = SolverConfig { phi: 500, seed: 1, ..Default::default() };
    let report = solve(&city, &config)?;

    let manifest = RunManifest {
        command: "solve".into(),
        inputs: vec![data.join("nodes.csv").display().to_string()],
        distance_mode: "file".into(),
        config: serde_json::json!({ "phi": config.phi, "psi": config.psi, "seed": config.seed }),
        methods: vec!["tabu".into()],
        output_dir: dir.join("out").display().to_string(),
        seed: config.seed,
    };
    for path in write_outputs(&report, &city, &manifest, &dir.join("out"))? {
        println!("wrote {}", path.display());
    }
    println!("run {}: z = {:.0}", manifest.hash(), report.best_z);
    Ok(())
}
