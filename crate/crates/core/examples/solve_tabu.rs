//! Tabu search on a synthetic 111-station city.
//!
//! cargo run --release --example solve_tabu -- [seed]

use transit_tree::{generate_synthetic, mst, solve, tree_pair_distances, objective, SolverConfig};

fn main() -> transit_tree::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let city = generate_synthetic(111, 4, 7)?;
    let config = SolverConfig {
        phi: 3000,
        psi: 7,
        tabu_capacity: Some(80),
        seed,
        ..Default::default()
    };
    let report = solve(&city, &config)?;

    let start = mst(&city)?;
    let z_mst = objective(&tree_pair_distances(&start, city.distances()), city.demand())?;
    println!("minimum distance tree: {z_mst:.0} passenger-km");
    println!("tabu search:           {:.0} passenger-km", report.best_z);
    println!("change: {:+.2}% in {:.2} s", (report.best_z - z_mst) / z_mst * 100.0, report.wall_time_s);

    for rec in report.trace.iter().step_by(500) {
        println!("  iter {:>5}  current {:>12.0}  best {:>12.0}", rec.iteration, rec.current_z, rec.best_z);
    }
    let aspirations = report.trace.iter().filter(|r| r.aspiration).count();
    let fallbacks = report.trace.iter().filter(|r| r.fallback).count();
    println!("aspiration moves: {aspirations}, fallback moves: {fallbacks}");
    Ok(())
}
