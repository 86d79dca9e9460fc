//! Every method side by side on one instance.

use transit_tree::baselines::Method;
use transit_tree::{compare, generate_synthetic, SolverConfig};

fn main() -> transit_tree::Result<()> {
    let city = generate_synthetic(30, 3, 21)?;
    let methods = [
        Method::Mst,
        Method::Mdst,
        Method::LinkSwapping,
        Method::LinkDeletion,
        Method::Tabu,
    ];
    let config = SolverConfig { phi: 1000, psi: 5, ..Default::default() };
    let report = compare(&city, &methods, &config)?;

    for row in &report.rows {
        println!("{:<34} {:>14.0}  {:>8.3} s", row.label, row.z, row.wall_time_s);
    }
    for method in [Method::Tabu, Method::LinkSwapping, Method::LinkDeletion] {
        for reference in [Method::Mst, Method::Mdst] {
            if let Some(change) = report.delta(method, reference) {
                println!("{} vs {}: {:+.2}%", method.key(), reference.key(), change * 100.0);
            }
        }
    }
    Ok(())
}
