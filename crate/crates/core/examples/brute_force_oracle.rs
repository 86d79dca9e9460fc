//! Exhaustive enumeration as a check on the tabu search for small instances.

use transit_tree::{brute_force_optimum, generate_synthetic, solve, SolverConfig};

fn main() -> transit_tree::Result<()> {
    let mut exact = 0;
    for seed in 0..10 {
        let city = generate_synthetic(7, 2, seed)?;
        let (tree, optimum) = brute_force_optimum(&city, false)?;
        let found = solve(&city, &SolverConfig { phi: 300, psi: 3, ..Default::default() })?;
        exact += usize::from(found.best_z == optimum);
        println!(
            "seed {seed}: optimum {optimum:>10.0}  tabu {:>10.0}  optimal tree {:?}",
            found.best_z,
            tree.edges().iter().map(|e| e.to_string()).collect::<Vec<_>>()
        );
    }
    println!("tabu search found the optimum on {exact}/10 instances");

    let larger = generate_synthetic(12, 2, 0)?;
    match brute_force_optimum(&larger, false) {
        Err(e) => println!("12 stations without force: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
