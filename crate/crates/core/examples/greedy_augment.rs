//! Adding links beyond the tree, one at a time, and how close each step
//! gets to the all-direct-links lower bound.

use transit_tree::{
    augment, demand_weighted_lower_bound, generate_synthetic, lower_bound_gap_trace, solve,
    Network, SolverConfig,
};

fn main() -> transit_tree::Result<()> {
    let city = generate_synthetic(60, 3, 2)?;
    let tree = solve(&city, &SolverConfig { phi: 1500, ..Default::default() })?.best_tree;
    let aug = augment(&Network::from_tree(&tree), &city, 20)?;
    let td = demand_weighted_lower_bound(city.demand(), city.distances())?;

    println!("lower bound: {td:.0}");
    for (step, ratio) in lower_bound_gap_trace(&aug, td).iter().enumerate() {
        let link = step
            .checked_sub(1)
            .map(|k| aug.added[k].to_string())
            .unwrap_or_else(|| "tree".into());
        println!("{step:>3} {link:>9} z = {:>12.0}  bound/z = {ratio:.4}", aug.z[step]);
    }
    Ok(())
}
