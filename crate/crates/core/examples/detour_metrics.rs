//! Link loads, detour ratios and the utility objective of a solved tree.

use transit_tree::objective::ratio_grid;
use transit_tree::{
    detour_profile, entropy_objective, generate_synthetic, link_flows, solve, tree_pair_distances,
    SolverConfig,
};

fn main() -> transit_tree::Result<()> {
    let city = generate_synthetic(50, 3, 4)?;
    let report = solve(&city, &SolverConfig { phi: 1000, ..Default::default() })?;
    let (t, d) = (city.distances(), city.demand());
    let c = tree_pair_distances(&report.best_tree, t);

    let flows = link_flows(&report.best_tree, d)?;
    let mut busiest: Vec<_> = flows.links().to_vec();
    busiest.sort_by(|a, b| (b.forward + b.backward).total_cmp(&(a.forward + a.backward)));
    println!("busiest links:");
    for f in busiest.iter().take(5) {
        println!("  {} carries {:.0} / {:.0} trips", f.edge, f.forward, f.backward);
    }
    println!("sum of load x length = {:.0} = z = {:.0}", flows.weighted_total(t), report.best_z);

    let probe = detour_profile(&c, t, d, &[1.0])?;
    let grid = ratio_grid(probe.max_ratio(), 4);
    let profile = detour_profile(&c, t, d, &grid)?;
    println!("ratio  demand  pairs");
    for ((r, cd), cp) in profile.grid.iter().zip(&profile.cum_demand).zip(&profile.cum_pairs).take(12) {
        println!("{r:>5.2}  {cd:>6.3}  {cp:>5.3}");
    }

    for lambda in [0.01, 0.1] {
        println!("utility at lambda {lambda}: {:.1}", entropy_objective(&c, d, lambda)?);
    }
    Ok(())
}
