//! The link-swap move: cut a tree link, list the reconnections, and price
//! each one without recomputing every path.

use transit_tree::tree::reconnect_counts;
use transit_tree::{
    apply_swap, count_swap_pairs, generate_synthetic, incremental_swap_objective, mst, objective,
    reconnect_candidates, split_tree, tree_pair_distances,
};

fn main() -> transit_tree::Result<()> {
    let city = generate_synthetic(12, 2, 8)?;
    let (t, d) = (city.distances(), city.demand());
    let tree = mst(&city)?;
    let cached = tree_pair_distances(&tree, t);
    println!("z = {:.0}, {} swap pairs in total", objective(&cached, d)?, count_swap_pairs(&tree));
    for (a, k) in reconnect_counts(&tree) {
        println!("  cut {a}: {k} reconnections");
    }

    let a = tree.edges()[tree.edges().len() / 2];
    let (small, large) = split_tree(&tree, a)?;
    println!("cutting {a} leaves {:?} and {} others", small.members(), large.size());
    let mut priced = Vec::new();
    for b in reconnect_candidates(&small, &large)? {
        priced.push((incremental_swap_objective(&tree, a, b, &cached, t, d)?, b));
    }
    priced.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (z, b) = priced[0];
    let swapped = apply_swap(&tree, a, b)?;
    let check = objective(&tree_pair_distances(&swapped, t), d)?;
    println!("best reconnection {b}: z = {z:.0} (recomputed {check:.0})");
    Ok(())
}
