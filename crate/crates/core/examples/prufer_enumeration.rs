//! Labelled trees through their Prüfer sequences.

use transit_tree::{all_trees, prufer_decode, prufer_encode};

fn main() -> transit_tree::Result<()> {
    for n in 2..=7 {
        println!("{n} stations: {} trees", all_trees(n).count());
    }
    let tree = prufer_decode(&[3, 3, 3, 4])?;
    println!("[3, 3, 3, 4] -> {:?}", tree.edges().iter().map(|e| e.to_string()).collect::<Vec<_>>());
    println!("and back: {:?}", prufer_encode(&tree));
    Ok(())
}
