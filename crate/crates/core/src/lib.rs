//! Transit network design on spanning trees.
//!
//! Given stations, link distances and an origin-destination demand matrix,
//! find a spanning tree that minimizes total passenger-kilometres. The
//! crate provides the link-swap tabu search, minimum-distance and
//! maximum-demand trees, two greedy baselines, exhaustive enumeration for
//! small instances, and greedy link augmentation beyond the tree.
//!
//! ```
//! use transit_tree::{solve, Instance, Matrix, SolverConfig};
//!
//! let t = Matrix::from_rows(&[[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]]).unwrap();
//! let d = Matrix::from_rows(&[[0.0, 10.0, 5.0], [10.0, 0.0, 0.0], [5.0, 0.0, 0.0]]).unwrap();
//! let instance = Instance::from_matrices(t, d).unwrap();
//! let report = solve(&instance, &SolverConfig { phi: 20, psi: 2, ..Default::default() }).unwrap();
//! assert_eq!(report.best_z, 50.0);
//! ```

pub mod augment;
pub mod baselines;
pub mod cli;
pub mod error;
pub mod instance;
pub mod io;
pub mod kruskal;
pub mod matrix;
pub mod network;
pub mod objective;
pub mod prufer;
pub mod report;
pub mod synthetic;
pub mod tabu;
pub mod tree;

pub use augment::{augment, candidate_z, lower_bound_gap_trace, AugmentedNetwork};
pub use baselines::{
    brute_force_optimum, compare, heuristic_link_deletion, heuristic_link_swapping, mdst, mst,
    CompareReport, Method,
};
pub use error::{Error, Result};
pub use instance::{Coord, Instance, Station};
pub use kruskal::kruskal;
pub use matrix::Matrix;
pub use network::Network;
pub use objective::{
    budget_feasible, demand_weighted_lower_bound, detour_profile, entropy_objective,
    incremental_swap_objective, link_flows, objective, DetourProfile, LinkFlows, SwapEvaluator,
};
pub use prufer::{all_trees, prufer_decode, prufer_encode};
pub use report::{IterationRecord, SolveReport, SwapMove};
pub use synthetic::generate_synthetic;
pub use tabu::{solve, InitialTree, SolverConfig, TabuList};
pub use tree::{
    apply_swap, count_swap_pairs, reconnect_candidates, split_tree, tree_pair_distances,
    Component, Edge, PairwiseDistances, SpanningTree,
};
