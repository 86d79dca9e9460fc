use serde::Serialize;

use crate::tree::{Edge, SpanningTree};

/// A link swap: `remove` leaves the tree, `insert` joins it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SwapMove {
    pub remove: Edge,
    pub insert: Edge,
}

impl SwapMove {
    pub fn new(remove: Edge, insert: Edge) -> Self {
        Self { remove, insert }
    }
}

/// One iteration of a search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub current_z: f64,
    pub best_z: f64,
    pub chosen: Option<SwapMove>,
    /// The cheapest candidate of the iteration was on the tabu list.
    pub tabu_hit: bool,
    /// A tabu move was executed because it improved the best objective.
    pub aspiration: bool,
    /// Every candidate was tabu and none improved, so the cheapest was taken anyway.
    pub fallback: bool,
    pub candidates: usize,
    pub elapsed_s: f64,
}

/// Outcome of one solution method.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub best_tree: SpanningTree,
    pub best_z: f64,
    pub initial_z: f64,
    pub trace: Vec<IterationRecord>,
    pub iterations: usize,
    pub wall_time_s: f64,
    /// Best objective is within the budget, or no budget was set.
    pub feasible: bool,
}

impl SolveReport {
    pub fn edges(&self) -> &[Edge] {
        self.best_tree.edges()
    }

    /// Equality on everything except timing fields.
    pub fn same_outcome(&self, other: &SolveReport) -> bool {
        let strip = |r: &SolveReport| {
            let mut r = r.clone();
            r.wall_time_s = 0.0;
            for rec in &mut r.trace {
                rec.elapsed_s = 0.0;
            }
            r
        };
        strip(self) == strip(other)
    }
}
