//! Link Swapping with Tabu Search.
//!
//! Each iteration samples `psi` links of the current tree, evaluates every
//! reconnection of every sampled cut with [`SwapEvaluator`], and moves to
//! the cheapest swap. A swap that beats the best objective is always taken.
//! Otherwise the cheapest swap not on the tabu list is taken and recorded
//! there; the list forgets its oldest entry when full.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::time::Instant;

use log::{debug, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::kruskal::{kruskal, kruskal_over};
use crate::objective::{budget_feasible, objective, SwapEvaluator};
use crate::report::{IterationRecord, SolveReport, SwapMove};
use crate::tree::{apply_swap, tree_pair_distances, Edge, SpanningTree};

/// Capacity used when none is configured: a quarter of the station count,
/// at least one.
pub fn default_tabu_capacity(n: usize) -> usize {
    (n / 4).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialTree {
    /// Minimum-length spanning tree.
    Mst,
    /// Kruskal over random link weights drawn from the solver's RNG.
    Random,
    Given(SpanningTree),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Number of iterations.
    pub phi: usize,
    /// Links sampled for removal per iteration.
    pub psi: usize,
    /// Tabu list length; `None` picks [`default_tabu_capacity`].
    pub tabu_capacity: Option<usize>,
    pub seed: u64,
    /// Passenger-kilometre budget; falls back to the instance budget.
    pub tau: Option<f64>,
    pub init: InitialTree,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            phi: 3000,
            psi: 7,
            tabu_capacity: None,
            seed: 0,
            tau: None,
            init: InitialTree::Mst,
        }
    }
}

/// Bounded FIFO of recently executed swaps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TabuList {
    entries: VecDeque<SwapMove>,
    capacity: usize,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        Self {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    /// Appends `mv`, evicting the oldest entry when full. A zero-capacity
    /// list stays empty.
    pub fn push(&mut self, mv: SwapMove) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(mv);
    }

    pub fn contains(&self, mv: &SwapMove) -> bool {
        self.entries.contains(mv)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Oldest first.
    pub fn entries(&self) -> impl Iterator<Item = &SwapMove> {
        self.entries.iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub mv: SwapMove,
    pub z: f64,
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.z.total_cmp(&b.z).then(a.mv.cmp(&b.mv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionKind {
    /// The cheapest candidate beats the best objective (tabu or not).
    Improving,
    /// The cheapest candidate not on the tabu list.
    NonTabu,
    /// Every candidate is tabu and none improves; the cheapest is taken.
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Selection {
    pub candidate: Candidate,
    pub kind: SelectionKind,
    /// The overall cheapest candidate was on the tabu list.
    pub tabu_hit: bool,
}

/// Picks the next move. Ties on `z` go to the lexicographically smallest
/// `(remove, insert)`.
pub fn select_best_non_tabu(
    candidates: &[Candidate],
    tabu: &TabuList,
    z_star: f64,
) -> Result<Selection> {
    let best = *candidates
        .iter()
        .min_by(|a, b| candidate_order(a, b))
        .ok_or(Error::EmptyCandidates)?;
    let tabu_hit = tabu.contains(&best.mv);
    if best.z < z_star {
        return Ok(Selection {
            candidate: best,
            kind: SelectionKind::Improving,
            tabu_hit,
        });
    }
    if !tabu_hit {
        return Ok(Selection {
            candidate: best,
            kind: SelectionKind::NonTabu,
            tabu_hit,
        });
    }
    let allowed = candidates
        .iter()
        .filter(|c| !tabu.contains(&c.mv))
        .min_by(|a, b| candidate_order(a, b));
    Ok(match allowed {
        Some(&c) => Selection {
            candidate: c,
            kind: SelectionKind::NonTabu,
            tabu_hit,
        },
        None => Selection {
            candidate: best,
            kind: SelectionKind::Fallback,
            tabu_hit,
        },
    })
}

fn initial_tree(instance: &Instance, init: &InitialTree, rng: &mut ChaCha8Rng) -> Result<SpanningTree> {
    match init {
        InitialTree::Mst => mst_over_candidates(instance),
        InitialTree::Random => {
            let weighted: Vec<(Edge, f64)> = instance
                .candidates()
                .into_iter()
                .map(|e| (e, rng.random::<f64>()))
                .collect();
            kruskal_over(instance.n(), weighted)
        }
        InitialTree::Given(tree) => {
            if tree.n() != instance.n() {
                return Err(Error::DimensionMismatch {
                    expected: instance.n(),
                    found: tree.n(),
                });
            }
            if let Some(e) = tree.edges().iter().find(|&&e| !instance.is_candidate(e)) {
                return Err(Error::InvalidTree(format!("{e} is not a candidate link")));
            }
            Ok(tree.clone())
        }
    }
}

pub(crate) fn mst_over_candidates(instance: &Instance) -> Result<SpanningTree> {
    let t = instance.distances();
    match instance.candidate_links() {
        None => kruskal(instance.n(), t),
        Some(links) => kruskal_over(instance.n(), links.iter().map(|&e| (e, t[(e.u, e.v)]))),
    }
}

/// Runs the tabu search. Identical instance and config give identical
/// results apart from timing.
pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveReport> {
    let started = Instant::now();
    let n = instance.n();
    if config.phi == 0 {
        return Err(Error::InvalidParameter("phi must be at least 1".into()));
    }
    if config.psi == 0 {
        return Err(Error::InvalidParameter("psi must be at least 1".into()));
    }
    let psi = if config.psi > n - 1 {
        warn!("psi = {} exceeds the {} tree links; using {}", config.psi, n - 1, n - 1);
        n - 1
    } else {
        config.psi
    };
    let capacity = config.tabu_capacity.unwrap_or_else(|| default_tabu_capacity(n));
    let tau = config.tau.or(instance.budget());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let t = instance.distances();
    let d = instance.demand();
    let dsym = d.symmetrized_sum();

    let mut current = initial_tree(instance, &config.init, &mut rng)?;
    let mut c = tree_pair_distances(&current, t);
    let mut z = objective(&c, d)?;
    let initial_z = z;
    let mut best_tree = current.clone();
    let mut best_z = z;
    let mut tabu = TabuList::new(capacity);
    let mut trace = Vec::with_capacity(config.phi);
    let mut candidates = Vec::new();

    for iteration in 0..config.phi {
        let sampled = rand::seq::index::sample(&mut rng, n - 1, psi).into_vec();
        candidates.clear();
        for idx in sampled {
            let removed = current.edges()[idx];
            let eval = SwapEvaluator::new(&current, removed, &c, t, &dsym)?;
            let side = eval.side_mask();
            for x in (0..n).filter(|&x| side[x]) {
                for y in (0..n).filter(|&y| !side[y]) {
                    let insert = Edge::new(x, y);
                    if insert == removed || !instance.is_candidate(insert) {
                        continue;
                    }
                    candidates.push(Candidate {
                        mv: SwapMove::new(removed, insert),
                        z: eval.evaluate_crossing(insert),
                    });
                }
            }
        }

        if candidates.is_empty() {
            trace.push(IterationRecord {
                iteration,
                current_z: z,
                best_z,
                chosen: None,
                tabu_hit: false,
                aspiration: false,
                fallback: false,
                candidates: 0,
                elapsed_s: started.elapsed().as_secs_f64(),
            });
            continue;
        }

        let selection = select_best_non_tabu(&candidates, &tabu, best_z)?;
        let mv = selection.candidate.mv;
        current = apply_swap(&current, mv.remove, mv.insert)?;
        c = tree_pair_distances(&current, t);
        z = objective(&c, d)?;
        if z < best_z {
            best_z = z;
            best_tree = current.clone();
        }
        if selection.kind != SelectionKind::Improving && !tabu.contains(&mv) {
            tabu.push(mv);
        }
        if selection.kind == SelectionKind::Fallback {
            debug!("iteration {iteration}: all {} candidates tabu, moving anyway", candidates.len());
        }

        trace.push(IterationRecord {
            iteration,
            current_z: z,
            best_z,
            chosen: Some(mv),
            tabu_hit: selection.tabu_hit,
            aspiration: selection.kind == SelectionKind::Improving && selection.tabu_hit,
            fallback: selection.kind == SelectionKind::Fallback,
            candidates: candidates.len(),
            elapsed_s: started.elapsed().as_secs_f64(),
        });
    }

    Ok(SolveReport {
        method: "tabu".into(),
        best_tree,
        best_z,
        initial_z,
        trace,
        iterations: config.phi,
        wall_time_s: started.elapsed().as_secs_f64(),
        feasible: budget_feasible(best_z, tau),
    })
}
