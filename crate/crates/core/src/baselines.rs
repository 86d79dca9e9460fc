//! Reference methods to compare the tabu search against.
//!
//! The link-swapping and link-deletion heuristics are reimplementations that
//! keep the iteration structure of the original greedy procedures (one pass
//! over all station pairs; deletion from the complete graph down to a tree)
//! but evaluate candidates with exact shortest paths rather than the
//! original matrix-inverse machinery. Output labels them accordingly.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::kruskal::kruskal_over;
use crate::matrix::Matrix;
use crate::network::{shortest_paths_avoiding, Network};
use crate::objective::{budget_feasible, objective, SwapEvaluator};
use crate::prufer::all_trees;
use crate::report::{IterationRecord, SolveReport, SwapMove};
use crate::tabu::{self, mst_over_candidates, SolverConfig};
use crate::tree::{apply_swap, tree_pair_distances, Edge, SpanningTree};

/// Largest instance [`brute_force_optimum`] enumerates without `force`.
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Minimum total link length tree.
pub fn mst(instance: &Instance) -> Result<SpanningTree> {
    mst_over_candidates(instance)
}

/// Maximum total undirected demand on tree links (Kruskal on `-(d + dᵀ)`).
pub fn mdst(instance: &Instance) -> Result<SpanningTree> {
    let d = instance.demand();
    let weighted = instance
        .candidates()
        .into_iter()
        .map(|e| (e, -(d[(e.u, e.v)] + d[(e.v, e.u)])));
    kruskal_over(instance.n(), weighted)
}

pub fn tree_objective(instance: &Instance, tree: &SpanningTree) -> Result<f64> {
    objective(&tree_pair_distances(tree, instance.distances()), instance.demand())
}

/// Exact optimum by enumerating all `n^(n-2)` labelled trees.
///
/// Ties go to the lexicographically smallest edge list. Refuses instances
/// above [`BRUTE_FORCE_LIMIT`] stations unless `force` is set.
pub fn brute_force_optimum(instance: &Instance, force: bool) -> Result<(SpanningTree, f64)> {
    let n = instance.n();
    if n > BRUTE_FORCE_LIMIT && !force {
        return Err(Error::SizeGuard {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best: Option<(SpanningTree, f64)> = None;
    for tree in all_trees(n) {
        if tree.edges().iter().any(|&e| !instance.is_candidate(e)) {
            continue;
        }
        let z = tree_objective(instance, &tree)?;
        let better = match &best {
            None => true,
            Some((bt, bz)) => z < *bz || (z == *bz && tree.edges() < bt.edges()),
        };
        if better {
            best = Some((tree, z));
        }
    }
    best.ok_or_else(|| Error::InvalidInstance("no spanning tree uses only candidate links".into()))
}

fn static_report(method: &str, instance: &Instance, tree: SpanningTree, started: Instant) -> Result<SolveReport> {
    let z = tree_objective(instance, &tree)?;
    Ok(SolveReport {
        method: method.into(),
        best_tree: tree,
        best_z: z,
        initial_z: z,
        trace: Vec::new(),
        iterations: 0,
        wall_time_s: started.elapsed().as_secs_f64(),
        feasible: budget_feasible(z, instance.budget()),
    })
}

/// Greedy link swapping from the minimum-length tree. See
/// [`heuristic_link_swapping_from`].
pub fn heuristic_link_swapping(instance: &Instance, iterations: Option<usize>) -> Result<SolveReport> {
    heuristic_link_swapping_from(instance, mst(instance)?, iterations)
}

/// Visits every candidate station pair once, in lexicographic order. For a
/// pair not already linked, tries inserting its link together with removing
/// each link on the current tree path between the two stations, and keeps
/// the best exchange if it strictly lowers the objective. A visited pair is
/// never revisited.
///
/// `iterations` caps the number of pairs visited; the default visits all
/// `n(n-1)/2`.
pub fn heuristic_link_swapping_from(
    instance: &Instance,
    start: SpanningTree,
    iterations: Option<usize>,
) -> Result<SolveReport> {
    let started = Instant::now();
    let t = instance.distances();
    let d = instance.demand();
    let dsym = d.symmetrized_sum();
    let pairs = instance.candidates();
    let limit = iterations.unwrap_or(pairs.len()).min(pairs.len());

    let mut tree = start;
    let mut c = tree_pair_distances(&tree, t);
    let mut z = objective(&c, d)?;
    let initial_z = z;
    let mut trace = Vec::with_capacity(limit);

    for (iteration, &insert) in pairs.iter().take(limit).enumerate() {
        let mut best: Option<(SwapMove, f64)> = None;
        let mut evaluated = 0;
        if !tree.contains(insert) {
            let mut path = tree.path(insert.u, insert.v);
            path.sort_unstable();
            for removed in path {
                let zc = SwapEvaluator::new(&tree, removed, &c, t, &dsym)?.evaluate(insert)?;
                evaluated += 1;
                if zc < z && best.is_none_or(|(_, bz)| zc < bz) {
                    best = Some((SwapMove::new(removed, insert), zc));
                }
            }
        }
        if let Some((mv, _)) = best {
            tree = apply_swap(&tree, mv.remove, mv.insert)?;
            c = tree_pair_distances(&tree, t);
            z = objective(&c, d)?;
        }
        trace.push(IterationRecord {
            iteration,
            current_z: z,
            best_z: z,
            chosen: best.map(|(mv, _)| mv),
            tabu_hit: false,
            aspiration: false,
            fallback: false,
            candidates: evaluated,
            elapsed_s: started.elapsed().as_secs_f64(),
        });
    }

    Ok(SolveReport {
        method: "swap".into(),
        best_tree: tree,
        best_z: z,
        initial_z,
        trace,
        iterations: limit,
        wall_time_s: started.elapsed().as_secs_f64(),
        feasible: budget_feasible(z, instance.budget()),
    })
}

/// Objective on a general network: demand times shortest-path length.
pub fn network_objective(network: &Network, t: &Matrix, d: &Matrix) -> f64 {
    let c = network.all_pairs_shortest_paths(t);
    let n = network.n();
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && d[(i, j)] != 0.0 {
                z += d[(i, j)] * c[(i, j)];
            }
        }
    }
    z
}

fn row_objective(x: usize, c: &[f64], d: &Matrix) -> f64 {
    let drow = d.row(x);
    let mut z = 0.0;
    for (y, (&dy, &cy)) in drow.iter().zip(c).enumerate() {
        if y != x && dy != 0.0 {
            z += dy * cy;
        }
    }
    z
}

/// Sources `x` with a demanded pair `(x, y)` whose shortest path may run
/// over `e`. Ties count as use, so the set errs on the large side.
fn sources_using(e: Edge, t_e: f64, c: &Matrix, d: &Matrix) -> Vec<usize> {
    let (i, j) = (e.u, e.v);
    let n = c.dim();
    let slack = |len: f64| len * (1.0 + 1e-9) + 1e-12;
    if t_e > slack(c[(i, j)]) {
        return Vec::new();
    }
    (0..n)
        .filter(|&x| {
            let (to_i, to_j) = (c[(x, i)] + t_e, c[(x, j)] + t_e);
            let (crow, drow) = (c.row(x), d.row(x));
            (0..n).any(|y| {
                y != x
                    && drow[y] != 0.0
                    && (to_i + c[(j, y)] <= slack(crow[y]) || to_j + c[(i, y)] <= slack(crow[y]))
            })
        })
        .collect()
}

/// Greedy link deletion from the complete candidate graph. Each step deletes
/// the non-bridge link whose removal gives the lowest objective (ties to the
/// smallest link) until `n - 1` links remain.
pub fn heuristic_link_deletion(instance: &Instance) -> Result<SolveReport> {
    let started = Instant::now();
    let n = instance.n();
    let t = instance.distances();
    let d = instance.demand();
    let mut network = Network::new(n, instance.candidates());
    if !network.is_connected() {
        return Err(Error::InvalidInstance(
            "candidate links do not connect all stations".into(),
        ));
    }
    let initial_z = network_objective(&network, t, d);
    let mut z;
    let mut trace = Vec::new();
    let mut scratch = vec![0.0; n];

    while network.edge_count() > n - 1 {
        let c = network.all_pairs_shortest_paths(t);
        let adj = network.adjacency();
        let row_z: Vec<f64> = (0..n).map(|x| row_objective(x, c.row(x), d)).collect();
        let bridges = network.bridges();
        let removable: Vec<Edge> = network
            .edges()
            .iter()
            .copied()
            .filter(|e| !bridges.contains(e))
            .collect();
        let mut best: Option<(Edge, f64)> = None;
        for &e in &removable {
            // only sources with a demanded shortest path through e change
            let affected = sources_using(e, t[(e.u, e.v)], &c, d);
            let zc = if affected.is_empty() {
                row_z.iter().sum()
            } else {
                let mut zc = 0.0;
                let mut next = affected.iter().peekable();
                for (x, &rz) in row_z.iter().enumerate() {
                    if next.peek() == Some(&&x) {
                        next.next();
                        shortest_paths_avoiding(&adj, t, x, e, &mut scratch);
                        zc += row_objective(x, &scratch, d);
                    } else {
                        zc += rz;
                    }
                }
                zc
            };
            if best.is_none_or(|(_, bz)| zc < bz) {
                best = Some((e, zc));
            }
        }
        let (deleted, zc) = best.expect("a graph with a cycle has a non-bridge link");
        network.remove(deleted);
        debug_assert!(network.is_connected());
        z = zc;
        trace.push(IterationRecord {
            iteration: trace.len(),
            current_z: z,
            best_z: z,
            chosen: Some(SwapMove::new(deleted, deleted)),
            tabu_hit: false,
            aspiration: false,
            fallback: false,
            candidates: removable.len(),
            elapsed_s: started.elapsed().as_secs_f64(),
        });
    }

    let tree = network.to_tree()?;
    let z = tree_objective(instance, &tree)?;
    Ok(SolveReport {
        method: "delete".into(),
        best_tree: tree,
        best_z: z,
        initial_z,
        iterations: trace.len(),
        trace,
        wall_time_s: started.elapsed().as_secs_f64(),
        feasible: budget_feasible(z, instance.budget()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mst,
    Mdst,
    Tabu,
    LinkSwapping,
    LinkDeletion,
    BruteForce,
}

impl Method {
    pub fn key(&self) -> &'static str {
        match self {
            Method::Mst => "mst",
            Method::Mdst => "mdst",
            Method::Tabu => "tabu",
            Method::LinkSwapping => "swap",
            Method::LinkDeletion => "delete",
            Method::BruteForce => "brute",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Mst => "minimum distance spanning tree",
            Method::Mdst => "maximum demand spanning tree",
            Method::Tabu => "link swapping with tabu search",
            Method::LinkSwapping => "link swapping heuristic (reimplemented)",
            Method::LinkDeletion => "link deletion heuristic (reimplemented)",
            Method::BruteForce => "exhaustive enumeration",
        }
    }

    pub fn run(&self, instance: &Instance, config: &SolverConfig) -> Result<SolveReport> {
        let started = Instant::now();
        let mut report = match self {
            Method::Mst => static_report("mst", instance, mst(instance)?, started)?,
            Method::Mdst => static_report("mdst", instance, mdst(instance)?, started)?,
            Method::Tabu => tabu::solve(instance, config)?,
            Method::LinkSwapping => heuristic_link_swapping(instance, None)?,
            Method::LinkDeletion => heuristic_link_deletion(instance)?,
            Method::BruteForce => {
                let (tree, _) = brute_force_optimum(instance, false)?;
                static_report("brute", instance, tree, started)?
            }
        };
        report.method = self.key().into();
        Ok(report)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "mst" => Method::Mst,
            "mdst" => Method::Mdst,
            "tabu" => Method::Tabu,
            "swap" => Method::LinkSwapping,
            "delete" => Method::LinkDeletion,
            "brute" => Method::BruteForce,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown method '{other}' (expected mst, mdst, tabu, swap, delete or brute)"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: Method,
    pub label: &'static str,
    pub z: f64,
    pub wall_time_s: f64,
    pub iterations: usize,
    pub edges: Vec<Edge>,
}

/// Relative change `(z_method - z_reference) / z_reference`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Delta {
    pub method: Method,
    pub reference: Method,
    pub change: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub deltas: Vec<Delta>,
}

impl CompareReport {
    pub fn from_rows(rows: Vec<CompareRow>) -> Self {
        let mut deltas = Vec::new();
        for row in &rows {
            for reference in &rows {
                if row.method == reference.method {
                    continue;
                }
                deltas.push(Delta {
                    method: row.method,
                    reference: reference.method,
                    change: relative_change(row.z, reference.z),
                });
            }
        }
        Self { rows, deltas }
    }

    pub fn delta(&self, method: Method, reference: Method) -> Option<f64> {
        self.deltas
            .iter()
            .find(|d| d.method == method && d.reference == reference)
            .and_then(|d| d.change)
    }

    pub fn row(&self, method: Method) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

pub fn relative_change(z: f64, reference: f64) -> Option<f64> {
    (reference != 0.0).then(|| (z - reference) / reference)
}

/// Runs each method once and tabulates objectives and pairwise changes.
pub fn compare(instance: &Instance, methods: &[Method], config: &SolverConfig) -> Result<CompareReport> {
    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let report = method.run(instance, config)?;
        rows.push(CompareRow {
            method,
            label: method.label(),
            z: report.best_z,
            wall_time_s: report.wall_time_s,
            iterations: report.iterations,
            edges: report.best_tree.edges().to_vec(),
        });
    }
    Ok(CompareReport::from_rows(rows))
}
