//! Passenger-kilometre objective and the quantities derived from it.
//!
//! Demand is directed and summed over ordered pairs; path lengths are
//! symmetric. On a tree every OD pair has exactly one path, so path flows
//! equal demands and link flows follow from the cut each link induces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tree::{Edge, PairwiseDistances, SpanningTree};

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Total passenger-kilometres: `sum_{i != j} d[i][j] * c[i][j]`.
pub fn objective(c: &PairwiseDistances, d: &Matrix) -> Result<f64> {
    check_dim(c.dim(), d.dim())?;
    Ok(weighted_sum(c.matrix(), d))
}

fn weighted_sum(c: &Matrix, d: &Matrix) -> f64 {
    let n = c.dim();
    let mut z = 0.0;
    for i in 0..n {
        let (crow, drow) = (c.row(i), d.row(i));
        for j in 0..n {
            if i != j {
                z += drow[j] * crow[j];
            }
        }
    }
    z
}

/// Evaluates every reconnection of a tree after removing one link, each in
/// constant time.
///
/// With `S1`, `S2` the two sides of the cut, `D = d + dᵀ` and `b = (u, v)`,
/// `u` in `S1`:
///
/// ```text
/// Z(b) = W + t[u][v] * sum_{i in S1, j in S2} D[i][j]
///          + sum_{i in S1} c[i][u] * R[i] + sum_{j in S2} c[v][j] * Q[j]
/// ```
///
/// where `W` is the demand-weighted distance inside both sides (unchanged
/// by the swap), `R[i]` is the cross demand of `i` in `S1` and `Q[j]` that of
/// `j` in `S2`. The last two sums depend only on `u` and on `v` and are
/// tabulated once per cut.
#[derive(Clone, Debug)]
pub struct SwapEvaluator<'a> {
    removed: Edge,
    side: Vec<bool>,
    t: &'a Matrix,
    within: f64,
    cross_demand: f64,
    // indexed by station; only entries on the matching side are meaningful
    anchor_cost: Vec<f64>,
}

impl<'a> SwapEvaluator<'a> {
    /// `c` must be the path-length matrix of `tree`; `dsym` is `d + dᵀ`.
    pub fn new(
        tree: &SpanningTree,
        removed: Edge,
        c: &PairwiseDistances,
        t: &'a Matrix,
        dsym: &Matrix,
    ) -> Result<Self> {
        let n = tree.n();
        check_dim(n, c.dim())?;
        check_dim(n, t.dim())?;
        check_dim(n, dsym.dim())?;
        let side = tree.cut_mask(removed)?;

        let mut within = 0.0;
        let mut cross_demand = 0.0;
        let mut cross_by_station = vec![0.0; n];
        for i in 0..n {
            let (crow, drow) = (c.matrix().row(i), dsym.row(i));
            for j in i + 1..n {
                if side[i] == side[j] {
                    within += drow[j] * crow[j];
                } else {
                    cross_demand += drow[j];
                    cross_by_station[i] += drow[j];
                    cross_by_station[j] += drow[j];
                }
            }
        }

        let mut anchor_cost = vec![0.0; n];
        for (x, cost) in anchor_cost.iter_mut().enumerate() {
            let crow = c.matrix().row(x);
            *cost = (0..n)
                .filter(|&y| side[y] == side[x])
                .map(|y| crow[y] * cross_by_station[y])
                .sum();
        }

        Ok(Self {
            removed,
            side,
            t,
            within,
            cross_demand,
            anchor_cost,
        })
    }

    pub fn removed(&self) -> Edge {
        self.removed
    }

    /// Whether `b` joins the two sides of the cut.
    pub fn crosses(&self, b: Edge) -> bool {
        b.v < self.side.len() && self.side[b.u] != self.side[b.v]
    }

    /// Objective of the tree with `removed` replaced by `b`.
    pub fn evaluate(&self, b: Edge) -> Result<f64> {
        if !self.crosses(b) {
            return Err(Error::InvalidSwap {
                remove: self.removed,
                insert: b,
            });
        }
        Ok(self.evaluate_crossing(b))
    }

    /// As [`evaluate`](Self::evaluate) without the crossing check.
    #[inline]
    pub fn evaluate_crossing(&self, b: Edge) -> f64 {
        self.within
            + self.cross_demand * self.t[(b.u, b.v)]
            + self.anchor_cost[b.u]
            + self.anchor_cost[b.v]
    }

    /// Stations on the same side as `removed.u`.
    pub fn side_mask(&self) -> &[bool] {
        &self.side
    }
}

/// Objective after swapping `a` out for `b`, reusing `cached` path lengths of
/// `tree` instead of recomputing all pairs.
pub fn incremental_swap_objective(
    tree: &SpanningTree,
    a: Edge,
    b: Edge,
    cached: &PairwiseDistances,
    t: &Matrix,
    d: &Matrix,
) -> Result<f64> {
    let dsym = d.symmetrized_sum();
    SwapEvaluator::new(tree, a, cached, t, &dsym)?.evaluate(b)
}

/// Utility-style objective `sum_w d_w ln sum_p exp(-lambda * len_p)`.
///
/// Each pair contributes through a log-sum-exp over its paths. A tree has a
/// single path per pair, so the value is exactly `-lambda * Z`.
pub fn entropy_objective(c: &PairwiseDistances, d: &Matrix, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    check_dim(c.dim(), d.dim())?;
    let n = c.dim();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && d[(i, j)] != 0.0 {
                total += d[(i, j)] * log_sum_exp(&[-lambda * c[(i, j)]]);
            }
        }
    }
    Ok(total)
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.len() == 1 || !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Passenger flow in both directions of one tree link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinkFlow {
    pub edge: Edge,
    /// Passengers travelling `edge.u -> edge.v`.
    pub forward: f64,
    /// Passengers travelling `edge.v -> edge.u`.
    pub backward: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkFlows {
    links: Vec<LinkFlow>,
}

impl LinkFlows {
    pub fn links(&self) -> &[LinkFlow] {
        &self.links
    }

    /// Flow on the directed link `from -> to`, if it is a tree link.
    pub fn get(&self, from: usize, to: usize) -> Option<f64> {
        let e = Edge::try_new(from, to)?;
        let idx = self.links.binary_search_by(|l| l.edge.cmp(&e)).ok()?;
        let link = &self.links[idx];
        Some(if from == e.u { link.forward } else { link.backward })
    }

    /// `sum t * x` over directed links.
    pub fn weighted_total(&self, t: &Matrix) -> f64 {
        self.links
            .iter()
            .map(|l| t[(l.edge.u, l.edge.v)] * (l.forward + l.backward))
            .sum()
    }
}

/// Link flows on `tree`: the flow `u -> v` is all demand from `u`'s side of
/// the link to `v`'s side.
pub fn link_flows(tree: &SpanningTree, d: &Matrix) -> Result<LinkFlows> {
    let n = tree.n();
    check_dim(n, d.dim())?;
    let mut links = Vec::with_capacity(n - 1);
    for &e in tree.edges() {
        let side = tree.cut_mask(e)?;
        let (mut forward, mut backward) = (0.0, 0.0);
        for p in 0..n {
            for q in 0..n {
                if side[p] && !side[q] {
                    forward += d[(p, q)];
                    backward += d[(q, p)];
                }
            }
        }
        links.push(LinkFlow {
            edge: e,
            forward,
            backward,
        });
    }
    Ok(LinkFlows { links })
}

/// `z <= tau`, or true when no budget is set.
pub fn budget_feasible(z: f64, tau: Option<f64>) -> bool {
    tau.is_none_or(|tau| z <= tau)
}

/// `sum_{i != j} d[i][j] * t[i][j]`: the objective if every pair had a
/// direct link.
pub fn demand_weighted_lower_bound(d: &Matrix, t: &Matrix) -> Result<f64> {
    check_dim(d.dim(), t.dim())?;
    Ok(weighted_sum(t, d))
}

/// Detour ratio of one ordered OD pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairRatio {
    pub origin: usize,
    pub destination: usize,
    /// Path length over direct link length.
    pub ratio: f64,
    pub demand: f64,
}

/// Cumulative distributions of the detour ratio, weighted by demand and by
/// OD-pair count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetourProfile {
    pub pairs: Vec<PairRatio>,
    pub grid: Vec<f64>,
    /// Fraction of total demand with ratio at most each threshold.
    pub cum_demand: Vec<f64>,
    /// Fraction of OD pairs with ratio at most each threshold.
    pub cum_pairs: Vec<f64>,
    /// Ordered pairs skipped because their direct distance is zero.
    pub excluded_pairs: usize,
    pub total_demand: f64,
}

impl DetourProfile {
    pub fn max_ratio(&self) -> f64 {
        self.pairs.iter().map(|p| p.ratio).fold(f64::NAN, f64::max)
    }

    /// Demand on pairs whose ratio is at most `threshold`.
    pub fn demand_within(&self, threshold: f64) -> f64 {
        self.pairs
            .iter()
            .filter(|p| p.ratio <= threshold)
            .map(|p| p.demand)
            .sum()
    }

    /// Demand on pairs whose ratio exceeds `threshold`.
    pub fn demand_above(&self, threshold: f64) -> f64 {
        self.pairs
            .iter()
            .filter(|p| p.ratio > threshold)
            .map(|p| p.demand)
            .sum()
    }
}

/// Thresholds `1, 1 + 1/k, 1 + 2/k, ...` up to the first one at or above
/// `max_ratio`.
pub fn ratio_grid(max_ratio: f64, steps_per_unit: u32) -> Vec<f64> {
    let k = f64::from(steps_per_unit.max(1));
    let mut grid = Vec::new();
    let mut step = 0u32;
    loop {
        let r = (k + f64::from(step)) / k;
        grid.push(r);
        if r >= max_ratio || !max_ratio.is_finite() {
            break;
        }
        step += 1;
    }
    grid
}

pub fn detour_profile(
    c: &PairwiseDistances,
    t: &Matrix,
    d: &Matrix,
    grid: &[f64],
) -> Result<DetourProfile> {
    let n = c.dim();
    check_dim(n, t.dim())?;
    check_dim(n, d.dim())?;
    let mut pairs = Vec::new();
    let mut excluded_pairs = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if t[(i, j)] == 0.0 {
                excluded_pairs += 1;
                continue;
            }
            pairs.push(PairRatio {
                origin: i,
                destination: j,
                ratio: c[(i, j)] / t[(i, j)],
                demand: d[(i, j)],
            });
        }
    }

    let total_demand: f64 = pairs.iter().map(|p| p.demand).sum();
    let demand_pairs: Vec<&PairRatio> = pairs.iter().filter(|p| p.demand > 0.0).collect();
    let mut cum_demand = Vec::with_capacity(grid.len());
    let mut cum_pairs = Vec::with_capacity(grid.len());
    for &r in grid {
        let within: f64 = demand_pairs
            .iter()
            .filter(|p| p.ratio <= r)
            .map(|p| p.demand)
            .sum();
        cum_demand.push(if total_demand > 0.0 {
            within / total_demand
        } else {
            1.0
        });
        let count = pairs.iter().filter(|p| p.ratio <= r).count();
        cum_pairs.push(if pairs.is_empty() {
            1.0
        } else {
            count as f64 / pairs.len() as f64
        });
    }

    Ok(DetourProfile {
        pairs,
        grid: grid.to_vec(),
        cum_demand,
        cum_pairs,
        excluded_pairs,
        total_demand,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{apply_swap, tree_pair_distances};

    fn inst3() -> (Matrix, Matrix) {
        let t = Matrix::from_rows(&[[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]]).unwrap();
        let d =
            Matrix::from_rows(&[[0.0, 10.0, 5.0], [10.0, 0.0, 0.0], [5.0, 0.0, 0.0]]).unwrap();
        (t, d)
    }

    fn tree(n: usize, edges: &[(usize, usize)]) -> SpanningTree {
        SpanningTree::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn z_of(tr: &SpanningTree, t: &Matrix, d: &Matrix) -> f64 {
        objective(&tree_pair_distances(tr, t), d).unwrap()
    }

    #[test]
    fn objective_inst3() {
        let (t, d) = inst3();
        assert_eq!(z_of(&tree(3, &[(0, 1), (1, 2)]), &t, &d), 50.0);
        assert_eq!(z_of(&tree(3, &[(1, 2), (0, 2)]), &t, &d), 130.0);
        assert_eq!(z_of(&tree(3, &[(1, 2), (0, 2)]), &t, &Matrix::zeros(3)), 0.0);
    }

    #[test]
    fn objective_dimension_mismatch() {
        let (t, _) = inst3();
        let c = tree_pair_distances(&tree(3, &[(0, 1), (1, 2)]), &t);
        assert!(matches!(
            objective(&c, &Matrix::zeros(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn incremental_on_path() {
        let t = Matrix::from_fn(4, |i, j| (i as f64 - j as f64).abs());
        let mut d = Matrix::zeros(4);
        d[(0, 3)] = 100.0;
        d[(3, 0)] = 100.0;
        d[(0, 1)] = 1.0;
        d[(1, 0)] = 1.0;
        let path = tree(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = tree_pair_distances(&path, &t);
        let (a, b) = (Edge::new(1, 2), Edge::new(0, 3));
        let inc = incremental_swap_objective(&path, a, b, &c, &t, &d).unwrap();
        assert_eq!(inc, 602.0);
        let full = z_of(&apply_swap(&path, a, b).unwrap(), &t, &d);
        assert_eq!(inc, full);
    }

    #[test]
    fn incremental_identity_and_inst3() {
        let (t, d) = inst3();
        let tr = tree(3, &[(1, 2), (0, 2)]);
        let c = tree_pair_distances(&tr, &t);
        let a = Edge::new(1, 2);
        assert_eq!(incremental_swap_objective(&tr, a, a, &c, &t, &d).unwrap(), 130.0);
        let z = incremental_swap_objective(&tr, a, Edge::new(0, 1), &c, &t, &d).unwrap();
        assert_eq!(z, 50.0);
        assert_eq!(z, z_of(&tree(3, &[(0, 1), (0, 2)]), &t, &d));
    }

    #[test]
    fn incremental_rejects_non_crossing() {
        let (t, d) = inst3();
        let tr = tree(3, &[(0, 1), (1, 2)]);
        let c = tree_pair_distances(&tr, &t);
        let err = incremental_swap_objective(&tr, Edge::new(0, 1), Edge::new(1, 2), &c, &t, &d);
        assert!(matches!(err, Err(Error::InvalidSwap { .. })));
        let err = incremental_swap_objective(&tr, Edge::new(0, 2), Edge::new(0, 1), &c, &t, &d);
        assert!(matches!(err, Err(Error::MissingEdge(_))));
    }

    #[test]
    fn entropy_is_negative_lambda_z() {
        let (t, d) = inst3();
        let c = tree_pair_distances(&tree(3, &[(0, 1), (1, 2)]), &t);
        assert_eq!(entropy_objective(&c, &d, 2.0).unwrap(), -100.0);
        assert_eq!(entropy_objective(&c, &d, 1.0).unwrap(), -50.0);
        assert!(entropy_objective(&c, &d, 0.0).is_err());
        assert!(entropy_objective(&c, &d, -1.0).is_err());
    }

    #[test]
    fn log_sum_exp_multi_term() {
        let v = log_sum_exp(&[0.0, 0.0]);
        assert!((v - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[-3.0]), -3.0);
    }

    #[test]
    fn flows_inst3() {
        let (t, d) = inst3();
        let tr = tree(3, &[(0, 1), (1, 2)]);
        let x = link_flows(&tr, &d).unwrap();
        assert_eq!(x.get(0, 1), Some(15.0));
        assert_eq!(x.get(1, 0), Some(15.0));
        assert_eq!(x.get(1, 2), Some(5.0));
        assert_eq!(x.get(2, 1), Some(5.0));
        assert_eq!(x.get(0, 2), None);
        assert_eq!(x.weighted_total(&t), 50.0);

        let zero = link_flows(&tr, &Matrix::zeros(3)).unwrap();
        assert!(zero.links().iter().all(|l| l.forward == 0.0 && l.backward == 0.0));
    }

    #[test]
    fn budget_boundaries() {
        assert!(budget_feasible(50.0, Some(50.0)));
        assert!(!budget_feasible(50.0, Some(49.0)));
        assert!(budget_feasible(50.0, None));
    }

    #[test]
    fn lower_bound_inst3() {
        let (t, d) = inst3();
        assert_eq!(demand_weighted_lower_bound(&d, &t).unwrap(), 50.0);
        assert_eq!(demand_weighted_lower_bound(&Matrix::zeros(3), &t).unwrap(), 0.0);
    }

    #[test]
    fn detour_inst3() {
        let (t, d) = inst3();
        let c = tree_pair_distances(&tree(3, &[(0, 1), (1, 2)]), &t);
        let p = detour_profile(&c, &t, &d, &[1.0, 1.5]).unwrap();
        assert!(p.pairs.iter().filter(|p| p.demand > 0.0).all(|p| p.ratio == 1.0));
        assert_eq!(p.cum_demand, vec![1.0, 1.0]);

        let c = tree_pair_distances(&tree(3, &[(1, 2), (0, 2)]), &t);
        let p = detour_profile(&c, &t, &d, &ratio_grid(5.0, 10)).unwrap();
        assert_eq!(p.max_ratio(), 5.0);
        let at_1_5 = p.grid.iter().position(|&r| r == 1.5).unwrap();
        assert_eq!(p.cum_demand[at_1_5], 10.0 / 30.0);
        assert_eq!(*p.cum_demand.last().unwrap(), 1.0);
        assert_eq!(*p.cum_pairs.last().unwrap(), 1.0);
        assert_eq!(p.demand_within(1.5) + p.demand_above(1.5), 30.0);
    }

    #[test]
    fn detour_excludes_zero_distance_pairs() {
        let t = Matrix::from_rows(&[[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).unwrap();
        let c = tree_pair_distances(&tree(3, &[(0, 1), (1, 2)]), &t);
        let p = detour_profile(&c, &t, &Matrix::zeros(3), &[1.0]).unwrap();
        assert_eq!(p.excluded_pairs, 2);
        assert_eq!(p.pairs.len(), 4);
    }

    #[test]
    fn grid_reaches_max_ratio() {
        let g = ratio_grid(1.25, 10);
        assert_eq!(g.first(), Some(&1.0));
        assert_eq!(g.last(), Some(&1.3));
        assert_eq!(ratio_grid(0.9, 10), vec![1.0]);
    }
}
