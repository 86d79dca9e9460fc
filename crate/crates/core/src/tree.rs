//! Spanning trees over a complete station graph and the link-swap surgery
//! used by every search in this crate.
//!
//! A swap removes a tree edge `a`, which cuts the tree into exactly two
//! components, and inserts an edge `b` with one endpoint in each. The result
//! is always a spanning tree again, so candidate trees never need a cycle
//! check.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Undirected station pair, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Normalizes `(i, j)` so the smaller id comes first.
    ///
    /// Panics on a self-loop.
    pub fn new(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "self-loop ({i},{i}) is not an edge");
        if i < j {
            Self { u: i, v: j }
        } else {
            Self { u: j, v: i }
        }
    }

    pub fn try_new(i: usize, j: usize) -> Option<Self> {
        (i != j).then(|| Self::new(i, j))
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

impl From<(usize, usize)> for Edge {
    fn from((i, j): (usize, usize)) -> Self {
        Edge::new(i, j)
    }
}

/// All `n(n-1)/2` pairs in lexicographic order.
pub fn all_pairs(n: usize) -> impl Iterator<Item = Edge> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| Edge { u, v }))
}

/// A spanning tree on stations `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    n: usize,
    edges: Vec<Edge>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
}

impl SpanningTree {
    /// Builds a tree from `n - 1` edges, checking that they connect all
    /// stations without a cycle.
    pub fn from_edges<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Edge>,
    {
        if n < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 stations, got {n}"
            )));
        }
        let mut edges: Vec<Edge> = edges.into_iter().map(Into::into).collect();
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTree("duplicate edge".into()));
        }
        if let Some(e) = edges.iter().find(|e| e.v >= n) {
            return Err(Error::InvalidTree(format!("edge {e} outside 0..{n}")));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "expected {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let tree = Self::assemble(n, edges);
        if tree.reachable_from(0, None).iter().any(|seen| !seen) {
            return Err(Error::InvalidTree("not connected".into()));
        }
        Ok(tree)
    }

    fn assemble(n: usize, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Self { n, edges, adjacency }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Total of `w` over the tree edges.
    pub fn weight(&self, w: &Matrix) -> f64 {
        self.edges.iter().map(|e| w[(e.u, e.v)]).sum()
    }

    /// Re-checks the tree invariants from scratch: `n - 1` distinct edges, no
    /// cycle (union-find), and every station reachable.
    pub fn check_invariants(&self) -> Result<()> {
        if self.edges.len() + 1 != self.n {
            return Err(Error::InvalidTree(format!(
                "{} edges on {} stations",
                self.edges.len(),
                self.n
            )));
        }
        let mut sets = crate::kruskal::DisjointSet::new(self.n);
        for e in &self.edges {
            if !sets.union(e.u, e.v) {
                return Err(Error::InvalidTree(format!("edge {e} closes a cycle")));
            }
        }
        if sets.count() != 1 {
            return Err(Error::InvalidTree("not connected".into()));
        }
        Ok(())
    }

    /// Stations reachable from `start` without traversing `blocked`.
    fn reachable_from(&self, start: usize, blocked: Option<Edge>) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.adjacency[x] {
                if seen[y] || blocked == Some(Edge::new(x, y)) {
                    continue;
                }
                seen[y] = true;
                stack.push(y);
            }
        }
        seen
    }

    /// Membership mask of the component containing `a.u` after removing `a`.
    pub fn cut_mask(&self, a: Edge) -> Result<Vec<bool>> {
        if !self.contains(a) {
            return Err(Error::MissingEdge(a));
        }
        Ok(self.reachable_from(a.u, Some(a)))
    }

    /// Edges on the unique tree path from `from` to `to`, in walking order.
    pub fn path(&self, from: usize, to: usize) -> Vec<Edge> {
        let mut parent = vec![usize::MAX; self.n];
        parent[from] = from;
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            if x == to {
                break;
            }
            for &y in &self.adjacency[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut x = to;
        while x != from {
            let p = parent[x];
            path.push(Edge::new(p, x));
            x = p;
        }
        path.reverse();
        path
    }

    /// For every edge, the number of stations on the side away from station 0.
    /// Returned in the same order as [`edges`](Self::edges).
    fn subtree_sizes(&self) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.n];
        let mut order = Vec::with_capacity(self.n);
        parent[0] = 0;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            order.push(x);
            for &y in &self.adjacency[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut size = vec![1usize; self.n];
        for &x in order.iter().skip(1).rev() {
            size[parent[x]] += size[x];
        }
        self.edges
            .iter()
            .map(|e| {
                let child = if parent[e.v] == e.u { e.v } else { e.u };
                size[child]
            })
            .collect()
    }
}

/// One side of a split tree. Members are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    members: Vec<usize>,
}

impl Component {
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidPartition);
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Removes `a` from `tree` and returns the two resulting components.
///
/// The smaller component comes first; on equal sizes the one holding the
/// smaller endpoint of `a` comes first.
pub fn split_tree(tree: &SpanningTree, a: Edge) -> Result<(Component, Component)> {
    let mask = tree.cut_mask(a)?;
    let (with_u, with_v): (Vec<usize>, Vec<usize>) = (0..tree.n()).partition(|&x| mask[x]);
    let first = Component { members: with_u };
    let second = Component { members: with_v };
    if second.size() < first.size() {
        Ok((second, first))
    } else {
        Ok((first, second))
    }
}

/// Every edge joining `c1` to `c2`, normalized and sorted. There are
/// `|c1| * |c2|` of them.
pub fn reconnect_candidates(c1: &Component, c2: &Component) -> Result<Vec<Edge>> {
    if c1.members.iter().any(|&x| c2.contains(x)) {
        return Err(Error::InvalidPartition);
    }
    let mut out: Vec<Edge> = c1
        .members
        .iter()
        .flat_map(|&i| c2.members.iter().map(move |&j| Edge::new(i, j)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Returns the tree with `a` removed and `b` inserted. `tree` is unchanged.
///
/// `b` must join the two components left by removing `a`; `b == a` gives
/// back an identical tree.
pub fn apply_swap(tree: &SpanningTree, a: Edge, b: Edge) -> Result<SpanningTree> {
    let mask = tree.cut_mask(a)?;
    if b.v >= tree.n || mask[b.u] == mask[b.v] {
        return Err(Error::InvalidSwap {
            remove: a,
            insert: b,
        });
    }
    let mut edges: Vec<Edge> = tree.edges.iter().copied().filter(|&e| e != a).collect();
    let pos = edges.binary_search(&b).unwrap_err();
    edges.insert(pos, b);
    Ok(SpanningTree::assemble(tree.n, edges))
}

/// Number of (removed, inserted) pairs over the whole tree:
/// the sum over tree edges of `m1 * m2`, identity reinsertions included.
pub fn count_swap_pairs(tree: &SpanningTree) -> u64 {
    let n = tree.n() as u64;
    tree.subtree_sizes()
        .into_iter()
        .map(|s| s as u64 * (n - s as u64))
        .sum()
}

/// Reconnection count `m1 * m2` for each tree edge, in edge order.
pub fn reconnect_counts(tree: &SpanningTree) -> Vec<(Edge, u64)> {
    let n = tree.n();
    tree.edges
        .iter()
        .zip(tree.subtree_sizes())
        .map(|(&e, s)| (e, (s * (n - s)) as u64))
        .collect()
}

/// Symmetric matrix of path lengths between all station pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseDistances(Matrix);

impl PairwiseDistances {
    pub fn from_matrix(m: Matrix) -> Self {
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl Index<(usize, usize)> for PairwiseDistances {
    type Output = f64;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Path length along `tree` between every pair, one traversal per source.
pub fn tree_pair_distances(tree: &SpanningTree, t: &Matrix) -> PairwiseDistances {
    let n = tree.n();
    let mut c = Matrix::zeros(n);
    let mut stack = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    for source in 0..n {
        parent.fill(usize::MAX);
        parent[source] = source;
        stack.push(source);
        let row = c.row_mut(source);
        while let Some(x) = stack.pop() {
            for &y in &tree.adjacency[x] {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    row[y] = row[x] + t[(x, y)];
                    stack.push(y);
                }
            }
        }
    }
    PairwiseDistances(c)
}
