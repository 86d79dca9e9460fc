//! General (not necessarily tree) link sets: shortest paths and bridges.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use serde::Serialize;

use crate::matrix::Matrix;
use crate::tree::{Edge, SpanningTree};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Network {
    n: usize,
    edges: BTreeSet<Edge>,
}

impl Network {
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        assert!(edges.iter().all(|e| e.v < n), "edge outside 0..{n}");
        Self { n, edges }
    }

    pub fn from_tree(tree: &SpanningTree) -> Self {
        Self::new(tree.n(), tree.edges().iter().copied())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn insert(&mut self, e: Edge) -> bool {
        assert!(e.v < self.n);
        self.edges.insert(e)
    }

    pub fn remove(&mut self, e: Edge) -> bool {
        self.edges.remove(&e)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    /// Converts to a spanning tree when the link set is one.
    pub fn to_tree(&self) -> crate::Result<SpanningTree> {
        SpanningTree::from_edges(self.n, self.edges.iter().copied())
    }

    /// Shortest-path lengths between all pairs under link lengths `t`,
    /// one Dijkstra sweep per source. Unreachable pairs are infinite.
    pub fn all_pairs_shortest_paths(&self, t: &Matrix) -> Matrix {
        let adj = self.adjacency();
        let mut out = Matrix::filled(self.n, f64::INFINITY);
        for s in 0..self.n {
            dijkstra(&adj, t, s, out.row_mut(s));
        }
        out
    }

    /// Links whose removal disconnects the network.
    pub fn bridges(&self) -> BTreeSet<Edge> {
        let adj = self.adjacency();
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut bridges = BTreeSet::new();
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // (node, parent, next neighbor index)
            let mut stack = vec![(root, usize::MAX, 0usize)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(top) = stack.last_mut() {
                let (x, parent) = (top.0, top.1);
                if top.2 < adj[x].len() {
                    let y = adj[x][top.2];
                    top.2 += 1;
                    if y == parent {
                        continue;
                    }
                    if disc[y] == usize::MAX {
                        disc[y] = timer;
                        low[y] = timer;
                        timer += 1;
                        stack.push((y, x, 0));
                    } else {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[x]);
                        if low[x] > disc[parent] {
                            bridges.insert(Edge::new(parent, x));
                        }
                    }
                }
            }
        }
        bridges
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<usize>], t: &Matrix, source: usize, dist: &mut [f64]) {
    shortest_paths_avoiding(adj, t, source, None, dist)
}

/// Single-source shortest paths that never use `skip`.
pub(crate) fn shortest_paths_avoiding(
    adj: &[Vec<usize>],
    t: &Matrix,
    source: usize,
    skip: impl Into<Option<Edge>>,
    dist: &mut [f64],
) {
    let skip = skip.into();
    dist.fill(f64::INFINITY);
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, source));
    while let Some(Entry(dx, x)) = heap.pop() {
        if dx > dist[x] {
            continue;
        }
        for &y in &adj[x] {
            if skip.is_some_and(|e| e.touches(x) && e.touches(y)) {
                continue;
            }
            let cand = dx + t[(x, y)];
            if cand < dist[y] {
                dist[y] = cand;
                heap.push(Entry(cand, y));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t3() -> Matrix {
        Matrix::from_rows(&[[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]]).unwrap()
    }

    #[test]
    fn shortest_paths_take_detour_when_shorter() {
        let mut t = t3();
        t[(0, 2)] = 10.0;
        t[(2, 0)] = 10.0;
        let net = Network::new(3, crate::tree::all_pairs(3));
        let c = net.all_pairs_shortest_paths(&t);
        assert_eq!(c[(0, 2)], 3.0);
        assert_eq!(c[(2, 0)], 3.0);
    }

    #[test]
    fn bridges_of_triangle_with_tail() {
        let net = Network::new(
            4,
            [Edge::new(0, 1), Edge::new(1, 2), Edge::new(0, 2), Edge::new(2, 3)],
        );
        assert_eq!(net.bridges(), [Edge::new(2, 3)].into());
        assert!(net.is_connected());
    }

    #[test]
    fn every_tree_edge_is_a_bridge() {
        let tree = SpanningTree::from_edges(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        let net = Network::from_tree(&tree);
        assert_eq!(net.bridges().len(), 3);
    }

    #[test]
    fn disconnected_is_reported() {
        let net = Network::new(3, [Edge::new(0, 1)]);
        assert!(!net.is_connected());
        assert!(net.all_pairs_shortest_paths(&t3())[(0, 2)].is_infinite());
    }
}
