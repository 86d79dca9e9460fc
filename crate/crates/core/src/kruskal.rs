use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tree::{all_pairs, Edge, SpanningTree};

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`. Returns false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn count(&self) -> usize {
        self.sets
    }
}

/// Minimum-weight spanning tree over the complete graph with weights `w`.
///
/// Edges are scanned in `(weight, u, v)` order, so ties always resolve the
/// same way.
pub fn kruskal(n: usize, w: &Matrix) -> Result<SpanningTree> {
    if w.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.dim(),
        });
    }
    kruskal_over(n, all_pairs(n).map(|e| (e, w[(e.u, e.v)])))
}

/// Minimum-weight spanning tree using only the given weighted edges.
pub fn kruskal_over<I>(n: usize, candidates: I) -> Result<SpanningTree>
where
    I: IntoIterator<Item = (Edge, f64)>,
{
    if n < 2 {
        return Err(Error::InvalidInstance(format!(
            "need at least 2 stations, got {n}"
        )));
    }
    let mut candidates: Vec<(Edge, f64)> = candidates.into_iter().collect();
    if let Some((e, _)) = candidates.iter().find(|(_, w)| !w.is_finite()) {
        return Err(Error::InvalidParameter(format!("weight of {e} is not finite")));
    }
    candidates.sort_by(|(ea, wa), (eb, wb)| wa.total_cmp(wb).then(ea.cmp(eb)));

    let mut sets = DisjointSet::new(n);
    let mut chosen = Vec::with_capacity(n - 1);
    for (e, _) in candidates {
        if sets.union(e.u, e.v) {
            chosen.push(e);
            if chosen.len() == n - 1 {
                break;
            }
        }
    }
    if chosen.len() != n - 1 {
        return Err(Error::InvalidInstance(
            "candidate links do not connect all stations".into(),
        ));
    }
    SpanningTree::from_edges(n, chosen)
}
