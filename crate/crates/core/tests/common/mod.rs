//! Reference implementations shared by the integration tests. Everything here
//! is written from scratch on plain vectors so the library is checked against
//! something other than itself.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transit_tree::{Edge, Instance, Matrix, SpanningTree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer grid points under the Manhattan metric; integer demand.
pub fn metric_instance(rng: &mut ChaCha8Rng, n: usize, max_demand: u32) -> Instance {
    let pts: Vec<(i64, i64)> = (0..n)
        .map(|_| (rng.random_range(0..40), rng.random_range(0..40)))
        .collect();
    let t = Matrix::from_fn(n, |i, j| {
        ((pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs()) as f64
    });
    let d = Matrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            f64::from(rng.random_range(0..=max_demand))
        }
    });
    Instance::from_matrices(t, d).unwrap()
}

/// Arbitrary positive integer lengths, not necessarily metric.
pub fn integer_matrices(rng: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    let mut t = Matrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = f64::from(rng.random_range(1..50u32));
            t[(i, j)] = v;
            t[(j, i)] = v;
        }
    }
    let d = Matrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            f64::from(rng.random_range(0..20u32))
        }
    });
    (t, d)
}

/// Random labelled tree: shuffle the labels, attach each vertex to an
/// earlier one.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> SpanningTree {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let edges: Vec<(usize, usize)> = (1..n)
        .map(|k| (order[k], order[rng.random_range(0..k)]))
        .collect();
    SpanningTree::from_edges(n, edges).unwrap()
}

pub fn path_tree(n: usize) -> SpanningTree {
    SpanningTree::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    adj
}

/// Path lengths along a tree by a depth-first walk from every vertex.
pub fn tree_paths(n: usize, edges: &[Edge], t: &Matrix) -> Vec<Vec<f64>> {
    let adj = adjacency(n, edges);
    let mut out = vec![vec![f64::NAN; n]; n];
    for s in 0..n {
        out[s][s] = 0.0;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if out[s][y].is_nan() {
                    out[s][y] = out[s][x] + t[(x, y)];
                    stack.push(y);
                }
            }
        }
    }
    out
}

pub fn objective_of(c: &[Vec<f64>], d: &Matrix) -> f64 {
    let n = c.len();
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            z += d[(i, j)] * c[i][j];
        }
    }
    z
}

pub fn tree_z(n: usize, edges: &[Edge], t: &Matrix, d: &Matrix) -> f64 {
    objective_of(&tree_paths(n, edges, t), d)
}

/// n-1 edges, no self loops, every vertex reachable from 0.
pub fn is_spanning_tree(n: usize, edges: &[Edge]) -> bool {
    if edges.len() + 1 != n || edges.iter().any(|e| e.u == e.v || e.v >= n) {
        return false;
    }
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn floyd_warshall(n: usize, edges: impl IntoIterator<Item = Edge>, t: &Matrix) -> Vec<Vec<f64>> {
    let mut c = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in edges {
        c[e.u][e.v] = c[e.u][e.v].min(t[(e.u, e.v)]);
        c[e.v][e.u] = c[e.u][e.v];
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = c[i][k] + c[k][j];
                if via < c[i][j] {
                    c[i][j] = via;
                }
            }
        }
    }
    c
}

/// Every labelled tree on `n` vertices, by filtering all (n-1)-subsets of
/// the complete edge set.
pub fn every_tree(n: usize) -> Vec<Vec<Edge>> {
    let all: Vec<Edge> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| Edge::new(i, j)))
        .collect();
    let k = n - 1;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let edges: Vec<Edge> = idx.iter().map(|&i| all[i]).collect();
        if is_spanning_tree(n, &edges) {
            out.push(edges);
        }
        let mut p = k;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            if idx[p] < all.len() - k + p {
                break;
            }
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}
