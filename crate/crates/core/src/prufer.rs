//! Prüfer codec for labelled trees. Sequences of length `n - 2` over `0..n`
//! are in bijection with the `n^(n-2)` spanning trees of the complete graph,
//! which makes exhaustive enumeration straightforward for small `n`.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::tree::{Edge, SpanningTree};

/// Decodes a sequence of length `n - 2` into the tree on `n` stations.
pub fn prufer_decode(seq: &[usize]) -> Result<SpanningTree> {
    let n = seq.len() + 2;
    if let Some(&label) = seq.iter().find(|&&x| x >= n) {
        return Err(Error::PruferLabel { label, n });
    }
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&x| degree[x] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push(Edge::new(leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.push(Reverse(x));
        }
    }
    let Reverse(a) = leaves.pop().expect("two leaves remain");
    let Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push(Edge::new(a, b));
    SpanningTree::from_edges(n, edges)
}

/// Encodes a tree as its Prüfer sequence.
pub fn prufer_encode(tree: &SpanningTree) -> Vec<usize> {
    let n = tree.n();
    let mut degree: Vec<usize> = (0..n).map(|x| tree.degree(x)).collect();
    let mut removed = vec![false; n];
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&x| degree[x] == 1).map(Reverse).collect();
    let mut seq = Vec::with_capacity(n.saturating_sub(2));
    while seq.len() + 2 < n {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        removed[leaf] = true;
        let parent = tree
            .neighbors(leaf)
            .iter()
            .copied()
            .find(|&y| !removed[y])
            .expect("leaf has one live neighbor");
        seq.push(parent);
        degree[parent] -= 1;
        if degree[parent] == 1 {
            leaves.push(Reverse(parent));
        }
    }
    seq
}

/// Iterates over every labelled tree on `n` stations (`n >= 2`), in
/// lexicographic order of their Prüfer sequences.
pub fn all_trees(n: usize) -> AllTrees {
    assert!(n >= 2, "need at least 2 stations");
    AllTrees {
        n,
        seq: vec![0; n - 2],
        done: false,
    }
}

pub struct AllTrees {
    n: usize,
    seq: Vec<usize>,
    done: bool,
}

impl Iterator for AllTrees {
    type Item = SpanningTree;

    fn next(&mut self) -> Option<SpanningTree> {
        if self.done {
            return None;
        }
        let tree = prufer_decode(&self.seq).expect("labels in range");
        // odometer increment, last position fastest
        self.done = true;
        for slot in self.seq.iter_mut().rev() {
            *slot += 1;
            if *slot < self.n {
                self.done = false;
                break;
            }
            *slot = 0;
        }
        Some(tree)
    }
}
