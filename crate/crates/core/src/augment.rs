//! Greedy link augmentation: starting from a tree (or an already augmented
//! network), repeatedly add the single link that lowers total
//! passenger-kilometres the most.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matrix::Matrix;
use crate::network::Network;
use crate::tree::Edge;

/// Committed additions between full shortest-path recomputations.
const REFRESH_EVERY: usize = 25;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AugmentedNetwork {
    pub base: Network,
    /// Links in the order they were added.
    pub added: Vec<Edge>,
    /// Objective before any addition, then after each one.
    pub z: Vec<f64>,
    pub network: Network,
    #[serde(skip)]
    pub distances: Matrix,
}

impl AugmentedNetwork {
    pub fn alpha(&self) -> usize {
        self.added.len()
    }

    pub fn final_z(&self) -> f64 {
        *self.z.last().expect("z holds the starting objective")
    }
}

fn demand_weighted(c: &Matrix, d: &Matrix) -> f64 {
    let n = c.dim();
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                z += d[(i, j)] * c[(i, j)];
            }
        }
    }
    z
}

/// Objective after adding link `e` of length `t_e` to a network whose
/// all-pairs shortest paths are `c`.
///
/// A single new link can only shorten a path by being on it once, so the new
/// length of `(x, y)` is the smallest of the old length and the two ways of
/// routing through `e`.
pub fn candidate_z(c: &Matrix, e: Edge, t_e: f64, d: &Matrix) -> Result<f64> {
    if !(t_e >= 0.0) {
        return Err(Error::InvalidParameter(format!("link length {t_e} is negative")));
    }
    if c.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: d.dim(),
        });
    }
    let n = c.dim();
    let (i, j) = (e.u, e.v);
    let mut z = 0.0;
    for x in 0..n {
        let drow = d.row(x);
        let crow = c.row(x);
        let via_i = crow[i] + t_e;
        let via_j = crow[j] + t_e;
        for y in 0..n {
            if x == y || drow[y] == 0.0 {
                continue;
            }
            let path = crow[y].min(via_i + c[(j, y)]).min(via_j + c[(i, y)]);
            z += drow[y] * path;
        }
    }
    Ok(z)
}

fn commit_link(c: &mut Matrix, e: Edge, t_e: f64) {
    let n = c.dim();
    let (i, j) = (e.u, e.v);
    let col_i: Vec<f64> = (0..n).map(|y| c[(i, y)]).collect();
    let col_j: Vec<f64> = (0..n).map(|y| c[(j, y)]).collect();
    for x in 0..n {
        let via_i = c[(x, i)] + t_e;
        let via_j = c[(x, j)] + t_e;
        let row = c.row_mut(x);
        for y in 0..n {
            row[y] = row[y].min(via_i + col_j[y]).min(via_j + col_i[y]);
        }
    }
}

/// Adds up to `alpha` links to `start`, each the candidate with the lowest
/// resulting objective (ties to the smallest link). `alpha` beyond the
/// number of remaining candidate links is clamped.
pub fn augment(start: &Network, instance: &Instance, alpha: usize) -> Result<AugmentedNetwork> {
    let n = instance.n();
    if start.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: start.n(),
        });
    }
    let t = instance.distances();
    let d = instance.demand();
    let mut network = start.clone();
    let mut c = network.all_pairs_shortest_paths(t);
    let mut z = vec![demand_weighted(&c, d)];
    let mut added = Vec::new();

    let remaining = instance
        .candidates()
        .into_iter()
        .filter(|&e| !network.contains(e))
        .count();
    let steps = if alpha > remaining {
        warn!("alpha = {alpha} exceeds the {remaining} links left to add; using {remaining}");
        remaining
    } else {
        alpha
    };

    for step in 1..=steps {
        let mut best: Option<(Edge, f64)> = None;
        for e in instance.candidates() {
            if network.contains(e) {
                continue;
            }
            let zc = candidate_z(&c, e, t[(e.u, e.v)], d)?;
            if best.is_none_or(|(_, bz)| zc < bz) {
                best = Some((e, zc));
            }
        }
        let Some((e, _)) = best else { break };
        network.insert(e);
        if step % REFRESH_EVERY == 0 {
            c = network.all_pairs_shortest_paths(t);
        } else {
            commit_link(&mut c, e, t[(e.u, e.v)]);
        }
        added.push(e);
        z.push(demand_weighted(&c, d));
    }

    Ok(AugmentedNetwork {
        base: start.clone(),
        added,
        z,
        network,
        distances: c,
    })
}

/// `td / z` after each step; a zero objective counts as ratio 1.
pub fn lower_bound_gap_trace(network: &AugmentedNetwork, td: f64) -> Vec<f64> {
    network
        .z
        .iter()
        .map(|&z| if z == 0.0 { 1.0 } else { td / z })
        .collect()
}
