use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tree::Edge;

/// Mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coord {
    Planar { x: f64, y: f64 },
    Geographic { lat: f64, lon: f64 },
}

impl Coord {
    /// Euclidean distance for planar pairs, great-circle distance for
    /// geographic pairs. Mixed kinds have no distance.
    pub fn distance_to(&self, other: &Coord) -> Option<f64> {
        match (*self, *other) {
            (Coord::Planar { x: x1, y: y1 }, Coord::Planar { x: x2, y: y2 }) => {
                Some((x1 - x2).hypot(y1 - y2))
            }
            (
                Coord::Geographic { lat: la1, lon: lo1 },
                Coord::Geographic { lat: la2, lon: lo2 },
            ) => Some(haversine_km(la1, lo1, la2, lo2)),
            _ => None,
        }
    }
}

fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Station {
    /// Dense index, `0..n`.
    pub id: usize,
    /// Identifier as it appeared in the input data.
    pub source_id: i64,
    pub name: String,
    pub coord: Option<Coord>,
}

/// Stations, link distances `t` (km), directed demand `d` (trips per day)
/// and an optional passenger-kilometre budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    stations: Vec<Station>,
    distances: Matrix,
    demand: Matrix,
    budget: Option<f64>,
    candidate_links: Option<BTreeSet<Edge>>,
}

impl Instance {
    pub fn new(stations: Vec<Station>, distances: Matrix, demand: Matrix) -> Result<Self> {
        let n = stations.len();
        if n < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 stations, got {n}"
            )));
        }
        for (name, m) in [("distance", &distances), ("demand", &demand)] {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
            if let Some(v) = m.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "{name} matrix has entry {v}; entries must be finite and non-negative"
                )));
            }
            if (0..n).any(|i| m[(i, i)] != 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "{name} matrix has a non-zero diagonal"
                )));
            }
        }
        if !distances.is_symmetric() {
            return Err(Error::InvalidInstance("distance matrix is not symmetric".into()));
        }
        if stations.iter().enumerate().any(|(i, s)| s.id != i) {
            return Err(Error::InvalidInstance("station ids must be 0..n in order".into()));
        }
        Ok(Self {
            stations,
            distances,
            demand,
            budget: None,
            candidate_links: None,
        })
    }

    /// Instance with generated station names `s0, s1, ...` and no coordinates.
    pub fn from_matrices(distances: Matrix, demand: Matrix) -> Result<Self> {
        let stations = (0..distances.dim())
            .map(|i| Station {
                id: i,
                source_id: i as i64,
                name: format!("s{i}"),
                coord: None,
            })
            .collect();
        Self::new(stations, distances, demand)
    }

    /// Derives `t` from station coordinates.
    pub fn from_coordinates(stations: Vec<Station>, demand: Matrix) -> Result<Self> {
        let distances = coordinate_distances(&stations)?;
        Self::new(stations, distances, demand)
    }

    pub fn with_budget(mut self, budget: Option<f64>) -> Result<Self> {
        if let Some(tau) = budget {
            if !tau.is_finite() || tau < 0.0 {
                return Err(Error::InvalidParameter(format!("budget {tau} must be non-negative")));
            }
        }
        self.budget = budget;
        Ok(self)
    }

    /// Restricts the links any method may use to `links`.
    pub fn with_candidate_links(mut self, links: Option<BTreeSet<Edge>>) -> Result<Self> {
        if let Some(links) = &links {
            if let Some(e) = links.iter().find(|e| e.v >= self.n()) {
                return Err(Error::InvalidInstance(format!("candidate link {e} out of range")));
            }
        }
        self.candidate_links = links;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.stations.len()
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    /// Link distance matrix `t`.
    pub fn distances(&self) -> &Matrix {
        &self.distances
    }

    /// Directed demand matrix `d`.
    pub fn demand(&self) -> &Matrix {
        &self.demand
    }

    pub fn budget(&self) -> Option<f64> {
        self.budget
    }

    pub fn candidate_links(&self) -> Option<&BTreeSet<Edge>> {
        self.candidate_links.as_ref()
    }

    pub fn is_candidate(&self, e: Edge) -> bool {
        self.candidate_links.as_ref().is_none_or(|set| set.contains(&e))
    }

    /// Candidate links in lexicographic order.
    pub fn candidates(&self) -> Vec<Edge> {
        match &self.candidate_links {
            Some(set) => set.iter().copied().collect(),
            None => crate::tree::all_pairs(self.n()).collect(),
        }
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.off_diagonal_sum()
    }

    pub fn is_geographic(&self) -> bool {
        self.stations
            .iter()
            .all(|s| matches!(s.coord, Some(Coord::Geographic { .. })))
    }
}

/// Pairwise distances from station coordinates.
pub fn coordinate_distances(stations: &[Station]) -> Result<Matrix> {
    let n = stations.len();
    let mut t = Matrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let (Some(a), Some(b)) = (&stations[i].coord, &stations[j].coord) else {
                return Err(Error::InvalidInstance(format!(
                    "station {} has no coordinates",
                    if stations[i].coord.is_none() { i } else { j }
                )));
            };
            let dist = a.distance_to(b).ok_or_else(|| {
                Error::InvalidInstance("mixed planar and geographic coordinates".into())
            })?;
            t[(i, j)] = dist;
            t[(j, i)] = dist;
        }
    }
    Ok(t)
}
