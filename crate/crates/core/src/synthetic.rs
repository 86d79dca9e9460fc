//! Seeded synthetic cities: a few high-population hubs with stations
//! scattered around them and gravity-model demand between every pair.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::instance::{Coord, Instance, Station};
use crate::matrix::Matrix;

const CITY_SIZE_KM: f64 = 30.0;
const SPREAD_KM: f64 = 2.5;
const HUB_POPULATION: f64 = 100_000.0;
const GRAVITY: f64 = 1e-4;

fn round_m(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Generates an `n`-station planar instance around `centers` hubs.
///
/// The first `min(n, centers)` stations sit on the hubs. Demand is
/// `round(g * pop_i * pop_j / (dist + 1))`, symmetric and integral;
/// distances are Euclidean in kilometres. Same seed, same instance.
pub fn generate_synthetic(n: usize, centers: usize, seed: u64) -> Result<Instance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 stations, got {n}")));
    }
    if centers == 0 {
        return Err(Error::InvalidParameter("need at least one center".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let hubs: Vec<(f64, f64, f64)> = (0..centers)
        .map(|k| {
            let x = round_m(rng.random_range(0.0..CITY_SIZE_KM));
            let y = round_m(rng.random_range(0.0..CITY_SIZE_KM));
            // the first hub dominates, the rest taper off
            let weight = if k == 0 { 3.0 } else { rng.random_range(1.0..2.5) };
            (x, y, weight)
        })
        .collect();
    let pick = WeightedIndex::new(hubs.iter().map(|h| h.2)).expect("positive weights");
    let offset = Normal::new(0.0, SPREAD_KM).expect("positive spread");

    let mut stations = Vec::with_capacity(n);
    let mut population = Vec::with_capacity(n);
    for id in 0..n {
        let (name, x, y, pop) = if id < centers {
            let (x, y, w) = hubs[id];
            (format!("hub{id}"), x, y, HUB_POPULATION * w)
        } else {
            let (hx, hy, _) = hubs[pick.sample(&mut rng)];
            let x = round_m(hx + offset.sample(&mut rng));
            let y = round_m(hy + offset.sample(&mut rng));
            let pop = f64::from(rng.random_range(500u32..3000));
            (format!("st{id}"), x, y, pop)
        };
        stations.push(Station {
            id,
            source_id: id as i64,
            name,
            coord: Some(Coord::Planar { x, y }),
        });
        population.push(pop);
    }

    let t = crate::instance::coordinate_distances(&stations)?;
    let d = Matrix::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            let (a, b) = (i.min(j), i.max(j));
            (GRAVITY * population[a] * population[b] / (t[(a, b)] + 1.0)).round()
        }
    });
    Instance::new(stations, t, d)
}
