//! CSV/JSON ingestion and run outputs.
//!
//! Inputs:
//!
//! * nodes: `id,name,x,y` (planar, km) or `id,name,lat,lon` (geographic)
//! * demand: `origin,destination,trips`; unlisted pairs are zero, repeated
//!   pairs are summed
//! * distances (optional): `i,j,km`; pairs not listed are derived from the
//!   coordinates
//!
//! Station ids may be any integers; they are re-indexed to `0..n` in file
//! order and the original ids are kept for output.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::augment::{lower_bound_gap_trace, AugmentedNetwork};
use crate::baselines::CompareReport;
use crate::error::{Error, Result};
use crate::instance::{coordinate_distances, Coord, Instance, Station};
use crate::matrix::Matrix;
use crate::objective::{
    demand_weighted_lower_bound, detour_profile, link_flows, ratio_grid, DetourProfile,
};
use crate::report::SolveReport;
use crate::tree::{count_swap_pairs, tree_pair_distances, Edge, PairwiseDistances, SpanningTree};

/// Detour thresholds per unit of ratio in `detour.csv`.
pub const DETOUR_STEPS_PER_UNIT: u32 = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Nodes carry `lat,lon` instead of `x,y`.
    pub geographic: bool,
    /// Only pairs listed in the distances file may become links.
    pub distances_as_whitelist: bool,
}

fn data_error(path: &Path, row: usize, message: impl Into<String>) -> Error {
    Error::Data {
        path: path.display().to_string(),
        row,
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn row_of(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

#[derive(Deserialize)]
struct PlanarRow {
    id: i64,
    name: String,
    x: Option<f64>,
    y: Option<f64>,
}

#[derive(Deserialize)]
struct GeoRow {
    id: i64,
    name: String,
    lat: Option<f64>,
    lon: Option<f64>,
}

#[derive(Deserialize)]
struct DemandRow {
    origin: i64,
    destination: i64,
    trips: f64,
}

#[derive(Deserialize)]
struct DistanceRow {
    i: i64,
    j: i64,
    km: f64,
}

fn parse_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = row_of(&record);
        let parsed: T = record
            .deserialize(Some(&headers))
            .map_err(|e| data_error(path, row, e.to_string()))?;
        out.push((row, parsed));
    }
    Ok(out)
}

pub fn load_stations(path: &Path, geographic: bool) -> Result<Vec<Station>> {
    let rows: Vec<(usize, i64, String, Option<(f64, f64)>)> = if geographic {
        parse_rows::<GeoRow>(path)?
            .into_iter()
            .map(|(row, r)| (row, r.id, r.name, r.lat.zip(r.lon)))
            .collect()
    } else {
        parse_rows::<PlanarRow>(path)?
            .into_iter()
            .map(|(row, r)| (row, r.id, r.name, r.x.zip(r.y)))
            .collect()
    };
    let mut seen = BTreeSet::new();
    let mut stations = Vec::with_capacity(rows.len());
    for (row, source_id, name, pair) in rows {
        if !seen.insert(source_id) {
            return Err(data_error(path, row, format!("duplicate station id {source_id}")));
        }
        let coord = pair.map(|(a, b)| {
            if geographic {
                Coord::Geographic { lat: a, lon: b }
            } else {
                Coord::Planar { x: a, y: b }
            }
        });
        stations.push(Station {
            id: stations.len(),
            source_id,
            name,
            coord,
        });
    }
    if stations.len() < 2 {
        return Err(Error::InvalidInstance(format!(
            "{}: need at least 2 stations, got {}",
            path.display(),
            stations.len()
        )));
    }
    Ok(stations)
}

/// Reads nodes, demand and (optionally) distances into an [`Instance`].
pub fn load_instance(
    nodes_path: &Path,
    demand_path: &Path,
    distances_path: Option<&Path>,
    options: LoadOptions,
) -> Result<Instance> {
    let stations = load_stations(nodes_path, options.geographic)?;
    let n = stations.len();
    let index: HashMap<i64, usize> = stations.iter().map(|s| (s.source_id, s.id)).collect();
    let lookup = |path: &Path, row: usize, id: i64| {
        index
            .get(&id)
            .copied()
            .ok_or_else(|| data_error(path, row, format!("unknown station id {id}")))
    };

    let mut d = Matrix::zeros(n);
    for (row, r) in parse_rows::<DemandRow>(demand_path)? {
        let (o, t) = (
            lookup(demand_path, row, r.origin)?,
            lookup(demand_path, row, r.destination)?,
        );
        if !(r.trips.is_finite() && r.trips >= 0.0) {
            return Err(data_error(demand_path, row, format!("invalid trip count {}", r.trips)));
        }
        if o == t {
            if r.trips != 0.0 {
                return Err(data_error(demand_path, row, "demand from a station to itself"));
            }
            continue;
        }
        d[(o, t)] += r.trips;
    }

    let have_coords = stations.iter().all(|s| s.coord.is_some());
    let mut t = if have_coords {
        coordinate_distances(&stations)?
    } else {
        Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { f64::NAN })
    };
    let mut listed = BTreeSet::new();
    if let Some(path) = distances_path {
        for (row, r) in parse_rows::<DistanceRow>(path)? {
            let (i, j) = (lookup(path, row, r.i)?, lookup(path, row, r.j)?);
            if !(r.km.is_finite() && r.km >= 0.0) {
                return Err(data_error(path, row, format!("invalid distance {}", r.km)));
            }
            if i == j {
                if r.km != 0.0 {
                    return Err(data_error(path, row, "non-zero distance from a station to itself"));
                }
                continue;
            }
            t[(i, j)] = r.km;
            t[(j, i)] = r.km;
            listed.insert(Edge::new(i, j));
        }
    }
    if let Some(e) = crate::tree::all_pairs(n).find(|e| t[(e.u, e.v)].is_nan()) {
        return Err(Error::InvalidInstance(format!(
            "no distance between stations {} and {}: list it or give coordinates",
            stations[e.u].source_id, stations[e.v].source_id
        )));
    }

    let whitelist = (options.distances_as_whitelist && distances_path.is_some()).then_some(listed);
    Instance::new(stations, t, d)?.with_candidate_links(whitelist)
}

/// Writes `nodes.csv`, `demand.csv` and `distances.csv` so that
/// [`load_instance`] reads back the same instance.
pub fn write_instance(instance: &Instance, dir: &Path) -> Result<[PathBuf; 3]> {
    fs::create_dir_all(dir)?;
    let geographic = instance.is_geographic();
    let nodes = dir.join("nodes.csv");
    let mut w = csv::Writer::from_path(&nodes)?;
    if geographic {
        w.write_record(["id", "name", "lat", "lon"])?;
    } else {
        w.write_record(["id", "name", "x", "y"])?;
    }
    for s in instance.stations() {
        let (a, b) = match s.coord {
            Some(Coord::Planar { x, y }) => (x.to_string(), y.to_string()),
            Some(Coord::Geographic { lat, lon }) => (lat.to_string(), lon.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([s.source_id.to_string(), s.name.clone(), a, b])?;
    }
    w.flush()?;

    let demand = dir.join("demand.csv");
    let mut w = csv::Writer::from_path(&demand)?;
    w.write_record(["origin", "destination", "trips"])?;
    let src = |i: usize| instance.stations()[i].source_id.to_string();
    let n = instance.n();
    for i in 0..n {
        for j in 0..n {
            let trips = instance.demand()[(i, j)];
            if i != j && trips != 0.0 {
                w.write_record([src(i), src(j), trips.to_string()])?;
            }
        }
    }
    w.flush()?;

    let distances = dir.join("distances.csv");
    let mut w = csv::Writer::from_path(&distances)?;
    w.write_record(["i", "j", "km"])?;
    for e in instance.candidates() {
        w.write_record([src(e.u), src(e.v), instance.distances()[(e.u, e.v)].to_string()])?;
    }
    w.flush()?;
    Ok([nodes, demand, distances])
}

/// Reads a tree as `i,j` rows of source station ids (extra columns ignored),
/// e.g. a `tree_edges.csv` from an earlier run.
pub fn load_tree(path: &Path, instance: &Instance) -> Result<SpanningTree> {
    #[derive(Deserialize)]
    struct Row {
        i: i64,
        j: i64,
    }
    let index: HashMap<i64, usize> = instance
        .stations()
        .iter()
        .map(|s| (s.source_id, s.id))
        .collect();
    let mut edges = Vec::new();
    for (row, r) in parse_rows::<Row>(path)? {
        let (Some(&i), Some(&j)) = (index.get(&r.i), index.get(&r.j)) else {
            return Err(data_error(path, row, "unknown station id"));
        };
        let e = Edge::try_new(i, j).ok_or_else(|| data_error(path, row, "self-loop"))?;
        edges.push(e);
    }
    SpanningTree::from_edges(instance.n(), edges)
}

/// Everything that determines a run, echoed into its outputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub distance_mode: String,
    pub config: serde_json::Value,
    pub methods: Vec<String>,
    pub output_dir: String,
    pub seed: u64,
}

impl RunManifest {
    /// SHA-256 of the manifest's JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("manifest serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Serialize)]
struct EdgeOut<'a> {
    i: i64,
    j: i64,
    name_i: &'a str,
    name_j: &'a str,
    km: f64,
}

fn edge_out(instance: &Instance, e: Edge) -> EdgeOut<'_> {
    let (a, b) = (&instance.stations()[e.u], &instance.stations()[e.v]);
    EdgeOut {
        i: a.source_id,
        j: b.source_id,
        name_i: &a.name,
        name_j: &b.name,
        km: instance.distances()[(e.u, e.v)],
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn write_detour_csv(path: &Path, profile: &DetourProfile) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["threshold", "cum_demand_frac", "cum_pair_frac"])?;
    for ((r, cd), cp) in profile.grid.iter().zip(&profile.cum_demand).zip(&profile.cum_pairs) {
        w.write_record([r.to_string(), cd.to_string(), cp.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Detour profile on a grid reaching the largest ratio.
pub fn full_detour_profile(instance: &Instance, c: &PairwiseDistances) -> Result<DetourProfile> {
    let t = instance.distances();
    let d = instance.demand();
    let probe = detour_profile(c, t, d, &[])?;
    let max_ratio = probe.max_ratio();
    let grid = ratio_grid(if max_ratio.is_nan() { 1.0 } else { max_ratio }, DETOUR_STEPS_PER_UNIT);
    detour_profile(c, t, d, &grid)
}

/// Writes `summary.json`, `trace.csv`, `detour.csv`, `tree_edges.csv` and,
/// for geographic instances, `edges.geojson` into `dir`.
pub fn write_outputs(
    report: &SolveReport,
    instance: &Instance,
    manifest: &RunManifest,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let hash = manifest.hash();
    let tree = &report.best_tree;
    let t = instance.distances();
    let d = instance.demand();
    let c = tree_pair_distances(tree, t);
    let flows = link_flows(tree, d)?;
    let td = demand_weighted_lower_bound(d, t)?;
    let mut written = Vec::new();

    let summary = dir.join("summary.json");
    write_json(
        &summary,
        &json!({
            "manifest": manifest,
            "manifest_hash": hash,
            "method": report.method,
            "best_z": report.best_z,
            "initial_z": report.initial_z,
            "lower_bound_td": td,
            "budget": instance.budget(),
            "feasible": report.feasible,
            "iterations": report.iterations,
            "tree_length_km": tree.weight(t),
            "swap_pairs": count_swap_pairs(tree),
            "edges": tree.edges().iter().map(|&e| edge_out(instance, e)).collect::<Vec<_>>(),
            "wall_time_s": report.wall_time_s,
        }),
    )?;
    written.push(summary);

    let trace = dir.join("trace.csv");
    let mut w = csv::Writer::from_path(&trace)?;
    w.write_record(["iteration", "current_z", "best_z", "elapsed_s", "tabu_hit"])?;
    for rec in &report.trace {
        w.write_record([
            rec.iteration.to_string(),
            rec.current_z.to_string(),
            rec.best_z.to_string(),
            format!("{:.6}", rec.elapsed_s),
            rec.tabu_hit.to_string(),
        ])?;
    }
    w.flush()?;
    written.push(trace);

    let detour = dir.join("detour.csv");
    write_detour_csv(&detour, &full_detour_profile(instance, &c)?)?;
    written.push(detour);

    let edges = dir.join("tree_edges.csv");
    let mut w = csv::Writer::from_path(&edges)?;
    w.write_record(["i", "j", "name_i", "name_j", "km", "flow_ij", "flow_ji"])?;
    for link in flows.links() {
        let e = edge_out(instance, link.edge);
        w.write_record([
            e.i.to_string(),
            e.j.to_string(),
            e.name_i.to_string(),
            e.name_j.to_string(),
            e.km.to_string(),
            link.forward.to_string(),
            link.backward.to_string(),
        ])?;
    }
    w.flush()?;
    written.push(edges);

    if instance.is_geographic() {
        let path = dir.join("edges.geojson");
        let features: Vec<_> = flows
            .links()
            .iter()
            .map(|link| {
                let e = link.edge;
                let pos = |x: usize| match instance.stations()[x].coord {
                    Some(Coord::Geographic { lat, lon }) => json!([lon, lat]),
                    _ => json!(null),
                };
                let out = edge_out(instance, e);
                json!({
                    "type": "Feature",
                    "geometry": { "type": "LineString", "coordinates": [pos(e.u), pos(e.v)] },
                    "properties": {
                        "i": out.i,
                        "j": out.j,
                        "name_i": out.name_i,
                        "name_j": out.name_j,
                        "km": out.km,
                        "flow_ij": link.forward,
                        "flow_ji": link.backward,
                        "demand": d[(e.u, e.v)] + d[(e.v, e.u)],
                    }
                })
            })
            .collect();
        write_json(
            &path,
            &json!({
                "type": "FeatureCollection",
                "manifest_hash": hash,
                "features": features,
            }),
        )?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `augment.json`, `augment.csv` (one row per step),
/// `network_edges.csv` and `detour.csv` for the augmented network.
pub fn write_augment_outputs(
    aug: &AugmentedNetwork,
    instance: &Instance,
    manifest: &RunManifest,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let t = instance.distances();
    let td = demand_weighted_lower_bound(instance.demand(), t)?;
    let ratios = lower_bound_gap_trace(aug, td);
    let mut written = Vec::new();

    let summary = dir.join("augment.json");
    write_json(
        &summary,
        &json!({
            "manifest": manifest,
            "manifest_hash": manifest.hash(),
            "alpha": aug.alpha(),
            "lower_bound_td": td,
            "z": aug.z,
            "td_over_z": ratios,
            "added": aug.added.iter().map(|&e| edge_out(instance, e)).collect::<Vec<_>>(),
        }),
    )?;
    written.push(summary);

    let steps = dir.join("augment.csv");
    let mut w = csv::Writer::from_path(&steps)?;
    w.write_record(["step", "i", "j", "z", "td_over_z"])?;
    for (step, (z, ratio)) in aug.z.iter().zip(&ratios).enumerate() {
        let (i, j) = match step.checked_sub(1).map(|k| edge_out(instance, aug.added[k])) {
            Some(e) => (e.i.to_string(), e.j.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([step.to_string(), i, j, z.to_string(), ratio.to_string()])?;
    }
    w.flush()?;
    written.push(steps);

    let edges = dir.join("network_edges.csv");
    let mut w = csv::Writer::from_path(&edges)?;
    w.write_record(["i", "j", "name_i", "name_j", "km", "added"])?;
    for &e in aug.network.edges() {
        let out = edge_out(instance, e);
        w.write_record([
            out.i.to_string(),
            out.j.to_string(),
            out.name_i.to_string(),
            out.name_j.to_string(),
            out.km.to_string(),
            aug.added.contains(&e).to_string(),
        ])?;
    }
    w.flush()?;
    written.push(edges);

    let detour = dir.join("detour.csv");
    let c = PairwiseDistances::from_matrix(aug.distances.clone());
    write_detour_csv(&detour, &full_detour_profile(instance, &c)?)?;
    written.push(detour);
    Ok(written)
}

/// Writes `compare.json` and `compare.csv`.
pub fn write_compare_outputs(
    report: &CompareReport,
    manifest: &RunManifest,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let json_path = dir.join("compare.json");
    write_json(
        &json_path,
        &json!({
            "manifest": manifest,
            "manifest_hash": manifest.hash(),
            "report": report,
        }),
    )?;
    let csv_path = dir.join("compare.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["method", "label", "z", "wall_time_s", "iterations"])?;
    for row in &report.rows {
        w.write_record([
            row.method.key().to_string(),
            row.label.to_string(),
            row.z.to_string(),
            format!("{:.6}", row.wall_time_s),
            row.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(vec![json_path, csv_path])
}
