//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Run with `cargo test --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::Rng;
use transit_tree::io::{write_outputs, RunManifest};
use transit_tree::objective::ratio_grid;
use transit_tree::tabu::{default_tabu_capacity, select_best_non_tabu, Candidate, SelectionKind};
use transit_tree::tree::reconnect_counts;
use transit_tree::{
    all_trees, apply_swap, augment, brute_force_optimum, candidate_z, count_swap_pairs,
    demand_weighted_lower_bound, detour_profile, entropy_objective, generate_synthetic,
    incremental_swap_objective, link_flows, mdst, mst, objective, reconnect_candidates, solve,
    split_tree, tree_pair_distances, Edge, Instance, Matrix, Network, SolveReport, SolverConfig,
    SwapMove, TabuList,
};

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn inst3() -> Instance {
    let t = Matrix::from_rows(&[[0.0, 1.0, 3.0], [1.0, 0.0, 2.0], [3.0, 2.0, 0.0]]).unwrap();
    let d = Matrix::from_rows(&[[0.0, 10.0, 5.0], [10.0, 0.0, 0.0], [5.0, 0.0, 0.0]]).unwrap();
    Instance::from_matrices(t, d).unwrap()
}

fn a1_oracle_optimality(solved: &mut Vec<(Instance, SolveReport)>) -> Outcome {
    let mut rng = rng(0xA1);
    let (mut exact, mut within, mut worst) = (0, 0, 0.0f64);
    let total = 50;
    for k in 0..total {
        let n = 5 + k % 3;
        let inst = metric_instance(&mut rng, n, 30);
        let (t, d) = (inst.distances(), inst.demand());
        let oracle = every_tree(n)
            .iter()
            .map(|edges| tree_z(n, edges, t, d))
            .fold(f64::INFINITY, f64::min);
        let (_, brute) = brute_force_optimum(&inst, false).unwrap();
        if brute != oracle {
            return outcome(false, format!("enumeration disagrees on instance {k}: {brute} vs {oracle}"));
        }
        let best = (0..3)
            .map(|seed| {
                let config = SolverConfig { phi: 300, psi: 3, seed, ..Default::default() };
                solve(&inst, &config).unwrap()
            })
            .min_by(|a, b| a.best_z.total_cmp(&b.best_z))
            .unwrap();
        let gap = (best.best_z - oracle) / oracle.max(f64::MIN_POSITIVE);
        worst = worst.max(gap);
        exact += usize::from(best.best_z == oracle);
        within += usize::from(gap <= 0.02);
        solved.push((inst, best));
    }
    outcome(
        exact * 10 >= total * 9 && within == total,
        format!("{exact}/{total} exact, {within}/{total} within 2%, worst gap {:.3}%", worst * 100.0),
    )
}

fn a2_incremental_exactness() -> Outcome {
    let mut rng = rng(0xA2);
    let cases = 1000;
    for k in 0..cases {
        let n = rng.random_range(3..=50);
        let (t, d) = integer_matrices(&mut rng, n);
        let tree = random_tree(&mut rng, n);
        let a = *tree.edges().choose(&mut rng).unwrap();
        let (c1, c2) = split_tree(&tree, a).unwrap();
        let cands = reconnect_candidates(&c1, &c2).unwrap();
        let b = *cands.choose(&mut rng).unwrap();
        let cached = tree_pair_distances(&tree, &t);
        let fast = incremental_swap_objective(&tree, a, b, &cached, &t, &d).unwrap();
        let mut edges: Vec<Edge> = tree.edges().iter().copied().filter(|&e| e != a).collect();
        edges.push(b);
        let full = tree_z(n, &edges, &t, &d);
        if fast != full {
            return outcome(false, format!("case {k} (n = {n}, {a} -> {b}): {fast} != {full}"));
        }
    }
    outcome(true, format!("{cases} cases, bitwise equal"))
}

fn a3_swap_fuzz() -> Outcome {
    let mut rng = rng(0xA3);
    let cases = 10_000;
    let mut tree = random_tree(&mut rng, 12);
    for k in 0..cases {
        if k % 100 == 0 {
            let n = rng.random_range(2..=40);
            tree = random_tree(&mut rng, n);
        }
        let a = *tree.edges().choose(&mut rng).unwrap();
        let (c1, c2) = split_tree(&tree, a).unwrap();
        let b = *reconnect_candidates(&c1, &c2).unwrap().choose(&mut rng).unwrap();
        let next = apply_swap(&tree, a, b).unwrap();
        if !is_spanning_tree(next.n(), next.edges()) || next.check_invariants().is_err() {
            return outcome(false, format!("swap {k} ({a} -> {b}) broke the tree"));
        }
        if !next.contains(b) || (a != b && next.contains(a)) {
            return outcome(false, format!("swap {k} did not exchange {a} for {b}"));
        }
        tree = next;
    }
    outcome(true, format!("{cases} chained swaps valid"))
}

fn crossing_pairs(n: usize, edges: &[Edge], a: Edge) -> u64 {
    let rest: Vec<Edge> = edges.iter().copied().filter(|&e| e != a).collect();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            let mut trial = rest.clone();
            trial.push(Edge::new(i, j));
            count += u64::from(is_spanning_tree(n, &trial));
        }
    }
    count
}

fn a4_counting() -> Outcome {
    let mut rng = rng(0xA4);
    for k in 0..100 {
        let n = rng.random_range(2..=30);
        let tree = random_tree(&mut rng, n);
        let counts = reconnect_counts(&tree);
        let mut sum = 0;
        for &(a, ka) in &counts {
            let (c1, c2) = split_tree(&tree, a).unwrap();
            let listed = reconnect_candidates(&c1, &c2).unwrap().len() as u64;
            let oracle = crossing_pairs(n, tree.edges(), a);
            if listed != oracle || ka != oracle || ka != (c1.size() * c2.size()) as u64 {
                return outcome(false, format!("tree {k}: {a} gives {listed}/{ka}, expected {oracle}"));
            }
            sum += ka;
        }
        if sum != count_swap_pairs(&tree) {
            return outcome(false, format!("tree {k}: pair total {} != {sum}", count_swap_pairs(&tree)));
        }
        let bound = ((n / 2) * n.div_ceil(2)) as u64;
        if counts.iter().any(|&(_, ka)| ka > bound) {
            return outcome(false, format!("tree {k}: a cut exceeds {bound}"));
        }
    }
    for n in 2..=30 {
        let path = path_tree(n);
        let mid = Edge::new(n / 2 - 1, n / 2);
        let (c1, c2) = split_tree(&path, mid).unwrap();
        if (c1.size() * c2.size()) != (n / 2) * n.div_ceil(2) {
            return outcome(false, format!("balanced path cut on {n} stations misses the bound"));
        }
    }
    outcome(true, "100 trees, counts and bound hold; balanced path cuts attain it")
}

fn a5_kruskal() -> Outcome {
    let mut rng = rng(0xA5);
    let mut checked = 0;
    for n in 2..=7 {
        let trees: Vec<Vec<Edge>> = all_trees(n).map(|t| t.edges().to_vec()).collect();
        let expected = n.pow((n - 2) as u32);
        if trees.len() != expected || every_tree(n).len() != expected {
            return outcome(false, format!("{} trees on {n} stations, expected {expected}", trees.len()));
        }
        for _ in 0..4 {
            let (t, d) = integer_matrices(&mut rng, n);
            let inst = Instance::from_matrices(t.clone(), d.clone()).unwrap();
            let length = |e: &[Edge]| e.iter().map(|e| t[(e.u, e.v)]).sum::<f64>();
            let demand = |e: &[Edge]| e.iter().map(|e| d[(e.u, e.v)] + d[(e.v, e.u)]).sum::<f64>();
            let min_len = trees.iter().map(|e| length(e)).fold(f64::INFINITY, f64::min);
            let max_dem = trees.iter().map(|e| demand(e)).fold(f64::NEG_INFINITY, f64::max);
            if length(mst(&inst).unwrap().edges()) != min_len {
                return outcome(false, format!("minimum distance tree not minimal on {n} stations"));
            }
            if demand(mdst(&inst).unwrap().edges()) != max_dem {
                return outcome(false, format!("maximum demand tree not maximal on {n} stations"));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} instances, every tree enumerated"))
}

fn a6_identities() -> Outcome {
    let mut rng = rng(0xA6);
    for k in 0..200 {
        let n = rng.random_range(2..=25);
        let inst = metric_instance(&mut rng, n, 50);
        let (t, d) = (inst.distances(), inst.demand());
        let tree = random_tree(&mut rng, n);
        let c = tree_pair_distances(&tree, t);
        let z = objective(&c, d).unwrap();
        if z != tree_z(n, tree.edges(), t, d) {
            return outcome(false, format!("case {k}: objective disagrees with reference"));
        }
        for lambda in [0.1, 1.0, 10.0] {
            let h = entropy_objective(&c, d, lambda).unwrap();
            let expected = -lambda * z;
            if (h - expected).abs() > 1e-12 * expected.abs().max(1.0) {
                return outcome(false, format!("case {k}: utility {h} != {expected} at lambda {lambda}"));
            }
        }
        let flows = link_flows(&tree, d).unwrap().weighted_total(t);
        if flows != z {
            return outcome(false, format!("case {k}: link flow total {flows} != {z}"));
        }
        let td = demand_weighted_lower_bound(d, t).unwrap();
        if td > z {
            return outcome(false, format!("case {k}: lower bound {td} above {z}"));
        }
    }
    outcome(true, "200 trees: utility, flow total and lower bound identities exact")
}

fn a7_augmentation() -> Outcome {
    let mut rng = rng(0xA7);
    for k in 0..20 {
        let n = rng.random_range(3..=15);
        let inst = metric_instance(&mut rng, n, 30);
        let start = Network::from_tree(&random_tree(&mut rng, n));
        let aug = augment(&start, &inst, n * (n - 1) / 2).unwrap();
        if aug.z.windows(2).any(|w| w[1] > w[0]) {
            return outcome(false, format!("case {k}: objective trace increases"));
        }
        let td = demand_weighted_lower_bound(inst.demand(), inst.distances()).unwrap();
        if aug.network.edge_count() != n * (n - 1) / 2 || aug.final_z() != td {
            return outcome(false, format!("case {k}: complete network gives {} not {td}", aug.final_z()));
        }
    }
    for k in 0..100 {
        let n = rng.random_range(3..=20);
        let (t, d) = integer_matrices(&mut rng, n);
        let mut net = Network::from_tree(&random_tree(&mut rng, n));
        for _ in 0..rng.random_range(0..n) {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            if i != j {
                net.insert(Edge::new(i, j));
            }
        }
        let c = net.all_pairs_shortest_paths(&t);
        let (i, j) = loop {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            if i != j {
                break (i, j);
            }
        };
        let e = Edge::new(i, j);
        let fast = candidate_z(&c, e, t[(i, j)], &d).unwrap();
        let fresh = objective_of(&floyd_warshall(n, net.edges().iter().copied().chain([e]), &t), &d);
        if fast != fresh {
            return outcome(false, format!("fuzz case {k}: candidate {fast} != recomputed {fresh}"));
        }
    }
    outcome(true, "traces nonincreasing, complete networks reach the lower bound, 100 candidates exact")
}

fn a8_tabu_mechanics() -> Outcome {
    let moves: Vec<SwapMove> = (0..200)
        .map(|k| SwapMove::new(Edge::new(0, 1 + k % 199), Edge::new(200, 201 + k)))
        .collect();
    for cap in [80, default_tabu_capacity(111), default_tabu_capacity(3)] {
        let mut list = TabuList::new(cap);
        for (k, mv) in moves.iter().enumerate() {
            list.push(*mv);
            let kept: Vec<SwapMove> = list.entries().copied().collect();
            let lo = (k + 1).saturating_sub(cap);
            if kept != moves[lo..=k] {
                return outcome(false, format!("capacity {cap}: wrong contents after {} pushes", k + 1));
            }
        }
    }
    if default_tabu_capacity(111) != 27 || default_tabu_capacity(3) != 1 {
        return outcome(false, "default capacity is not a quarter of the stations");
    }

    let (p, q) = (moves[0], moves[1]);
    let cands = [Candidate { mv: p, z: 40.0 }, Candidate { mv: q, z: 45.0 }];
    let mut list = TabuList::new(4);
    list.push(p);
    let s = select_best_non_tabu(&cands, &list, 50.0).unwrap();
    if s.candidate.mv != p || s.kind != SelectionKind::Improving || !s.tabu_hit {
        return outcome(false, "aspiration did not override the tabu status");
    }
    let s = select_best_non_tabu(&cands, &list, 30.0).unwrap();
    if s.candidate.mv != q || s.kind != SelectionKind::NonTabu {
        return outcome(false, "a non-improving tabu move was chosen over a free one");
    }
    list.push(q);
    let s = select_best_non_tabu(&cands, &list, 30.0).unwrap();
    if s.candidate.mv != p || s.kind != SelectionKind::Fallback {
        return outcome(false, "all-tabu neighbourhood did not fall back to the cheapest move");
    }

    let config = SolverConfig { phi: 40, psi: 2, tabu_capacity: Some(8), ..Default::default() };
    let report = solve(&inst3(), &config).unwrap();
    let fallbacks = report.trace.iter().filter(|r| r.fallback).count();
    if fallbacks == 0 {
        return outcome(false, "solver never recorded a fallback on an exhausted neighbourhood");
    }
    outcome(true, format!("FIFO at 80, 27 and 1; aspiration; fallback recorded {fallbacks} times"))
}

fn strip_timing(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("wall_time_s") && !l.contains("elapsed_s"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn a9_determinism() -> Outcome {
    let inst = generate_synthetic(40, 3, 11).unwrap();
    let config = SolverConfig { phi: 400, psi: 5, seed: 99, ..Default::default() };
    let manifest = RunManifest {
        command: "solve".into(),
        inputs: vec!["synthetic".into()],
        distance_mode: "euclidean".into(),
        config: serde_json::json!({ "phi": 400, "psi": 5, "seed": 99 }),
        methods: vec!["tabu".into()],
        output_dir: "out".into(),
        seed: 99,
    };
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut reports = Vec::new();
    for dir in &dirs {
        let report = solve(&inst, &config).unwrap();
        write_outputs(&report, &inst, &manifest, dir.path()).unwrap();
        reports.push(report);
    }
    if !reports[0].same_outcome(&reports[1]) {
        return outcome(false, "two runs differ");
    }
    let bits = |r: &SolveReport| r.trace.iter().map(|x| x.best_z.to_bits()).collect::<Vec<_>>();
    if bits(&reports[0]) != bits(&reports[1]) {
        return outcome(false, "trace values differ bitwise");
    }
    for name in ["summary.json", "tree_edges.csv", "detour.csv"] {
        let read = |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join(name)).unwrap();
        if strip_timing(&read(&dirs[0])) != strip_timing(&read(&dirs[1])) {
            return outcome(false, format!("{name} differs between runs"));
        }
    }
    let trace = |d: &tempfile::TempDir| {
        std::fs::read_to_string(d.path().join("trace.csv"))
            .unwrap()
            .lines()
            .map(|l| l.split(',').enumerate().filter(|&(i, _)| i != 3).map(|(_, f)| f.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    if trace(&dirs[0]) != trace(&dirs[1]) {
        return outcome(false, "trace.csv differs beyond the timing column");
    }
    outcome(true, "identical trees, traces and output files across runs")
}

fn a10_performance(solved: &mut Vec<(Instance, SolveReport)>) -> Outcome {
    let inst = generate_synthetic(111, 4, 7).unwrap();
    let config = SolverConfig { phi: 3000, psi: 7, tabu_capacity: Some(80), ..Default::default() };
    let started = Instant::now();
    let report = solve(&inst, &config).unwrap();
    let elapsed = started.elapsed();
    let mst_z = objective(&tree_pair_distances(&mst(&inst).unwrap(), inst.distances()), inst.demand()).unwrap();
    let monotone = report.trace.windows(2).all(|w| w[1].best_z <= w[0].best_z);
    let pass = elapsed < Duration::from_secs(70) && monotone && report.best_z <= mst_z && report.initial_z == mst_z;
    let detail = format!(
        "{:.2} s, z {:.0} -> {:.0} ({:+.2}%), best trace nonincreasing: {monotone}",
        elapsed.as_secs_f64(),
        mst_z,
        report.best_z,
        (report.best_z - mst_z) / mst_z * 100.0
    );
    solved.push((inst, report));
    outcome(pass, detail)
}

fn a11_detour(solved: &[(Instance, SolveReport)]) -> Outcome {
    for (k, (inst, report)) in solved.iter().enumerate() {
        let c = tree_pair_distances(&report.best_tree, inst.distances());
        let first = detour_profile(&c, inst.distances(), inst.demand(), &[1.0]).unwrap();
        let grid = ratio_grid(first.max_ratio(), 10);
        let profile = detour_profile(&c, inst.distances(), inst.demand(), &grid).unwrap();
        if profile.pairs.iter().any(|p| p.ratio < 1.0 - 1e-12) {
            return outcome(false, format!("instance {k}: a path is shorter than its direct link"));
        }
        for curve in [&profile.cum_demand, &profile.cum_pairs] {
            if curve.windows(2).any(|w| w[1] < w[0]) || (curve.last().unwrap() - 1.0).abs() > 1e-12 {
                return outcome(false, format!("instance {k}: cumulative curve not monotone to 1"));
            }
        }
    }
    let inst = inst3();
    let report = solve(&inst, &SolverConfig { phi: 20, psi: 2, ..Default::default() }).unwrap();
    let c = tree_pair_distances(&report.best_tree, inst.distances());
    let profile = detour_profile(&c, inst.distances(), inst.demand(), &[1.0, 1.5]).unwrap();
    if profile.cum_demand[0] != 1.0 {
        return outcome(false, format!("three-station case: {} of demand at ratio 1", profile.cum_demand[0]));
    }
    outcome(true, format!("{} solved instances checked; three-station case fully direct", solved.len() + 1))
}

type Check = Box<dyn FnOnce(&mut Vec<(Instance, SolveReport)>) -> Outcome>;

fn main() {
    let checks: Vec<(&str, &str, u64, Check)> = vec![
        ("A1", "oracle optimality", 30, Box::new(a1_oracle_optimality)),
        ("A2", "incremental objective", 10, Box::new(|_| a2_incremental_exactness())),
        ("A3", "swap validity", 10, Box::new(|_| a3_swap_fuzz())),
        ("A4", "counting formulas", 5, Box::new(|_| a4_counting())),
        ("A5", "kruskal correctness", 10, Box::new(|_| a5_kruskal())),
        ("A6", "identities", 5, Box::new(|_| a6_identities())),
        ("A7", "greedy augmentation", 20, Box::new(|_| a7_augmentation())),
        ("A8", "tabu mechanics", 1, Box::new(|_| a8_tabu_mechanics())),
        ("A9", "determinism", 10, Box::new(|_| a9_determinism())),
        ("A10", "performance", 70, Box::new(a10_performance)),
        ("A11", "detour metrics", 5, Box::new(|s| a11_detour(s))),
    ];
    let mut solved = Vec::new();
    let mut failed = 0;
    for (id, name, budget_s, check) in checks {
        let started = Instant::now();
        let mut result = check(&mut solved);
        let elapsed = started.elapsed().as_secs_f64();
        if result.pass && elapsed > budget_s as f64 {
            result = outcome(false, format!("{} (took {elapsed:.2} s, limit {budget_s} s)", result.detail));
        }
        failed += usize::from(!result.pass);
        println!(
            "{id:<4} {} {name}: {} [{elapsed:.2} s]",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
