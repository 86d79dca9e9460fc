//! Command-line front end. The `transit-tree` binary is a thin wrapper
//! around [`run`].
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 the best tree found
//! exceeds the passenger-kilometre budget.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::augment::augment;
use crate::baselines::{
    brute_force_optimum, compare, heuristic_link_deletion, heuristic_link_swapping_from,
    mst, tree_objective, Method,
};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::io::{
    full_detour_profile, load_instance, load_tree, write_augment_outputs, write_compare_outputs,
    write_instance, write_outputs, LoadOptions, RunManifest,
};
use crate::network::Network;
use crate::objective::{
    budget_feasible, demand_weighted_lower_bound, entropy_objective, link_flows, objective,
};
use crate::report::SolveReport;
use crate::synthetic::generate_synthetic;
use crate::tabu::{default_tabu_capacity, solve, InitialTree, SolverConfig};
use crate::tree::tree_pair_distances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "TRANSIT_TREE_OUT";

#[derive(Parser, Debug)]
#[command(name = "transit-tree", version, about = "Minimum passenger-kilometre spanning trees for transit networks")]
pub struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Print the run summary as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Stations: `id,name,x,y`, or `id,name,lat,lon` with --geo.
    #[arg(long)]
    pub nodes: PathBuf,
    /// Demand: `origin,destination,trips`.
    #[arg(long)]
    pub demand: PathBuf,
    /// Link distances: `i,j,km`. Unlisted pairs come from coordinates.
    #[arg(long)]
    pub distances: Option<PathBuf>,
    /// Coordinates are latitude/longitude; distances are great-circle km.
    #[arg(long)]
    pub geo: bool,
    /// Only links listed in --distances may be used.
    #[arg(long, requires = "distances")]
    pub whitelist: bool,
    /// Passenger-kilometre budget.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitKind {
    Mst,
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Iterations.
    #[arg(long, default_value_t = 3000)]
    pub phi: usize,
    /// Links sampled for removal per iteration.
    #[arg(long, default_value_t = 7)]
    pub psi: usize,
    /// Tabu list length [default: stations / 4].
    #[arg(long)]
    pub tabu: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "mst")]
    pub init: InitKind,
    /// Start from this tree (`i,j` rows) instead of --init.
    #[arg(long)]
    pub init_tree: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaselineKind {
    Swap,
    Delete,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabu search for the minimum passenger-kilometre tree.
    Solve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Minimum total distance spanning tree.
    Mst {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Maximum total demand spanning tree.
    Mdst {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Exact optimum by enumerating every tree (small instances).
    Brute {
        #[command(flatten)]
        input: InputArgs,
        /// Enumerate even above the size limit.
        #[arg(long)]
        force: bool,
    },
    /// Greedy link swapping or link deletion heuristic.
    Baseline {
        #[arg(value_enum)]
        kind: BaselineKind,
        #[command(flatten)]
        input: InputArgs,
        /// Cap on station pairs visited (swap only).
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Add links greedily to a tree (the tabu result unless --tree is given).
    Augment {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = 10)]
        alpha: usize,
        /// Start from this tree instead of solving.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Run several methods on one instance and tabulate the results.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_delimiter = ',', default_value = "mst,mdst,tabu")]
        methods: Vec<String>,
    },
    /// Generate a synthetic instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        centers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
        out: PathBuf,
    },
    /// Objective, bounds, flows and detours of a given tree.
    Metrics {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        tree: PathBuf,
        /// Also report the utility objective for this dispersion parameter.
        #[arg(long)]
        lambda: Option<f64>,
    },
}

struct Context {
    quiet: bool,
    json: bool,
}

impl Context {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet && !self.json {
            println!("{}", line.as_ref());
        }
    }

    fn emit_json(&self, value: &serde_json::Value) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value).expect("json value"));
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        log::LevelFilter::Warn
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();

    let ctx = Context {
        quiet: cli.quiet,
        json: cli.json,
    };
    match dispatch(&ctx, cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("best tree exceeds the passenger-kilometre budget");
            EXIT_INFEASIBLE
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeGuard { .. } | Error::InvalidParameter(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn load(input: &InputArgs) -> Result<Instance> {
    let options = LoadOptions {
        geographic: input.geo,
        distances_as_whitelist: input.whitelist,
    };
    load_instance(&input.nodes, &input.demand, input.distances.as_deref(), options)?
        .with_budget(input.tau)
}

fn manifest(command: &str, input: &InputArgs, config: serde_json::Value, methods: &[&str], seed: u64) -> RunManifest {
    let mut inputs = vec![
        input.nodes.display().to_string(),
        input.demand.display().to_string(),
    ];
    if let Some(p) = &input.distances {
        inputs.push(p.display().to_string());
    }
    let distance_mode = match (&input.distances, input.geo) {
        (Some(_), _) if input.whitelist => "file_whitelist",
        (Some(_), _) => "file",
        (None, true) => "great_circle",
        (None, false) => "euclidean",
    };
    RunManifest {
        command: command.into(),
        inputs,
        distance_mode: distance_mode.into(),
        config,
        methods: methods.iter().map(|m| m.to_string()).collect(),
        output_dir: input.out.display().to_string(),
        seed,
    }
}

fn solver_config(args: &SolverArgs, instance: &Instance, tau: Option<f64>) -> Result<SolverConfig> {
    let init = match &args.init_tree {
        Some(path) => InitialTree::Given(load_tree(path, instance)?),
        None => match args.init {
            InitKind::Mst => InitialTree::Mst,
            InitKind::Random => InitialTree::Random,
        },
    };
    Ok(SolverConfig {
        phi: args.phi,
        psi: args.psi,
        tabu_capacity: args.tabu,
        seed: args.seed,
        tau,
        init,
    })
}

fn solver_json(args: &SolverArgs, n: usize, tau: Option<f64>) -> serde_json::Value {
    json!({
        "phi": args.phi,
        "psi": args.psi,
        "tabu": args.tabu.unwrap_or_else(|| default_tabu_capacity(n)),
        "seed": args.seed,
        "init": match args.init { InitKind::Mst => "mst", InitKind::Random => "random" },
        "init_tree": args.init_tree.as_ref().map(|p| p.display().to_string()),
        "tau": tau,
    })
}

fn finish(ctx: &Context, report: &SolveReport, instance: &Instance, manifest: &RunManifest, out: &Path) -> Result<bool> {
    let files = write_outputs(report, instance, manifest, out)?;
    ctx.say(format!(
        "{}: z = {} over {} links ({} iterations, {:.3} s)",
        report.method,
        report.best_z,
        report.best_tree.edges().len(),
        report.iterations,
        report.wall_time_s
    ));
    for f in &files {
        ctx.say(format!("  wrote {}", f.display()));
    }
    ctx.emit_json(&json!({
        "method": report.method,
        "best_z": report.best_z,
        "feasible": report.feasible,
        "manifest_hash": manifest.hash(),
        "outputs": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
    }));
    Ok(report.feasible)
}

fn dispatch(ctx: &Context, command: Command) -> Result<bool> {
    match command {
        Command::Solve { input, solver } => {
            let instance = load(&input)?;
            let config = solver_config(&solver, &instance, input.tau)?;
            let m = manifest("solve", &input, solver_json(&solver, instance.n(), input.tau), &["tabu"], solver.seed);
            let report = solve(&instance, &config)?;
            finish(ctx, &report, &instance, &m, &input.out)
        }
        Command::Mst { input } => {
            let instance = load(&input)?;
            let m = manifest("mst", &input, json!({ "tau": input.tau }), &["mst"], 0);
            let report = Method::Mst.run(&instance, &SolverConfig::default())?;
            finish(ctx, &report, &instance, &m, &input.out)
        }
        Command::Mdst { input } => {
            let instance = load(&input)?;
            let m = manifest("mdst", &input, json!({ "tau": input.tau }), &["mdst"], 0);
            let report = Method::Mdst.run(&instance, &SolverConfig::default())?;
            finish(ctx, &report, &instance, &m, &input.out)
        }
        Command::Brute { input, force } => {
            let instance = load(&input)?;
            let m = manifest("brute", &input, json!({ "tau": input.tau, "force": force }), &["brute"], 0);
            let started = std::time::Instant::now();
            let (tree, z) = brute_force_optimum(&instance, force)?;
            let report = SolveReport {
                method: "brute".into(),
                best_tree: tree,
                best_z: z,
                initial_z: z,
                trace: Vec::new(),
                iterations: 0,
                wall_time_s: started.elapsed().as_secs_f64(),
                feasible: budget_feasible(z, instance.budget()),
            };
            finish(ctx, &report, &instance, &m, &input.out)
        }
        Command::Baseline { kind, input, iterations } => {
            let instance = load(&input)?;
            let (name, report) = match kind {
                BaselineKind::Swap => ("swap", heuristic_link_swapping_from(&instance, mst(&instance)?, iterations)?),
                BaselineKind::Delete => ("delete", heuristic_link_deletion(&instance)?),
            };
            let m = manifest("baseline", &input, json!({ "tau": input.tau, "iterations": iterations }), &[name], 0);
            finish(ctx, &report, &instance, &m, &input.out)
        }
        Command::Augment { input, solver, alpha, tree } => {
            let instance = load(&input)?;
            let start = match &tree {
                Some(path) => load_tree(path, &instance)?,
                None => solve(&instance, &solver_config(&solver, &instance, input.tau)?)?.best_tree,
            };
            let mut config = solver_json(&solver, instance.n(), input.tau);
            config["alpha"] = json!(alpha);
            config["tree"] = json!(tree.as_ref().map(|p| p.display().to_string()));
            let m = manifest("augment", &input, config, &["augment"], solver.seed);
            let aug = augment(&Network::from_tree(&start), &instance, alpha)?;
            let files = write_augment_outputs(&aug, &instance, &m, &input.out)?;
            let td = demand_weighted_lower_bound(instance.demand(), instance.distances())?;
            ctx.say(format!(
                "augment: {} links added, z {} -> {} (lower bound {})",
                aug.alpha(),
                aug.z[0],
                aug.final_z(),
                td
            ));
            for f in &files {
                ctx.say(format!("  wrote {}", f.display()));
            }
            ctx.emit_json(&json!({ "alpha": aug.alpha(), "z": aug.z, "lower_bound_td": td }));
            Ok(budget_feasible(aug.final_z(), instance.budget()))
        }
        Command::Compare { input, solver, methods } => {
            let instance = load(&input)?;
            let methods: Vec<Method> = methods.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            let keys: Vec<&str> = methods.iter().map(|m| m.key()).collect();
            let config = solver_config(&solver, &instance, input.tau)?;
            let m = manifest("compare", &input, solver_json(&solver, instance.n(), input.tau), &keys, solver.seed);
            let report = compare(&instance, &methods, &config)?;
            let files = write_compare_outputs(&report, &m, &input.out)?;
            for row in &report.rows {
                ctx.say(format!("{:<8} z = {:<20} {:.3} s  {}", row.method.key(), row.z, row.wall_time_s, row.label));
            }
            for d in &report.deltas {
                if let Some(change) = d.change {
                    ctx.say(format!("{} vs {}: {:+.2}%", d.method, d.reference, change * 100.0));
                }
            }
            for f in &files {
                ctx.say(format!("  wrote {}", f.display()));
            }
            ctx.emit_json(&serde_json::to_value(&report)?);
            Ok(true)
        }
        Command::Gen { n, centers, seed, out } => {
            let instance = generate_synthetic(n, centers, seed)?;
            let files = write_instance(&instance, &out)?;
            ctx.say(format!("generated {n} stations around {centers} centers (seed {seed})"));
            for f in &files {
                ctx.say(format!("  wrote {}", f.display()));
            }
            ctx.emit_json(&json!({ "n": n, "centers": centers, "seed": seed, "total_demand": instance.total_demand() }));
            Ok(true)
        }
        Command::Metrics { input, tree, lambda } => {
            let instance = load(&input)?;
            let tree = load_tree(&tree, &instance)?;
            let t = instance.distances();
            let d = instance.demand();
            let c = tree_pair_distances(&tree, t);
            let z = objective(&c, d)?;
            let td = demand_weighted_lower_bound(d, t)?;
            let flows = link_flows(&tree, d)?;
            let entropy = lambda.map(|l| entropy_objective(&c, d, l)).transpose()?;
            let detour = full_detour_profile(&instance, &c)?;
            let at = |r: f64| detour.demand_within(r) / detour.total_demand.max(f64::MIN_POSITIVE);
            let feasible = budget_feasible(z, instance.budget());
            let summary = json!({
                "z": z,
                "lower_bound_td": td,
                "td_over_z": if z == 0.0 { 1.0 } else { td / z },
                "flow_weighted_length": flows.weighted_total(t),
                "entropy": entropy,
                "lambda": lambda,
                "feasible": feasible,
                "tree_length_km": tree.weight(t),
                "max_detour_ratio": detour.max_ratio(),
                "demand_within_1_5": at(1.5),
                "demand_within_2_0": at(2.0),
                "excluded_pairs": detour.excluded_pairs,
            });
            std::fs::create_dir_all(&input.out)?;
            let path = input.out.join("metrics.json");
            std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
            crate::io::write_detour_csv(&input.out.join("detour.csv"), &detour)?;
            ctx.say(format!("z = {z}, lower bound = {td}, tree length = {} km", tree.weight(t)));
            ctx.say(format!("demand within ratio 1.5: {:.1}%, within 2.0: {:.1}%", at(1.5) * 100.0, at(2.0) * 100.0));
            ctx.emit_json(&summary);
            debug_assert_eq!(tree_objective(&instance, &tree)?, z);
            Ok(feasible)
        }
    }
}
