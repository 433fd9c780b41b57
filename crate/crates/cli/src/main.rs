//! `cnp`: build unit-distance graphs, encode their colourings, solve, check
//! and optimise proofs, and shrink unsatisfiable instances.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cnp_core::cnf::{
    parse_dimacs, parse_groups, write_dimacs, write_dimacs_with_ids, write_groups, Formula, Group, PropagationOrder,
};
use cnp_core::encode::{add_blocking_clauses, encode_coloring, enumerate_colorings, EncodeOptions, PartialColoring};
use cnp_core::field::FieldElement;
use cnp_core::graph::{build_named, NamedGraph, UnitDistanceGraph};
use cnp_core::optimize::{optimize_proof, ShuffleConfig};
use cnp_core::proof::{backward_check_with, extract_core, trim_proof, CheckOptions, ClausalProof};
use cnp_core::solver::{best_proof_of, solve_external, solve_with, Outcome, SolveResult, SolverConfig, Sweep};
use cnp_core::trim::{mus_destructive, shrink_graph, trim, ShrinkConfig, TrimConfig, TrimMode};

mod config;

const SCHEMA_VERSION: u32 = 1;
const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;

#[derive(Parser, Debug)]
#[command(name = "cnp", version, about = "Unit-distance graph colouring, DRUP proofs and core trimming")]
struct Cli {
    /// Worker threads for seed sweeps (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named graph and write it in the `udg` text format.
    BuildGraph(BuildGraphArgs),
    /// Write the k-colouring CNF of a graph plus its clause-group sidecar.
    Encode(EncodeArgs),
    /// Solve a CNF; exit 10 if satisfiable, 20 if not.
    Solve(SolveArgs),
    /// Backward-check a DRUP proof against a CNF.
    Check(CheckArgs),
    /// Shrink a proof by repeated trimming and shuffling.
    Optimize(OptimizeArgs),
    /// Shrink an unsatisfiable CNF to a small core.
    Trim(TrimArgs),
    /// Destructive minimal unsatisfiable subset.
    Mus(MusArgs),
    /// Encode, trim, MUS and make the remaining subgraph vertex-critical.
    ShrinkGraph(ShrinkArgs),
    /// Enumerate colourings of designated vertices by iterated blocking.
    EnumerateColorings(EnumerateArgs),
    /// Print counts for a graph, CNF or proof.
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
struct GraphSource {
    /// Graph file in `udg` format.
    #[arg(long, conflicts_with = "name")]
    graph: Option<PathBuf>,
    /// Built-in graph: moser, grid37, g259, g2167 or grid-rot-<j>.
    #[arg(long)]
    name: Option<String>,
}

impl GraphSource {
    fn load(&self) -> Result<UnitDistanceGraph> {
        match (&self.graph, &self.name) {
            (Some(path), _) => {
                let text = read(path)?;
                UnitDistanceGraph::from_text(&text).with_context(|| format!("parsing {}", path.display()))
            }
            (None, Some(name)) => Ok(build_named(name.parse::<NamedGraph>()?)),
            (None, None) => bail!("one of --graph or --name is required"),
        }
    }

    fn describe(&self) -> Value {
        json!({
            "graph": self.graph.as_ref().map(|p| p.display().to_string()),
            "name": self.name,
        })
    }
}

#[derive(Args, Debug)]
struct BuildGraphArgs {
    #[arg(long)]
    name: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write approximate coordinates as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    colors: usize,
    #[arg(long)]
    no_symmetry: bool,
    #[arg(long)]
    at_most_one: bool,
    /// Blocking colourings: `{"colorings": [[[vertex, colour], ...], ...]}`.
    #[arg(long)]
    block: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// Group sidecar path (default: `<output>.groups`).
    #[arg(long)]
    groups: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long)]
    conflict_budget: Option<u64>,
    #[arg(long, default_value_t = 64)]
    restart_unit: u64,
    #[arg(long, default_value_t = 2000)]
    reduce_first: u64,
    #[arg(long, default_value_t = 300)]
    reduce_increment: u64,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            seed,
            conflict_budget: self.conflict_budget,
            restart_unit: self.restart_unit,
            reduce_first: self.reduce_first,
            reduce_increment: self.reduce_increment,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, default_value_t = 0, conflicts_with = "seeds")]
    seed: u64,
    /// Seed range `a..b` (exclusive end); keeps the smallest proof.
    #[arg(long)]
    seeds: Option<String>,
    /// External solver command with `{cnf}` and `{proof}` placeholders.
    #[arg(long, env = "CNP_EXTERNAL_SOLVER")]
    external: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Where to write the DRAT proof (default: `<cnf>.drat`).
    #[arg(long)]
    proof: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Omit `v` model lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    proof: PathBuf,
    #[arg(long)]
    ignore_deletions: bool,
    /// Permute propagation order with this seed instead of FIFO.
    #[arg(long)]
    order_seed: Option<u64>,
    /// Write the core as DIMACS with `c id <n>` comments.
    #[arg(long)]
    core: Option<PathBuf>,
    #[arg(long)]
    trimmed: Option<PathBuf>,
    /// Write `j <step-id> : <ids>` lines.
    #[arg(long)]
    justification: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    proof: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    iters: usize,
    #[arg(long, default_value_t = 3)]
    patience: usize,
    #[arg(long, default_value_t = 0)]
    window: usize,
    #[arg(long, default_value_t = 10)]
    window_inc: usize,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TrimLoopArgs {
    #[arg(long, default_value = "interact")]
    mode: TrimMode,
    /// Solver runs per iteration.
    #[arg(long, default_value_t = 8)]
    seeds: usize,
    #[arg(long, default_value_t = 20)]
    iters: usize,
    #[arg(long, default_value_t = 3)]
    patience: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optimisation iterations per trim iteration.
    #[arg(long, default_value_t = 20)]
    opt_iters: usize,
    #[arg(long, default_value_t = 3)]
    opt_patience: usize,
    #[arg(long, default_value_t = 0)]
    window: usize,
    #[arg(long, default_value_t = 10)]
    window_inc: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

impl TrimLoopArgs {
    fn config(&self, graph_aware: Option<bool>) -> TrimConfig {
        TrimConfig {
            seed: self.seed,
            seeds_per_iteration: self.seeds,
            max_iterations: self.iters,
            patience: self.patience,
            optimize: ShuffleConfig {
                seed: self.seed,
                deletion_window: self.window,
                window_increment: self.window_inc,
                max_iterations: self.opt_iters,
                patience: self.opt_patience,
            },
            solver: self.solver.config(self.seed),
            graph_aware,
        }
    }
}

#[derive(Args, Debug)]
struct TrimArgs {
    #[arg(long)]
    cnf: PathBuf,
    /// Group sidecar (default: `<cnf>.groups` when present).
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Do not re-add vertex, edge and symmetry clauses around cores.
    #[arg(long)]
    no_reinduce: bool,
    #[command(flatten)]
    trim: TrimLoopArgs,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Core output as DIMACS with `c id <n>` comments.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MusArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent runs with seeds `seed..seed+runs`; the smallest is kept.
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Conflict budget per solver call.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ShrinkArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    colors: usize,
    #[command(flatten)]
    trim: TrimLoopArgs,
    #[arg(long)]
    no_mus: bool,
    #[arg(long)]
    mus_budget: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    colors: usize,
    /// Designate the vertices at this distance from the origin.
    #[arg(long, conflicts_with = "vertices")]
    at_distance: Option<i64>,
    /// Comma-separated vertex indices.
    #[arg(long, value_delimiter = ',')]
    vertices: Option<Vec<usize>>,
    #[arg(long)]
    no_symmetry: bool,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    cnf: Option<PathBuf>,
    #[arg(long)]
    proof: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_cnf(path: &Path, groups: Option<&Path>) -> Result<Formula> {
    let mut f = parse_dimacs(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let default = with_suffix(path, ".groups");
    let sidecar = match groups {
        Some(g) => Some(g.to_path_buf()),
        None if default.exists() => Some(default),
        None => None,
    };
    if let Some(g) = sidecar {
        parse_groups(&read(&g)?, &mut f).with_context(|| format!("parsing {}", g.display()))?;
    }
    Ok(f)
}

fn load_proof(path: &Path) -> Result<ClausalProof> {
    ClausalProof::from_drat(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn report(command: &str, config: Value, seeds: Value, results: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "cnp",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "seeds": seeds,
        "results": results,
    })
}

fn write_report(path: Option<&PathBuf>, value: &Value) -> Result<()> {
    if let Some(p) = path {
        write(p, &serde_json::to_string_pretty(value)?)?;
    }
    Ok(())
}

fn parse_seed_range(s: &str) -> Result<Vec<u64>> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| anyhow!("seed range must look like a..b"))?;
    let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
    if b <= a {
        bail!("empty seed range {s}");
    }
    Ok((a..b).collect())
}

/// Process exit status of a subcommand.
type Status = u8;

fn build_graph(args: &BuildGraphArgs) -> Result<Status> {
    let g = build_named(args.name.parse::<NamedGraph>()?);
    println!("vertices {} edges {}", g.vertex_count(), g.edge_count());
    if let Some(out) = &args.output {
        write(out, &g.to_text())?;
    }
    if let Some(csv) = &args.csv {
        write(csv, &g.to_csv())?;
    }
    Ok(0)
}

#[derive(serde::Deserialize)]
struct BlockingFile {
    colorings: Vec<PartialColoring>,
}

fn encode(args: &EncodeArgs) -> Result<Status> {
    let g = args.source.load()?;
    let options = EncodeOptions {
        symmetry: !args.no_symmetry,
        at_most_one: args.at_most_one,
    };
    let (mut f, map) = encode_coloring(&g, args.colors, options)?;
    if let Some(block) = &args.block {
        let file: BlockingFile = serde_json::from_str(&read(block)?).context("parsing blocking file")?;
        f = add_blocking_clauses(&f, &file.colorings, &map)?;
    }
    write(&args.output, &write_dimacs(&f))?;
    let groups = args.groups.clone().unwrap_or_else(|| with_suffix(&args.output, ".groups"));
    write(&groups, &write_groups(&f))?;
    println!("variables {} clauses {}", f.num_vars(), f.active_count());
    Ok(0)
}

fn print_result(result: &SolveResult, quiet: bool) {
    match &result.outcome {
        Outcome::Sat(model) => {
            println!("s SATISFIABLE");
            if !quiet {
                let lits: Vec<String> = model.lits().iter().map(|l| l.to_string()).collect();
                for chunk in lits.chunks(20) {
                    println!("v {}", chunk.join(" "));
                }
                println!("v 0");
            }
        }
        Outcome::Unsat(_) => println!("s UNSATISFIABLE"),
    }
}

fn solve(args: &SolveArgs) -> Result<Status> {
    let f = load_cnf(&args.cnf, None)?;
    let proof_path = args.proof.clone().unwrap_or_else(|| with_suffix(&args.cnf, ".drat"));
    let config_echo = json!({
        "cnf": args.cnf.display().to_string(),
        "external": args.external,
        "conflict_budget": args.solver.conflict_budget,
        "restart_unit": args.solver.restart_unit,
        "reduce_first": args.solver.reduce_first,
        "reduce_increment": args.solver.reduce_increment,
    });

    if let Some(range) = &args.seeds {
        let seeds = parse_seed_range(range)?;
        let sweep = best_proof_of(&f, &seeds, &args.solver.config(0))?;
        return match sweep {
            Sweep::Sat { seed, model } => {
                let r = SolveResult {
                    outcome: Outcome::Sat(model),
                    stats: Default::default(),
                    seed: Some(seed),
                };
                print_result(&r, args.quiet);
                write_report(
                    args.report.as_ref(),
                    &report("solve", config_echo, json!(seeds), json!({"status": "sat", "seed": seed})),
                )?;
                Ok(EXIT_SAT)
            }
            Sweep::Unsat { seed, proof, runs } => {
                write(&proof_path, &proof.to_drat())?;
                println!("s UNSATISFIABLE");
                println!("c best seed {seed} additions {}", proof.additions());
                let sizes: Vec<usize> = runs.iter().filter_map(|r| r.additions).collect();
                if let (Some(min), Some(max)) = (sizes.iter().min(), sizes.iter().max()) {
                    println!("c sizes min {min} max {max} over {} runs", sizes.len());
                }
                write_report(
                    args.report.as_ref(),
                    &report(
                        "solve",
                        config_echo,
                        json!(seeds),
                        json!({"status": "unsat", "best_seed": seed, "additions": proof.additions(), "runs": runs}),
                    ),
                )?;
                Ok(EXIT_UNSAT)
            }
        };
    }

    let result = match &args.external {
        Some(cmd) => solve_external(cmd, &f)?,
        None => solve_with(&f, &args.solver.config(args.seed))?,
    };
    print_result(&result, args.quiet);
    if let Some(proof) = result.proof() {
        write(&proof_path, &proof.to_drat())?;
    }
    write_report(
        args.report.as_ref(),
        &report(
            "solve",
            config_echo,
            json!(result.seed.map(|s| vec![s]).unwrap_or_default()),
            json!({"status": if result.is_sat() { "sat" } else { "unsat" }, "stats": result.stats}),
        ),
    )?;
    Ok(if result.is_sat() { EXIT_SAT } else { EXIT_UNSAT })
}

fn check(args: &CheckArgs) -> Result<Status> {
    let f = load_cnf(&args.cnf, None)?;
    let proof = load_proof(&args.proof)?;
    let options = CheckOptions {
        ignore_deletions: args.ignore_deletions,
        order: args.order_seed.map_or(PropagationOrder::Fifo, PropagationOrder::Seeded),
    };
    let config_echo = json!({
        "cnf": args.cnf.display().to_string(),
        "proof": args.proof.display().to_string(),
        "ignore_deletions": args.ignore_deletions,
        "order_seed": args.order_seed,
    });
    let j = match backward_check_with(&f, &proof, options) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("proof rejected: {e}");
            println!("s NOT VERIFIED");
            write_report(
                args.report.as_ref(),
                &report("check", config_echo, json!([]), json!({"verified": false, "error": e.to_string()})),
            )?;
            return Ok(1);
        }
    };
    let core = extract_core(&j, &f);
    let trimmed = trim_proof(&j, &proof);
    println!("s VERIFIED");
    println!(
        "core {} of {} clauses; proof {} additions, {} after trimming",
        core.active_count(),
        f.active_count(),
        proof.additions(),
        trimmed.additions()
    );
    if let Some(p) = &args.core {
        write(p, &write_dimacs_with_ids(&core))?;
    }
    if let Some(p) = &args.trimmed {
        write(p, &trimmed.to_drat())?;
    }
    if let Some(p) = &args.justification {
        write(p, &j.dump(f.len()))?;
    }
    write_report(
        args.report.as_ref(),
        &report(
            "check",
            config_echo,
            json!([]),
            json!({
                "verified": true,
                "core_clauses": core.active_count(),
                "proof_additions": proof.additions(),
                "trimmed_additions": trimmed.additions(),
            }),
        ),
    )?;
    Ok(0)
}

fn optimize(args: &OptimizeArgs) -> Result<Status> {
    let f = load_cnf(&args.cnf, None)?;
    let proof = load_proof(&args.proof)?;
    let config = ShuffleConfig {
        seed: args.seed,
        deletion_window: args.window,
        window_increment: args.window_inc,
        max_iterations: args.iters,
        patience: args.patience,
    };
    let out = optimize_proof(&proof, &f, &config)?;
    write(&args.output, &out.proof.to_drat())?;
    println!(
        "additions {} -> {}; core {} clauses; {} iterations",
        proof.additions(),
        out.proof.additions(),
        out.core.len(),
        out.trace.len()
    );
    write_report(
        args.trace.as_ref(),
        &report(
            "optimize",
            serde_json::to_value(&config)?,
            json!([args.seed]),
            json!({"input_additions": proof.additions(), "output_additions": out.proof.additions(), "trace": out.trace}),
        ),
    )?;
    Ok(0)
}

fn trim_cmd(args: &TrimArgs) -> Result<Status> {
    let f = load_cnf(&args.cnf, args.groups.as_deref())?;
    let graph_aware = if args.no_reinduce { Some(false) } else { None };
    let config = args.trim.config(graph_aware);
    let (core, rep) = trim(&f, &config, args.trim.mode)?;
    println!(
        "core {} of {} clauses after {} iterations",
        core.active_count(),
        f.active_count(),
        rep.iterations.len()
    );
    if let Some(out) = &args.output {
        write(out, &write_dimacs_with_ids(&core))?;
        write(&with_suffix(out, ".groups"), &write_groups(&core.compact().0))?;
    }
    let seeds: Vec<u64> = rep.iterations.iter().flat_map(|i| i.seeds.iter().copied()).collect();
    write_report(
        args.report.as_ref(),
        &report("trim", json!(format!("{:?}", args.trim)), json!(seeds), serde_json::to_value(&rep)?),
    )?;
    Ok(0)
}

fn mus(args: &MusArgs) -> Result<Status> {
    let f = load_cnf(&args.cnf, args.groups.as_deref())?;
    let seeds: Vec<u64> = (args.seed..args.seed + args.runs.max(1)).collect();
    let mut best = None;
    let mut sizes = Vec::new();
    for &seed in &seeds {
        let m = mus_destructive(&f, seed, args.budget)?;
        sizes.push(json!({"seed": seed, "clauses": m.formula.active_count(), "minimal": m.minimal}));
        let smaller = best
            .as_ref()
            .map_or(true, |(_, b): &(u64, cnp_core::trim::MusResult)| {
                m.formula.active_count() < b.formula.active_count()
            });
        if smaller {
            best = Some((seed, m));
        }
    }
    let (seed, m) = best.expect("at least one run");
    println!(
        "mus {} of {} clauses (seed {seed}, {})",
        m.formula.active_count(),
        f.active_count(),
        if m.minimal { "minimal" } else { "budget hit, may not be minimal" }
    );
    if let Some(out) = &args.output {
        write(out, &write_dimacs_with_ids(&m.formula))?;
    }
    write_report(
        args.report.as_ref(),
        &report(
            "mus",
            json!({"cnf": args.cnf.display().to_string(), "budget": args.budget}),
            json!(seeds),
            json!({"best_seed": seed, "runs": sizes}),
        ),
    )?;
    Ok(0)
}

fn shrink(args: &ShrinkArgs) -> Result<Status> {
    let g = args.source.load()?;
    let config = ShrinkConfig {
        trim: args.trim.config(None),
        mode: args.trim.mode,
        mus: !args.no_mus,
        mus_budget: args.mus_budget,
    };
    let (out, rep) = shrink_graph(&g, args.colors, &config)?;
    println!(
        "vertices {} -> {} (core {}), edges {} -> {}",
        g.vertex_count(),
        out.vertex_count(),
        rep.core_vertices,
        g.edge_count(),
        out.edge_count()
    );
    if let Some(p) = &args.output {
        write(p, &out.to_text())?;
    }
    let seeds: Vec<u64> = rep.trim.iterations.iter().flat_map(|i| i.seeds.iter().copied()).collect();
    write_report(
        args.report.as_ref(),
        &report(
            "shrink-graph",
            json!({"source": args.source.describe(), "colors": args.colors, "trim": format!("{:?}", args.trim),
                   "mus": !args.no_mus, "mus_budget": args.mus_budget}),
            json!(seeds),
            serde_json::to_value(&rep)?,
        ),
    )?;
    Ok(0)
}

fn enumerate(args: &EnumerateArgs) -> Result<Status> {
    let g = args.source.load()?;
    let options = EncodeOptions {
        symmetry: !args.no_symmetry,
        at_most_one: false,
    };
    let (f, map) = encode_coloring(&g, args.colors, options)?;
    let vertices: Vec<usize> = match (&args.vertices, args.at_distance) {
        (Some(v), _) => v.clone(),
        (None, Some(d)) => {
            let target = FieldElement::from_int(d * d);
            (0..g.vertex_count())
                .filter(|&i| g.points().points()[i].norm_sq() == target)
                .collect()
        }
        (None, None) => bail!("one of --vertices or --at-distance is required"),
    };
    let colorings = enumerate_colorings(&f, &map, &vertices, args.limit, &SolverConfig::with_seed(args.seed))?;
    println!("{} designated vertices, {} colourings", vertices.len(), colorings.len());
    let doc = json!({"vertices": vertices, "colorings": colorings});
    match &args.output {
        Some(p) => write(p, &serde_json::to_string_pretty(&doc)?)?,
        None => println!("{}", serde_json::to_string(&doc)?),
    }
    Ok(0)
}

fn stats(args: &StatsArgs) -> Result<Status> {
    let mut out = serde_json::Map::new();
    if args.source.graph.is_some() || args.source.name.is_some() {
        let g = args.source.load()?;
        out.insert(
            "graph".into(),
            json!({"vertices": g.vertex_count(), "edges": g.edge_count(), "average_degree": g.average_degree()}),
        );
    }
    if let Some(cnf) = &args.cnf {
        let f = load_cnf(cnf, None)?;
        let mut counts = std::collections::BTreeMap::<&str, usize>::new();
        for (id, _) in f.iter() {
            let key = match f.group(id) {
                Group::Vertex(_) => "vertex",
                Group::Edge { .. } => "edge",
                Group::Symmetry => "symmetry",
                Group::Blocking => "blocking",
                Group::Other => "other",
            };
            *counts.entry(key).or_default() += 1;
        }
        out.insert(
            "cnf".into(),
            json!({"variables": f.num_vars(), "clauses": f.active_count(), "groups": counts}),
        );
    }
    if let Some(p) = &args.proof {
        let proof = load_proof(p)?;
        out.insert(
            "proof".into(),
            json!({"additions": proof.additions(), "deletions": proof.deletions(),
                   "has_empty_clause": proof.empty_clause_step().is_some()}),
        );
    }
    if out.is_empty() {
        bail!("nothing to describe: pass --graph, --name, --cnf or --proof");
    }
    println!("{}", serde_json::to_string_pretty(&Value::Object(out))?);
    Ok(0)
}

fn run(cli: Cli) -> Result<Status> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring worker pool")?;
    }
    match &cli.command {
        Command::BuildGraph(a) => build_graph(a),
        Command::Encode(a) => encode(a),
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Optimize(a) => optimize(a),
        Command::Trim(a) => trim_cmd(a),
        Command::Mus(a) => mus(a),
        Command::ShrinkGraph(a) => shrink(a),
        Command::EnumerateColorings(a) => enumerate(a),
        Command::Stats(a) => stats(a),
    }
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
