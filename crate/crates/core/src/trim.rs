//! Formula trimming loops, destructive MUS extraction and vertex-critical
//! graph reduction.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Assignment, ClauseId, Formula, Group};
use crate::encode::{core_to_subgraph, core_vertices, encode_coloring, symmetry_triangle, EncodeError, EncodeOptions};
use crate::graph::UnitDistanceGraph;
use crate::optimize::{optimize_proof, OptimizeError, ShuffleConfig};
use crate::proof::backward_check;
use crate::solver::{best_proof_of, solve_with, Outcome, SolveError, SolverConfig, Sweep};

#[derive(Debug, Error)]
pub enum TrimError {
    #[error("formula is satisfiable")]
    FormulaSatisfiable(Assignment),
    #[error("graph is colourable with the given number of colours")]
    GraphColorable(Vec<usize>),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrimMode {
    Plain,
    Interact,
}

impl std::str::FromStr for TrimMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(TrimMode::Plain),
            "interact" => Ok(TrimMode::Interact),
            other => Err(format!("unknown trim mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrimConfig {
    pub seed: u64,
    /// Solver runs per iteration; the smallest proof is kept.
    pub seeds_per_iteration: usize,
    pub max_iterations: usize,
    pub patience: usize,
    pub optimize: ShuffleConfig,
    pub solver: SolverConfig,
    /// Re-add vertex, edge and symmetry clauses around each core. `None`
    /// enables it when the formula carries vertex or edge tags.
    pub graph_aware: Option<bool>,
}

impl Default for TrimConfig {
    fn default() -> Self {
        TrimConfig {
            seed: 0,
            seeds_per_iteration: 8,
            max_iterations: 20,
            patience: 3,
            optimize: ShuffleConfig::default(),
            solver: SolverConfig::default(),
            graph_aware: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrimIteration {
    pub iteration: usize,
    pub seeds: Vec<u64>,
    pub best_seed: u64,
    pub proof_before: usize,
    pub proof_after: usize,
    pub core_clauses: usize,
    /// Core clauses that were not in the previous iteration's core.
    pub reintroduced: usize,
    pub subgraph_vertices: Option<usize>,
    pub subgraph_edges: Option<usize>,
    pub wall_ms: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Patience,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrimReport {
    pub mode: TrimMode,
    pub input_clauses: usize,
    pub iterations: Vec<TrimIteration>,
    /// Ids of the returned core in the input formula.
    pub final_core: Vec<ClauseId>,
    pub stop_reason: StopReason,
}

fn has_graph_tags(formula: &Formula) -> bool {
    formula
        .iter()
        .any(|(id, _)| matches!(formula.group(id), Group::Vertex(_) | Group::Edge { .. }))
}

/// Grows a core to every vertex clause and edge clause among its vertices,
/// plus all symmetry clauses.
pub fn reinduce(formula: &Formula, core: &[ClauseId]) -> Vec<ClauseId> {
    let in_core: BTreeSet<ClauseId> = core.iter().copied().collect();
    let vertices = core_vertices(&formula.restrict(core));
    formula
        .active_ids()
        .into_iter()
        .filter(|id| match formula.group(*id) {
            Group::Vertex(v) => vertices.contains(&v),
            Group::Edge { u, v, .. } => vertices.contains(&u) && vertices.contains(&v),
            Group::Symmetry => true,
            Group::Blocking | Group::Other => in_core.contains(id),
        })
        .collect()
}

fn distinct_edges(formula: &Formula, ids: &[ClauseId]) -> usize {
    ids.iter()
        .filter_map(|&id| match formula.group(id) {
            Group::Edge { u, v, .. } => Some((u, v)),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .len()
}

pub fn trim_plain(formula: &Formula, config: &TrimConfig) -> Result<(Formula, TrimReport), TrimError> {
    trim(formula, config, TrimMode::Plain)
}

pub fn trim_interact(formula: &Formula, config: &TrimConfig) -> Result<(Formula, TrimReport), TrimError> {
    trim(formula, config, TrimMode::Interact)
}

/// Alternates proof search, proof optimisation and core extraction. Returns
/// the smallest core seen; in interact mode proofs are also optimised
/// against the whole input, so dropped clauses can come back.
pub fn trim(formula: &Formula, config: &TrimConfig, mode: TrimMode) -> Result<(Formula, TrimReport), TrimError> {
    let graph_aware = config.graph_aware.unwrap_or_else(|| has_graph_tags(formula));
    let mut current: Vec<ClauseId> = formula.active_ids();
    let mut best = current.clone();
    let mut iterations = Vec::new();
    let mut stale = 0;
    let mut stop_reason = StopReason::MaxIterations;
    let per_iter = config.seeds_per_iteration.max(1) as u64;

    for iteration in 0..config.max_iterations {
        let started = Instant::now();
        let f_core = formula.restrict(&current);
        let seeds: Vec<u64> = (0..per_iter)
            .map(|i| config.seed.wrapping_add(iteration as u64 * per_iter + i))
            .collect();
        let (best_seed, proof) = match best_proof_of(&f_core, &seeds, &config.solver)? {
            Sweep::Sat { model, .. } => return Err(TrimError::FormulaSatisfiable(model)),
            Sweep::Unsat { seed, proof, .. } => (seed, proof),
        };
        let opt_config = ShuffleConfig {
            seed: config.optimize.seed ^ best_seed,
            ..config.optimize.clone()
        };
        let mut optimized = optimize_proof(&proof, &f_core, &opt_config)?;
        if mode == TrimMode::Interact {
            optimized = optimize_proof(&optimized.proof, formula, &opt_config)?;
        }
        let mut next = optimized.core.clone();
        if graph_aware {
            next = reinduce(formula, &next);
        }
        iterations.push(TrimIteration {
            iteration,
            seeds,
            best_seed,
            proof_before: proof.additions(),
            proof_after: optimized.proof.additions(),
            core_clauses: next.len(),
            reintroduced: {
                let previous: BTreeSet<ClauseId> = current.iter().copied().collect();
                next.iter().filter(|id| !previous.contains(id)).count()
            },
            subgraph_vertices: graph_aware.then(|| core_vertices(&formula.restrict(&next)).len()),
            subgraph_edges: graph_aware.then(|| distinct_edges(formula, &next)),
            wall_ms: started.elapsed().as_millis(),
        });
        if next.len() < best.len() {
            best = next.clone();
            stale = 0;
        } else {
            stale += 1;
        }
        current = next;
        if stale >= config.patience {
            stop_reason = StopReason::Patience;
            break;
        }
    }

    let report = TrimReport {
        mode,
        input_clauses: formula.active_count(),
        iterations,
        final_core: best.clone(),
        stop_reason,
    };
    Ok((formula.restrict(&best), report))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MusResult {
    pub formula: Formula,
    /// False when some solver call ran out of budget, so a clause may have
    /// been kept without proof that it is needed.
    pub minimal: bool,
}

/// Destructive MUS extraction in a seeded random order. Each successful
/// removal also shrinks the working set to the core of the new proof.
pub fn mus_destructive(formula: &Formula, seed: u64, budget: Option<u64>) -> Result<MusResult, TrimError> {
    let config = SolverConfig {
        conflict_budget: budget,
        ..SolverConfig::with_seed(seed)
    };
    let unbounded = SolverConfig::with_seed(seed);
    let first = solve_with(formula, &unbounded)?;
    let mut current: BTreeSet<ClauseId> = match &first.outcome {
        Outcome::Sat(model) => return Err(TrimError::FormulaSatisfiable(model.clone())),
        Outcome::Unsat(proof) => {
            let j = backward_check(formula, proof).map_err(OptimizeError::from)?;
            j.core().iter().copied().collect()
        }
    };
    let mut order = formula.active_ids();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut minimal = true;
    for id in order {
        if !current.contains(&id) {
            continue;
        }
        let candidate: Vec<ClauseId> = current.iter().copied().filter(|&c| c != id).collect();
        let sub = formula.restrict(&candidate);
        match solve_with(&sub, &config) {
            Ok(r) => match r.outcome {
                Outcome::Sat(_) => {}
                Outcome::Unsat(proof) => {
                    let j = backward_check(&sub, &proof).map_err(OptimizeError::from)?;
                    current = j.core().iter().copied().collect();
                }
            },
            Err(SolveError::ResourceLimit { .. }) => minimal = false,
            Err(e) => return Err(e.into()),
        }
    }
    let ids: Vec<ClauseId> = current.into_iter().collect();
    Ok(MusResult {
        formula: formula.restrict(&ids),
        minimal,
    })
}

fn plain_encoding() -> EncodeOptions {
    EncodeOptions {
        symmetry: false,
        at_most_one: false,
    }
}

/// `Ok(None)` if `graph` has no k-colouring, else one colouring.
fn coloring_of(graph: &UnitDistanceGraph, k: usize, config: &SolverConfig) -> Result<Option<Vec<usize>>, TrimError> {
    let (f, map) = encode_coloring(graph, k, plain_encoding())?;
    match solve_with(&f, config)?.outcome {
        Outcome::Sat(model) => Ok(Some(crate::encode::decode_model(&model, &map)?)),
        Outcome::Unsat(_) => Ok(None),
    }
}

/// Removes vertices in seeded random order while the graph stays
/// non-k-colourable. Returns the critical subgraph and its vertices as
/// indices into `graph`.
pub fn vertex_critical_reduce(
    graph: &UnitDistanceGraph,
    k: usize,
    seed: u64,
) -> Result<(UnitDistanceGraph, Vec<usize>), TrimError> {
    let config = SolverConfig::with_seed(seed);
    if let Some(coloring) = coloring_of(graph, k, &config)? {
        return Err(TrimError::GraphColorable(coloring));
    }
    let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut current: BTreeSet<usize> = order.iter().copied().collect();
    for v in order {
        if !current.contains(&v) {
            continue;
        }
        let keep: Vec<usize> = current.iter().copied().filter(|&u| u != v).collect();
        let sub = graph.induced(&keep);
        let (f, _) = encode_coloring(&sub, k, plain_encoding())?;
        if let Outcome::Unsat(proof) = solve_with(&f, &config)?.outcome {
            let j = backward_check(&f, &proof).map_err(OptimizeError::from)?;
            let used = core_vertices(&f.restrict(j.core()));
            current = used.into_iter().map(|i| keep[i]).collect();
        }
    }
    let keep: Vec<usize> = current.into_iter().collect();
    Ok((graph.induced(&keep), keep))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShrinkReport {
    pub colors: usize,
    pub symmetry: bool,
    pub input_vertices: usize,
    pub input_edges: usize,
    pub trim: TrimReport,
    pub mus_clauses: Option<usize>,
    pub mus_minimal: Option<bool>,
    pub core_vertices: usize,
    pub core_edges: usize,
    pub final_vertices: usize,
    pub final_edges: usize,
    /// Vertices of the result as indices into the input graph.
    pub kept: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkConfig {
    pub trim: TrimConfig,
    pub mode: TrimMode,
    /// Run destructive MUS on the trimmed core.
    pub mus: bool,
    pub mus_budget: Option<u64>,
}

impl Default for ShrinkConfig {
    fn default() -> Self {
        ShrinkConfig {
            trim: TrimConfig::default(),
            mode: TrimMode::Interact,
            mus: true,
            mus_budget: None,
        }
    }
}

/// Encode, trim, MUS, map back to a subgraph and make it vertex-critical.
pub fn shrink_graph(
    graph: &UnitDistanceGraph,
    k: usize,
    config: &ShrinkConfig,
) -> Result<(UnitDistanceGraph, ShrinkReport), TrimError> {
    let symmetry = k >= 3 && symmetry_triangle(graph).is_some();
    let options = EncodeOptions {
        symmetry,
        at_most_one: false,
    };
    let (f, _) = encode_coloring(graph, k, options)?;
    let (core, trim_report) = trim(&f, &config.trim, config.mode)?;
    let (core, mus_clauses, mus_minimal) = if config.mus {
        let mus = mus_destructive(&core, config.trim.seed, config.mus_budget)?;
        let n = mus.formula.active_count();
        (mus.formula, Some(n), Some(mus.minimal))
    } else {
        (core, None, None)
    };
    let (sub, sub_kept) = core_to_subgraph(&core, graph);
    let (critical, crit_kept) = vertex_critical_reduce(&sub, k, config.trim.seed)?;
    let kept: Vec<usize> = crit_kept.iter().map(|&i| sub_kept[i]).collect();
    let report = ShrinkReport {
        colors: k,
        symmetry,
        input_vertices: graph.vertex_count(),
        input_edges: graph.edge_count(),
        trim: trim_report,
        mus_clauses,
        mus_minimal,
        core_vertices: sub.vertex_count(),
        core_edges: sub.edge_count(),
        final_vertices: critical.vertex_count(),
        final_edges: critical.edge_count(),
        kept,
    };
    Ok((critical, report))
}
