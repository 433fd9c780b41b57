//! Proof optimisation: recompute the justification, drop unused steps and
//! reorder the rest at random, respecting dependencies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Clause, ClauseId, Formula};
use crate::proof::{backward_check, trim_proof, CheckError, ClausalProof, ClauseRef, Justification, ProofStep};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShuffleConfig {
    pub seed: u64,
    /// Deletions go up to this many steps after a clause's last use.
    pub deletion_window: usize,
    pub window_increment: usize,
    pub max_iterations: usize,
    /// Stop after this many iterations without a smaller proof.
    pub patience: usize,
}

impl Default for ShuffleConfig {
    fn default() -> Self {
        ShuffleConfig {
            seed: 0,
            deletion_window: 0,
            window_increment: 10,
            max_iterations: 20,
            patience: 3,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OptimizeError {
    #[error("justification contains a cycle")]
    CyclicJustification,
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Random linear extension of the marked additions of `proof`, with the
/// literals of each clause permuted. The empty clause comes last. Each added
/// clause is deleted a random number of additions (at most `window`) after
/// its last use, unless that would fall at or after the empty clause.
pub fn shuffle_proof(
    justification: &Justification,
    proof: &ClausalProof,
    window: usize,
    seed: u64,
) -> Result<ClausalProof, OptimizeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bottom = justification.empty_step();
    let nodes: Vec<usize> = justification.marked_steps().filter(|&s| s != bottom).collect();
    let mut node_of = vec![usize::MAX; proof.len()];
    for (n, &s) in nodes.iter().enumerate() {
        node_of[s] = n;
    }
    let deps = |s: usize| -> Vec<usize> {
        justification
            .antecedents(s)
            .unwrap_or(&[])
            .iter()
            .filter_map(|r| match *r {
                ClauseRef::Step(d) if node_of[d] != usize::MAX => Some(node_of[d]),
                _ => None,
            })
            .collect()
    };

    let mut indegree = vec![0usize; nodes.len()];
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (n, &s) in nodes.iter().enumerate() {
        for d in deps(s) {
            indegree[n] += 1;
            users[d].push(n);
        }
    }
    let mut ready: Vec<usize> = (0..nodes.len()).filter(|&n| indegree[n] == 0).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while !ready.is_empty() {
        let pick = rng.gen_range(0..ready.len());
        let n = ready.swap_remove(pick);
        order.push(n);
        for &u in &users[n] {
            indegree[u] -= 1;
            if indegree[u] == 0 {
                ready.push(u);
            }
        }
    }
    if order.len() != nodes.len() {
        return Err(OptimizeError::CyclicJustification);
    }

    let mut position = vec![0usize; nodes.len()];
    for (p, &n) in order.iter().enumerate() {
        position[n] = p;
    }
    // additions consuming each node; the empty clause sits at order.len()
    let mut last_use: Vec<usize> = position.clone();
    for (n, &s) in nodes.iter().enumerate() {
        for d in deps(s) {
            last_use[d] = last_use[d].max(position[n]);
        }
    }
    for d in deps(bottom) {
        last_use[d] = order.len();
    }
    let mut deletions_after: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    for n in 0..nodes.len() {
        let at = last_use[n] + rng.gen_range(0..=window);
        if at < order.len() {
            deletions_after[at].push(n);
        }
    }

    let mut out = ClausalProof::new();
    let mut shuffled: Vec<Option<Clause>> = vec![None; nodes.len()];
    for (p, &n) in order.iter().enumerate() {
        let mut lits = proof.steps()[nodes[n]].clause.lits().to_vec();
        lits.shuffle(&mut rng);
        let clause = Clause::new(lits);
        out.push(ProofStep::add(clause.clone()));
        shuffled[n] = Some(clause);
        for &d in &deletions_after[p] {
            out.push(ProofStep::delete(shuffled[d].clone().expect("placed before its users")));
        }
    }
    out.add(Clause::empty());
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub window: usize,
    /// Additions after dropping unmarked steps.
    pub size: usize,
    pub best: usize,
    pub core: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimized {
    /// Smallest proof seen, trimmed.
    pub proof: ClausalProof,
    /// Core of `proof`.
    pub core: Vec<ClauseId>,
    pub trace: Vec<TraceEntry>,
}

/// Repeats check, trim and shuffle until `patience` iterations pass without
/// a strictly smaller proof or `max_iterations` is reached.
pub fn optimize_proof(
    proof: &ClausalProof,
    formula: &Formula,
    config: &ShuffleConfig,
) -> Result<Optimized, OptimizeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut current = proof.clone();
    let mut window = config.deletion_window;
    let mut best: Option<(ClausalProof, Vec<ClauseId>)> = None;
    let mut trace = Vec::new();
    let mut stale = 0;
    for iteration in 0..config.max_iterations.max(1) {
        let j = backward_check(formula, &current)?;
        let trimmed = trim_proof(&j, &current);
        let size = trimmed.additions();
        let improved = best.as_ref().map_or(true, |(p, _)| size < p.additions());
        if improved {
            best = Some((trimmed, j.core().to_vec()));
            stale = 0;
        } else {
            stale += 1;
        }
        let (best_proof, best_core) = best.as_ref().expect("set above");
        trace.push(TraceEntry {
            iteration,
            window,
            size,
            best: best_proof.additions(),
            core: best_core.len(),
        });
        if stale >= config.patience || iteration + 1 >= config.max_iterations {
            break;
        }
        current = shuffle_proof(&j, &current, window, rng.gen())?;
        window += config.window_increment;
    }
    let (proof, core) = best.expect("at least one iteration");
    Ok(Optimized { proof, core, trace })
}
