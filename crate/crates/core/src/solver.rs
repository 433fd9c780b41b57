//! CDCL solver that logs every learned clause and every clause-database
//! deletion as a DRUP proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Assignment, Clause, Formula, Lit};
use crate::proof::{CheckError, ClausalProof};

mod external;

pub use external::solve_external;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub seed: u64,
    /// Give up after this many conflicts.
    pub conflict_budget: Option<u64>,
    /// Conflicts per Luby unit.
    pub restart_unit: u64,
    /// Conflicts before the first clause-database reduction.
    pub reduce_first: u64,
    /// Added to the reduction interval after every reduction.
    pub reduce_increment: u64,
    pub var_decay: f64,
    pub clause_decay: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            conflict_budget: None,
            restart_unit: 64,
            reduce_first: 2000,
            reduce_increment: 300,
            var_decay: 0.95,
            clause_decay: 0.999,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> SolverConfig {
        SolverConfig {
            seed,
            ..SolverConfig::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub reductions: u64,
    /// Proof addition steps, the empty clause included.
    pub additions: usize,
    pub deletions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat(Assignment),
    Unsat(ClausalProof),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub stats: SolveStats,
    /// `None` for external solvers.
    pub seed: Option<u64>,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat(_))
    }

    pub fn model(&self) -> Option<&Assignment> {
        match &self.outcome {
            Outcome::Sat(m) => Some(m),
            Outcome::Unsat(_) => None,
        }
    }

    pub fn proof(&self) -> Option<&ClausalProof> {
        match &self.outcome {
            Outcome::Unsat(p) => Some(p),
            Outcome::Sat(_) => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("conflict budget of {budget} exhausted")]
    ResourceLimit { budget: u64 },
    #[error("external solver crashed: {0}")]
    SolverCrashed(String),
    #[error("unparsable solver output: {0}")]
    UnparsableOutput(String),
    #[error("external model does not satisfy the formula: {0}")]
    InvalidModel(String),
    #[error("external proof rejected: {0}")]
    ProofRejected(CheckError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn solve(formula: &Formula, seed: u64) -> Result<SolveResult, SolveError> {
    solve_with(formula, &SolverConfig::with_seed(seed))
}

pub fn solve_with(formula: &Formula, config: &SolverConfig) -> Result<SolveResult, SolveError> {
    let mut solver = Solver::new(formula, config);
    let outcome = solver.run()?;
    let mut stats = solver.stats.clone();
    stats.additions = solver.proof.additions();
    stats.deletions = solver.proof.deletions();
    let outcome = match outcome {
        true => {
            let model = solver.model();
            debug_assert!(formula.is_satisfied_by(&model));
            Outcome::Sat(model)
        }
        false => Outcome::Unsat(solver.proof),
    };
    Ok(SolveResult {
        outcome,
        stats,
        seed: Some(config.seed),
    })
}

/// Proof size of one run in a seed sweep; `None` when the run hit its budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedRun {
    pub seed: u64,
    pub additions: Option<usize>,
    pub conflicts: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sweep {
    Unsat {
        seed: u64,
        proof: ClausalProof,
        runs: Vec<SeedRun>,
    },
    Sat {
        seed: u64,
        model: Assignment,
    },
}

/// Solves `formula` once per seed in parallel and keeps the proof with the
/// fewest additions (lowest seed on ties).
pub fn best_proof_of(formula: &Formula, seeds: &[u64], base: &SolverConfig) -> Result<Sweep, SolveError> {
    let results: Vec<(u64, Result<SolveResult, SolveError>)> = seeds
        .par_iter()
        .map(|&seed| {
            let config = SolverConfig { seed, ..base.clone() };
            (seed, solve_with(formula, &config))
        })
        .collect();

    let mut runs = Vec::new();
    let mut best: Option<(u64, ClausalProof)> = None;
    let mut sat: Option<(u64, Assignment)> = None;
    let mut last_err = None;
    for (seed, result) in results {
        match result {
            Ok(r) => {
                let conflicts = r.stats.conflicts;
                match r.outcome {
                    Outcome::Sat(model) => {
                        if sat.as_ref().map_or(true, |(s, _)| seed < *s) {
                            sat = Some((seed, model));
                        }
                    }
                    Outcome::Unsat(proof) => {
                        let size = proof.additions();
                        runs.push(SeedRun {
                            seed,
                            additions: Some(size),
                            conflicts,
                        });
                        let better = match &best {
                            None => true,
                            Some((s, p)) => size < p.additions() || (size == p.additions() && seed < *s),
                        };
                        if better {
                            best = Some((seed, proof));
                        }
                    }
                }
            }
            Err(e @ SolveError::ResourceLimit { .. }) => {
                runs.push(SeedRun {
                    seed,
                    additions: None,
                    conflicts: base.conflict_budget.unwrap_or(0),
                });
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    if let Some((seed, model)) = sat {
        return Ok(Sweep::Sat { seed, model });
    }
    match best {
        Some((seed, proof)) => Ok(Sweep::Unsat { seed, proof, runs }),
        None => Err(last_err.unwrap_or(SolveError::ResourceLimit { budget: 0 })),
    }
}

const NO_REASON: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

struct ClauseData {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

#[inline]
fn lit_val(value: &[i8], l: Lit) -> i8 {
    let v = value[l.var() as usize];
    if l.is_positive() {
        v
    } else {
        -v
    }
}

/// Binary max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(num_vars: usize) -> VarHeap {
        VarHeap {
            heap: Vec::with_capacity(num_vars),
            pos: vec![NOT_IN_HEAP; num_vars + 1],
        }
    }

    fn less(act: &[f64], a: u32, b: u32) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != NOT_IN_HEAP
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::less(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && Self::less(act, self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !Self::less(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v as usize] = i;
        self.sift_up(i, act);
    }

    fn increased(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v as usize], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }
}

fn luby(mut x: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

struct Solver<'a> {
    config: &'a SolverConfig,
    num_vars: usize,
    clauses: Vec<ClauseData>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    phase: Vec<bool>,
    seen: Vec<bool>,
    level_stamp: Vec<u64>,
    stamp: u64,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    proof: ClausalProof,
    stats: SolveStats,
    /// Input clauses that are empty or contradict at level 0.
    trivially_unsat: bool,
    pending_units: Vec<Lit>,
}

impl<'a> Solver<'a> {
    fn new(formula: &Formula, config: &'a SolverConfig) -> Solver<'a> {
        let num_vars = formula
            .iter()
            .map(|(_, c)| c.max_var() as usize)
            .max()
            .unwrap_or(0)
            .max(formula.num_vars());
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut activity = vec![0.0; num_vars + 1];
        for a in activity.iter_mut().skip(1) {
            *a = rng.gen::<f64>();
        }
        let mut heap = VarHeap::new(num_vars);
        for v in 1..=num_vars as u32 {
            heap.insert(v, &activity);
        }
        let mut s = Solver {
            config,
            num_vars,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2 * num_vars],
            value: vec![0; num_vars + 1],
            level: vec![0; num_vars + 1],
            reason: vec![NO_REASON; num_vars + 1],
            phase: vec![false; num_vars + 1],
            seen: vec![false; num_vars + 1],
            level_stamp: vec![0; num_vars + 1],
            stamp: 0,
            trail: Vec::with_capacity(num_vars),
            trail_lim: Vec::new(),
            qhead: 0,
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            proof: ClausalProof::new(),
            stats: SolveStats::default(),
            trivially_unsat: false,
            pending_units: Vec::new(),
        };
        for (_, c) in formula.iter() {
            if c.is_tautology() {
                continue;
            }
            match c.len() {
                0 => s.trivially_unsat = true,
                1 => s.pending_units.push(c.lits()[0]),
                _ => {
                    s.attach_new(c.lits().to_vec(), false, 0);
                }
            }
        }
        s
    }

    fn attach_new(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].code()].push(Watcher {
            cref,
            blocker: lits[1],
        });
        self.watches[lits[1].code()].push(Watcher {
            cref,
            blocker: lits[0],
        });
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        self.value[v] = if l.is_positive() { 1 } else { -1 };
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let false_lit = !self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_val(&self.value, w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c.deleted {
                    continue;
                }
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                if first != w.blocker && lit_val(&self.value, first) == 1 {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    if lit_val(&self.value, c.lits[k]) != -1 {
                        c.lits.swap(1, k);
                        let new_watch = c.lits[1];
                        self.watches[new_watch.code()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if lit_val(&self.value, first) == -1 {
                    conflict = Some(w.cref);
                    break;
                }
                self.enqueue(first, w.cref);
            }
            while i < ws.len() {
                ws[j] = ws[i];
                i += 1;
                j += 1;
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP learning with local minimization. The asserting literal
    /// comes first, a literal of the backjump level second.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::positive(1)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if !self.seen[v as usize] && self.level[v as usize] > 0 {
                    self.seen[v as usize] = true;
                    self.bump_var(v);
                    if self.level[v as usize] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var() as usize] = false;
            p = Some(lit);
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize];
        }
        learnt[0] = !p.expect("conflict has a literal at the current level");

        let original = learnt.clone();
        let mut kept = 1;
        for k in 1..learnt.len() {
            let l = learnt[k];
            let r = self.reason[l.var() as usize];
            let redundant = r != NO_REASON
                && self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let v = q.var() as usize;
                    self.seen[v] || self.level[v] == 0
                });
            if !redundant {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for l in original {
            self.seen[l.var() as usize] = false;
        }

        let mut backjump = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            backjump = self.level[learnt[1].var() as usize];
        }
        (learnt, backjump)
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        self.stamp += 1;
        let mut n = 0;
        for l in lits {
            let lv = self.level[l.var() as usize] as usize;
            if self.level_stamp[lv] != self.stamp {
                self.level_stamp[lv] = self.stamp;
                n += 1;
            }
        }
        n
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var() as usize;
            self.value[v] = 0;
            self.reason[v] = NO_REASON;
            self.phase[v] = l.is_positive();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn locked(&self, cref: u32) -> bool {
        let first = self.clauses[cref as usize].lits[0];
        lit_val(&self.value, first) == 1 && self.reason[first.var() as usize] == cref
    }

    /// Deletes the less useful half of the learned clauses with LBD above 2.
    fn reduce_db(&mut self) {
        self.stats.reductions += 1;
        let mut candidates: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| self.clauses[c as usize].lbd > 2 && !self.locked(c))
            .collect();
        candidates.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.total_cmp(&cb.activity))
                .then(a.cmp(&b))
        });
        candidates.truncate(candidates.len() / 2);
        for &c in &candidates {
            let data = &mut self.clauses[c as usize];
            data.deleted = true;
            self.proof.delete(Clause::new(data.lits.iter().copied()));
            data.lits = Vec::new();
        }
        let clauses = &self.clauses;
        self.learnts.retain(|&c| !clauses[c as usize].deleted);
        for list in &mut self.watches {
            list.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.value[v as usize] == 0 {
                return Some(if self.phase[v as usize] {
                    Lit::positive(v)
                } else {
                    Lit::negative(v)
                });
            }
        }
        None
    }

    /// True for SAT, false for UNSAT with the proof complete.
    fn run(&mut self) -> Result<bool, SolveError> {
        if self.trivially_unsat {
            self.proof.add(Clause::empty());
            return Ok(false);
        }
        let units = std::mem::take(&mut self.pending_units);
        for l in units {
            match lit_val(&self.value, l) {
                1 => {}
                -1 => {
                    self.proof.add(Clause::empty());
                    return Ok(false);
                }
                _ => self.enqueue(l, NO_REASON),
            }
        }

        let mut restart_count = 0u64;
        let mut restart_limit = luby(0) * self.config.restart_unit;
        let mut since_restart = 0u64;
        let mut next_reduce = self.config.reduce_first;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    self.proof.add(Clause::empty());
                    return Ok(false);
                }
                if let Some(budget) = self.config.conflict_budget {
                    if self.stats.conflicts > budget {
                        return Err(SolveError::ResourceLimit { budget });
                    }
                }
                let (learnt, backjump) = self.analyze(confl);
                self.cancel_until(backjump);
                self.proof.add(Clause::new(learnt.iter().copied()));
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let cref = self.attach_new(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(asserting, cref);
                }
                self.var_inc /= self.config.var_decay;
                self.cla_inc /= self.config.clause_decay;
                continue;
            }

            if since_restart >= restart_limit {
                restart_count += 1;
                self.stats.restarts += 1;
                since_restart = 0;
                restart_limit = luby(restart_count) * self.config.restart_unit;
                self.cancel_until(0);
            }
            if self.stats.conflicts >= next_reduce {
                next_reduce = self.stats.conflicts
                    + self.config.reduce_first
                    + self.config.reduce_increment * (self.stats.reductions + 1);
                self.reduce_db();
            }

            match self.pick_branch() {
                None => return Ok(true),
                Some(l) => {
                    self.stats.decisions += 1;
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(l, NO_REASON);
                }
            }
        }
    }

    fn model(&self) -> Assignment {
        Assignment::from_lits((1..=self.num_vars as u32).map(|v| {
            if self.value[v as usize] == 1 {
                Lit::positive(v)
            } else {
                Lit::negative(v)
            }
        }))
    }
}
