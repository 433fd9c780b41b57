//! CNF formulas, partial assignments and unit propagation.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Not;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub mod dimacs;

pub use dimacs::{parse_dimacs, parse_groups, write_dimacs, write_dimacs_with_ids, write_groups};

/// Stable index of a clause inside a [`Formula`].
pub type ClauseId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("literal {lit} out of range for {vars} variables")]
    LiteralOutOfRange { lit: i64, vars: usize },
    #[error("clause not terminated by 0")]
    UnterminatedClause,
    #[error("line {line}: {msg}")]
    BadToken { line: usize, msg: String },
    #[error("group sidecar line {line}: {msg}")]
    BadGroup { line: usize, msg: String },
}

/// A literal in DIMACS convention: `v` or `-v` for a variable `v ≥ 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn new(dimacs: i32) -> Lit {
        assert!(dimacs != 0, "0 is not a literal");
        Lit(dimacs)
    }

    pub fn positive(var: u32) -> Lit {
        Lit::new(var as i32)
    }

    pub fn negative(var: u32) -> Lit {
        Lit::new(-(var as i32))
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Dense code `2·(var-1) + negative`, for literal-indexed tables.
    pub fn code(self) -> usize {
        2 * (self.var() as usize - 1) + usize::from(self.0 < 0)
    }

    pub fn from_code(code: usize) -> Lit {
        let var = (code / 2 + 1) as i32;
        Lit(if code % 2 == 1 { -var } else { var })
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Disjunction of literals without repetitions. The empty clause is ⊥.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Keeps the first occurrence of each repeated literal.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Clause {
        let mut out: Vec<Lit> = Vec::new();
        for l in lits {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        Clause { lits: out }
    }

    pub fn from_dimacs(lits: &[i32]) -> Clause {
        Clause::new(lits.iter().map(|&l| Lit::new(l)))
    }

    pub fn empty() -> Clause {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_tautology(&self) -> bool {
        self.lits.iter().any(|&l| self.lits.contains(&!l))
    }

    pub fn max_var(&self) -> u32 {
        self.lits.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    /// Literals sorted by DIMACS value; equal for clauses that differ only
    /// in literal order.
    pub fn sorted_key(&self) -> Vec<Lit> {
        let mut key = self.lits.clone();
        key.sort_unstable();
        key
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.lits).finish()
    }
}

/// Provenance tag of a clause, used to map cores back to graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Group {
    /// At-least-one-color clause of a vertex.
    Vertex(usize),
    /// Endpoints may not both take `color`.
    Edge { u: usize, v: usize, color: usize },
    Symmetry,
    Blocking,
    #[default]
    Other,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::Vertex(v) => write!(f, "vertex {v}"),
            Group::Edge { u, v, color } => write!(f, "edge {u} {v} {color}"),
            Group::Symmetry => f.write_str("symmetry"),
            Group::Blocking => f.write_str("blocking"),
            Group::Other => f.write_str("other"),
        }
    }
}

/// A clause list with stable ids. Removing a clause tombstones its slot.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
    groups: Vec<Group>,
    removed: Vec<bool>,
}

impl Formula {
    pub fn new(num_vars: usize) -> Formula {
        Formula {
            num_vars,
            ..Formula::default()
        }
    }

    pub fn from_clauses(num_vars: usize, clauses: impl IntoIterator<Item = Clause>) -> Formula {
        let mut f = Formula::new(num_vars);
        for c in clauses {
            f.push(c, Group::Other);
        }
        f
    }

    /// Appends a clause, growing the variable count if needed.
    pub fn push(&mut self, clause: Clause, group: Group) -> ClauseId {
        self.num_vars = self.num_vars.max(clause.max_var() as usize);
        self.clauses.push(clause);
        self.groups.push(group);
        self.removed.push(false);
        self.clauses.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_num_vars(&mut self, n: usize) {
        self.num_vars = self.num_vars.max(n);
    }

    /// Number of slots, including tombstones.
    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.removed.iter().filter(|r| !**r).count()
    }

    pub fn clause(&self, id: ClauseId) -> &Clause {
        &self.clauses[id]
    }

    pub fn group(&self, id: ClauseId) -> Group {
        self.groups[id]
    }

    pub fn set_group(&mut self, id: ClauseId, group: Group) {
        self.groups[id] = group;
    }

    pub fn is_active(&self, id: ClauseId) -> bool {
        !self.removed[id]
    }

    pub fn remove(&mut self, id: ClauseId) {
        self.removed[id] = true;
    }

    pub fn restore(&mut self, id: ClauseId) {
        self.removed[id] = false;
    }

    /// Active clauses with their ids.
    pub fn iter(&self) -> impl Iterator<Item = (ClauseId, &Clause)> + '_ {
        self.clauses
            .iter()
            .enumerate()
            .filter(move |(i, _)| !self.removed[*i])
    }

    pub fn active_ids(&self) -> Vec<ClauseId> {
        self.iter().map(|(i, _)| i).collect()
    }

    /// Same slots, with only `ids` left active.
    pub fn restrict(&self, ids: &[ClauseId]) -> Formula {
        let mut out = self.clone();
        out.removed.iter_mut().for_each(|r| *r = true);
        for &id in ids {
            out.removed[id] = false;
        }
        out
    }

    /// Copy without tombstones (ids renumbered), plus the original id of each
    /// kept clause.
    pub fn compact(&self) -> (Formula, Vec<ClauseId>) {
        let mut out = Formula::new(self.num_vars);
        let mut origin = Vec::new();
        for (id, c) in self.iter() {
            out.push(c.clone(), self.groups[id]);
            origin.push(id);
        }
        (out, origin)
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.iter().all(|(_, c)| assignment.satisfies(c))
    }
}

/// Partial map from variables to truth values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Assignment {
    values: Vec<Option<bool>>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Assignment {
        let mut a = Assignment::new();
        for l in lits {
            a.assign(l);
        }
        a
    }

    pub fn value(&self, var: u32) -> Option<bool> {
        self.values.get(var as usize).copied().flatten()
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.value(lit.var()).map(|v| v == lit.is_positive())
    }

    /// Makes `lit` true. Returns false, leaving the assignment unchanged, if
    /// its variable already has the opposite value.
    pub fn assign(&mut self, lit: Lit) -> bool {
        let var = lit.var() as usize;
        if self.values.len() <= var {
            self.values.resize(var + 1, None);
        }
        match self.values[var] {
            Some(v) if v != lit.is_positive() => false,
            _ => {
                self.values[var] = Some(lit.is_positive());
                true
            }
        }
    }

    pub fn unassign(&mut self, var: u32) {
        if let Some(slot) = self.values.get_mut(var as usize) {
            *slot = None;
        }
    }

    pub fn satisfies(&self, clause: &Clause) -> bool {
        clause.lits().iter().any(|&l| self.lit_value(l) == Some(true))
    }

    /// Assigned variables as true literals, by variable.
    pub fn lits(&self) -> Vec<Lit> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, val)| val.map(|b| if b { Lit::positive(v as u32) } else { Lit::negative(v as u32) }))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `F|α`: satisfied clauses are tombstoned, falsified literals dropped.
pub fn reduce(formula: &Formula, assignment: &Assignment) -> Formula {
    let mut out = formula.clone();
    for id in 0..formula.len() {
        if !formula.is_active(id) {
            continue;
        }
        let c = formula.clause(id);
        if assignment.satisfies(c) {
            out.remove(id);
        } else {
            out.clauses[id] = Clause::new(c.lits().iter().copied().filter(|&l| assignment.lit_value(l).is_none()));
        }
    }
    out
}

/// Order in which pending assignments are processed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PropagationOrder {
    /// Queue order, clauses visited by increasing id.
    #[default]
    Fifo,
    /// Clause visiting order permuted by a seeded generator.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    /// Ids of the clauses on the implication trail that lead to the conflict.
    Conflict(Vec<ClauseId>),
    Fixpoint(Assignment),
}

impl Propagation {
    pub fn is_conflict(&self) -> bool {
        matches!(self, Propagation::Conflict(_))
    }
}

pub fn unit_propagate(formula: &Formula, assignment: &Assignment) -> Propagation {
    unit_propagate_with(formula, assignment, PropagationOrder::Fifo)
}

/// Unit propagation on `formula` starting from `assignment`.
///
/// The assignment's own consequences are propagated to a fixpoint first; the
/// formula's unit clauses are enqueued afterwards, in clause order.
pub fn unit_propagate_with(formula: &Formula, assignment: &Assignment, order: PropagationOrder) -> Propagation {
    let num_vars = formula.num_vars().max(assignment.values.len().saturating_sub(1));
    let mut occurrences: Vec<Vec<ClauseId>> = vec![Vec::new(); 2 * num_vars];
    let mut scan: Vec<ClauseId> = formula.active_ids();
    if let PropagationOrder::Seeded(seed) = order {
        scan.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    for &id in &scan {
        for l in formula.clause(id).lits() {
            occurrences[l.code()].push(id);
        }
    }

    let mut values = assignment.clone();
    let mut reason: Vec<Option<ClauseId>> = vec![None; num_vars + 1];
    let mut queue: VecDeque<Lit> = values.lits().into();

    // Returns Some(conflict) or assigns a unit.
    let visit = |id: ClauseId, values: &mut Assignment, reason: &mut Vec<Option<ClauseId>>, queue: &mut VecDeque<Lit>| {
        let c = formula.clause(id);
        let mut unassigned = None;
        let mut open = 0;
        for &l in c.lits() {
            match values.lit_value(l) {
                Some(true) => return None,
                Some(false) => {}
                None => {
                    open += 1;
                    unassigned = Some(l);
                }
            }
        }
        match (open, unassigned) {
            (0, _) => Some(id),
            (1, Some(l)) => {
                values.assign(l);
                reason[l.var() as usize] = Some(id);
                queue.push_back(l);
                None
            }
            _ => None,
        }
    };

    let mut units_enqueued = false;
    let conflict = loop {
        if let Some(l) = queue.pop_front() {
            let mut found = None;
            for &id in &occurrences[(!l).code()] {
                if let Some(c) = visit(id, &mut values, &mut reason, &mut queue) {
                    found = Some(c);
                    break;
                }
            }
            if found.is_some() {
                break found;
            }
        } else if !units_enqueued {
            units_enqueued = true;
            let mut found = None;
            for &id in &scan {
                if formula.clause(id).len() <= 1 {
                    if let Some(c) = visit(id, &mut values, &mut reason, &mut queue) {
                        found = Some(c);
                        break;
                    }
                }
            }
            if found.is_some() {
                break found;
            }
        } else {
            break None;
        }
    };

    match conflict {
        None => Propagation::Fixpoint(values),
        Some(conflict) => {
            let mut used = vec![conflict];
            let mut seen = vec![false; num_vars + 1];
            let mut stack = vec![conflict];
            while let Some(id) = stack.pop() {
                for l in formula.clause(id).lits() {
                    let v = l.var() as usize;
                    if seen[v] {
                        continue;
                    }
                    seen[v] = true;
                    if let Some(r) = reason[v] {
                        used.push(r);
                        stack.push(r);
                    }
                }
            }
            used.sort_unstable();
            used.dedup();
            Propagation::Conflict(used)
        }
    }
}
