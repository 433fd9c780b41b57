use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::db::ClauseDb;
use super::{ClausalProof, ProofStep, StepKind};
use crate::cnf::{Clause, ClauseId, Formula, Lit, PropagationOrder};

/// A clause of the input formula or a clause added by a proof step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClauseRef {
    Formula(ClauseId),
    Step(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("step {step} is not a reverse unit propagation consequence")]
    InvalidProof {
        step: usize,
        /// Assignment reached by propagation without conflict.
        fixpoint: Vec<Lit>,
    },
    #[error("the proof never adds the empty clause")]
    MissingEmptyClause,
    #[error("step {step} deletes a clause that is not present")]
    BadDeletion { step: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Treat every deletion as a no-op (plain RUP checking).
    pub ignore_deletions: bool,
    pub order: PropagationOrder,
}

/// Outcome of a single RUP check against a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RupResult {
    Ok(Vec<ClauseId>),
    Fail(Vec<Lit>),
}

/// Checks whether `clause` follows from `formula` by reverse unit
/// propagation, returning the clauses that took part in the conflict.
pub fn rup_check(formula: &Formula, clause: &Clause) -> RupResult {
    let mut db = ClauseDb::new(formula.num_vars(), PropagationOrder::Fifo);
    let mut ids = Vec::new();
    for (id, c) in formula.iter() {
        db.push(c.lits());
        ids.push(id);
    }
    db.activate_initial(&vec![true; ids.len()]);
    match db.rup(clause.lits()) {
        Ok(used) => RupResult::Ok(used.into_iter().map(|i| ids[i]).collect()),
        Err(fixpoint) => RupResult::Fail(fixpoint),
    }
}

/// Result of backward checking: which clauses the proof of ⊥ depends on and
/// how.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Justification {
    empty_step: usize,
    formula_marks: Vec<ClauseId>,
    step_marks: Vec<bool>,
    antecedents: BTreeMap<usize, Vec<ClauseRef>>,
    deletion_targets: BTreeMap<usize, ClauseRef>,
}

impl Justification {
    /// Index of the first step adding the empty clause.
    pub fn empty_step(&self) -> usize {
        self.empty_step
    }

    /// Marked formula clauses, ascending: the unsatisfiable core.
    pub fn core(&self) -> &[ClauseId] {
        &self.formula_marks
    }

    pub fn is_step_marked(&self, step: usize) -> bool {
        self.step_marks.get(step).copied().unwrap_or(false)
    }

    pub fn marked_steps(&self) -> impl Iterator<Item = usize> + '_ {
        self.step_marks.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i)
    }

    pub fn marked_step_count(&self) -> usize {
        self.step_marks.iter().filter(|m| **m).count()
    }

    /// Clauses used to validate a marked addition step.
    pub fn antecedents(&self, step: usize) -> Option<&[ClauseRef]> {
        self.antecedents.get(&step).map(Vec::as_slice)
    }

    /// Clause removed by a deletion step, unless deletions were ignored.
    pub fn deletion_target(&self, step: usize) -> Option<ClauseRef> {
        self.deletion_targets.get(&step).copied()
    }

    /// `j <step-id> : <antecedent ids>` lines. Formula clauses keep their ids;
    /// proof step `s` is numbered `formula_len + s`.
    pub fn dump(&self, formula_len: usize) -> String {
        let id = |r: &ClauseRef| match *r {
            ClauseRef::Formula(i) => i,
            ClauseRef::Step(s) => formula_len + s,
        };
        let mut out = String::new();
        for (&step, ants) in &self.antecedents {
            let _ = write!(out, "j {} :", formula_len + step);
            for a in ants {
                let _ = write!(out, " {}", id(a));
            }
            out.push('\n');
        }
        out
    }
}

pub fn backward_check(formula: &Formula, proof: &ClausalProof) -> Result<Justification, CheckError> {
    backward_check_with(formula, proof, CheckOptions::default())
}

/// Validates `proof` against `formula` in reverse, checking only the steps
/// that the empty clause transitively depends on.
pub fn backward_check_with(
    formula: &Formula,
    proof: &ClausalProof,
    options: CheckOptions,
) -> Result<Justification, CheckError> {
    let steps = proof.steps();
    let empty_step = proof.empty_clause_step().ok_or(CheckError::MissingEmptyClause)?;

    let mut db = ClauseDb::new(formula.num_vars(), options.order);
    let mut refs: Vec<ClauseRef> = Vec::new();
    let mut live: HashMap<Vec<Lit>, Vec<usize>> = HashMap::new();
    for (id, c) in formula.iter() {
        let idx = db.push(c.lits());
        refs.push(ClauseRef::Formula(id));
        live.entry(c.sorted_key()).or_default().push(idx);
    }

    // Forward pass: give every added clause an index and resolve deletions.
    let mut step_index: Vec<usize> = vec![usize::MAX; empty_step + 1];
    let mut deletion_index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut deleted = vec![false; refs.len()];
    for (i, step) in steps[..=empty_step].iter().enumerate() {
        match step.kind {
            StepKind::Add => {
                let idx = db.push(step.clause.lits());
                refs.push(ClauseRef::Step(i));
                deleted.push(false);
                step_index[i] = idx;
                if i < empty_step {
                    live.entry(step.clause.sorted_key()).or_default().push(idx);
                }
            }
            StepKind::Delete if options.ignore_deletions => {}
            StepKind::Delete => {
                let idx = live
                    .get_mut(&step.clause.sorted_key())
                    .and_then(Vec::pop)
                    .ok_or(CheckError::BadDeletion { step: i })?;
                deleted[idx] = true;
                deletion_index.insert(i, idx);
            }
        }
    }

    let bottom = step_index[empty_step];
    let mut initially_active: Vec<bool> = deleted.iter().map(|d| !d).collect();
    initially_active[bottom] = false;
    db.activate_initial(&initially_active);

    let mut marked = vec![false; db.len()];
    marked[bottom] = true;
    let mut antecedents = BTreeMap::new();
    for i in (0..=empty_step).rev() {
        let ProofStep { kind, clause } = &steps[i];
        match kind {
            StepKind::Add => {
                let idx = step_index[i];
                db.deactivate(idx);
                if !marked[idx] {
                    continue;
                }
                match db.rup(clause.lits()) {
                    Ok(used) => {
                        for &u in &used {
                            marked[u] = true;
                        }
                        antecedents.insert(i, used.iter().map(|&u| refs[u]).collect());
                    }
                    Err(fixpoint) => return Err(CheckError::InvalidProof { step: i, fixpoint }),
                }
            }
            StepKind::Delete => {
                if let Some(&idx) = deletion_index.get(&i) {
                    db.activate(idx);
                }
            }
        }
    }

    let mut formula_marks = Vec::new();
    let mut step_marks = vec![false; steps.len()];
    for (idx, r) in refs.iter().enumerate() {
        if marked[idx] {
            match *r {
                ClauseRef::Formula(id) => formula_marks.push(id),
                ClauseRef::Step(s) => step_marks[s] = true,
            }
        }
    }
    let deletion_targets = deletion_index.into_iter().map(|(s, idx)| (s, refs[idx])).collect();
    Ok(Justification {
        empty_step,
        formula_marks,
        step_marks,
        antecedents,
        deletion_targets,
    })
}

/// The marked formula clauses, with ids and groups preserved.
pub fn extract_core(justification: &Justification, formula: &Formula) -> Formula {
    formula.restrict(justification.core())
}

/// Drops unmarked additions, deletions of dropped clauses and everything
/// after the empty clause.
pub fn trim_proof(justification: &Justification, proof: &ClausalProof) -> ClausalProof {
    let mut out = ClausalProof::new();
    for (i, step) in proof.steps()[..=justification.empty_step].iter().enumerate() {
        let keep = match step.kind {
            StepKind::Add => justification.is_step_marked(i),
            StepKind::Delete => match justification.deletion_target(i) {
                Some(ClauseRef::Formula(_)) => true,
                Some(ClauseRef::Step(s)) => justification.is_step_marked(s),
                None => false,
            },
        };
        if keep {
            out.push(step.clone());
        }
    }
    out
}
