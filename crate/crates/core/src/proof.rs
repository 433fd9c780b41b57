//! Clausal (DRUP) proofs: representation, DRAT text I/O, backward checking
//! with justification extraction, core extraction and proof trimming.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{Clause, Lit};

mod check;
mod db;

pub use check::{
    backward_check, backward_check_with, extract_core, rup_check, trim_proof, CheckError, CheckOptions, ClauseRef,
    Justification, RupResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Add,
    Delete,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProofStep {
    pub kind: StepKind,
    pub clause: Clause,
}

impl ProofStep {
    pub fn add(clause: Clause) -> ProofStep {
        ProofStep {
            kind: StepKind::Add,
            clause,
        }
    }

    pub fn delete(clause: Clause) -> ProofStep {
        ProofStep {
            kind: StepKind::Delete,
            clause,
        }
    }

    pub fn is_add(&self) -> bool {
        self.kind == StepKind::Add
    }

    pub fn is_empty_clause(&self) -> bool {
        self.is_add() && self.clause.is_empty()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DratError {
    #[error("line {line}: unexpected token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

/// Ordered additions and deletions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ClausalProof {
    steps: Vec<ProofStep>,
}

impl ClausalProof {
    pub fn new() -> ClausalProof {
        ClausalProof::default()
    }

    pub fn from_steps(steps: Vec<ProofStep>) -> ClausalProof {
        ClausalProof { steps }
    }

    pub fn push(&mut self, step: ProofStep) {
        self.steps.push(step);
    }

    pub fn add(&mut self, clause: Clause) {
        self.steps.push(ProofStep::add(clause));
    }

    pub fn delete(&mut self, clause: Clause) {
        self.steps.push(ProofStep::delete(clause));
    }

    pub fn steps(&self) -> &[ProofStep] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<ProofStep> {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of addition steps, the empty clause included.
    pub fn additions(&self) -> usize {
        self.steps.iter().filter(|s| s.is_add()).count()
    }

    pub fn deletions(&self) -> usize {
        self.steps.len() - self.additions()
    }

    pub fn empty_clause_step(&self) -> Option<usize> {
        self.steps.iter().position(ProofStep::is_empty_clause)
    }

    /// One clause per line, 0-terminated, deletions prefixed with `d `.
    pub fn to_drat(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            if step.kind == StepKind::Delete {
                out.push_str("d ");
            }
            for l in step.clause.lits() {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn from_drat(text: &str) -> Result<ClausalProof, DratError> {
        let mut steps = Vec::new();
        let mut current: Vec<Lit> = Vec::new();
        let mut deleting = false;
        let mut open = false;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.starts_with('c') {
                continue;
            }
            for token in line.split_whitespace() {
                if token == "d" && !open {
                    deleting = true;
                    open = true;
                    continue;
                }
                let value: i32 = token.parse().map_err(|_| DratError::BadToken {
                    line: n + 1,
                    token: token.to_string(),
                })?;
                if value == 0 {
                    let clause = Clause::new(current.drain(..));
                    steps.push(if deleting {
                        ProofStep::delete(clause)
                    } else {
                        ProofStep::add(clause)
                    });
                    deleting = false;
                    open = false;
                } else {
                    current.push(Lit::new(value));
                    open = true;
                }
            }
        }
        if open {
            return Err(DratError::Unterminated);
        }
        Ok(ClausalProof { steps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drat_text_round_trip() {
        let text = "-2 0\nd 1 3 0\n3 0\n0\n";
        let p = ClausalProof::from_drat(text).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.additions(), 3);
        assert_eq!(p.deletions(), 1);
        assert_eq!(p.empty_clause_step(), Some(3));
        assert_eq!(p.to_drat(), text);
    }

    #[test]
    fn drat_errors() {
        assert!(matches!(ClausalProof::from_drat("1 2\n"), Err(DratError::Unterminated)));
        assert!(matches!(ClausalProof::from_drat("1 x 0\n"), Err(DratError::BadToken { .. })));
        assert!(matches!(ClausalProof::from_drat("d\n"), Err(DratError::Unterminated)));
    }

    #[test]
    fn comments_and_multiline() {
        let p = ClausalProof::from_drat("c hi\n1\n2 0 d 1 2\n0\n").unwrap();
        assert_eq!(p.steps()[0], ProofStep::add(Clause::from_dimacs(&[1, 2])));
        assert_eq!(p.steps()[1], ProofStep::delete(Clause::from_dimacs(&[1, 2])));
    }
}
