use std::process::Command;

use super::{Outcome, SolveError, SolveResult, SolveStats};
use crate::cnf::{write_dimacs, Assignment, Clause, Formula, Lit};
use crate::proof::{backward_check, backward_check_with, CheckOptions, ClausalProof};

fn quote(path: &std::path::Path) -> String {
    format!("'{}'", path.display().to_string().replace('\'', r"'\''"))
}

/// Runs `template` through `sh -c` after substituting `{cnf}` and `{proof}`
/// with temporary file paths. The solver's verdict comes from its `s` line,
/// or from exit code 10/20 when there is none.
///
/// Models are checked against `formula`; proofs are backward checked, first
/// honouring deletions and then, if that fails, ignoring them.
///
/// Clause ids refer to the CNF as written, so solver-side preprocessing that
/// rewrites the input should be switched off.
pub fn solve_external(template: &str, formula: &Formula) -> Result<SolveResult, SolveError> {
    let dir = tempfile::tempdir()?;
    let cnf_path = dir.path().join("input.cnf");
    let proof_path = dir.path().join("proof.drat");
    std::fs::write(&cnf_path, write_dimacs(formula))?;
    let command = template
        .replace("{cnf}", &quote(&cnf_path))
        .replace("{proof}", &quote(&proof_path));
    let output = Command::new("sh").arg("-c").arg(&command).output()?;
    let stdout = String::from_utf8_lossy(&output.stdout);

    let mut status: Option<bool> = None;
    let mut model: Vec<Lit> = Vec::new();
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = match rest.trim() {
                "SATISFIABLE" => Some(true),
                "UNSATISFIABLE" => Some(false),
                other => return Err(SolveError::UnparsableOutput(format!("status `{other}`"))),
            };
        } else if let Some(rest) = line.strip_prefix('v') {
            for token in rest.split_whitespace() {
                let v: i32 = token
                    .parse()
                    .map_err(|_| SolveError::UnparsableOutput(format!("model token `{token}`")))?;
                if v != 0 {
                    model.push(Lit::new(v));
                }
            }
        }
    }
    let code = output.status.code();
    let status = match (status, code) {
        (Some(s), _) => s,
        (None, Some(10)) => true,
        (None, Some(20)) => false,
        (None, Some(0)) => return Err(SolveError::UnparsableOutput("no status line".into())),
        _ => {
            let stderr = String::from_utf8_lossy(&output.stderr);
            let tail: String = stderr.lines().rev().take(5).collect::<Vec<_>>().join(" | ");
            return Err(SolveError::SolverCrashed(format!("exit status {:?}: {tail}", code)));
        }
    };

    if status {
        let assignment = Assignment::from_lits(model.iter().copied());
        if let Some((id, _)) = formula.iter().find(|(_, c)| !assignment.satisfies(c)) {
            return Err(SolveError::InvalidModel(format!("clause {id} is falsified")));
        }
        return Ok(SolveResult {
            outcome: Outcome::Sat(assignment),
            stats: SolveStats::default(),
            seed: None,
        });
    }

    let text = std::fs::read_to_string(&proof_path)
        .map_err(|e| SolveError::UnparsableOutput(format!("cannot read proof: {e}")))?;
    let mut proof =
        ClausalProof::from_drat(&text).map_err(|e| SolveError::UnparsableOutput(format!("proof: {e}")))?;
    if proof.empty_clause_step().is_none() {
        proof.add(Clause::empty());
    }
    if let Err(first) = backward_check(formula, &proof) {
        let relaxed = CheckOptions {
            ignore_deletions: true,
            ..CheckOptions::default()
        };
        backward_check_with(formula, &proof, relaxed).map_err(|_| SolveError::ProofRejected(first))?;
    }
    let stats = SolveStats {
        additions: proof.additions(),
        deletions: proof.deletions(),
        ..SolveStats::default()
    };
    Ok(SolveResult {
        outcome: Outcome::Unsat(proof),
        stats,
        seed: None,
    })
}
