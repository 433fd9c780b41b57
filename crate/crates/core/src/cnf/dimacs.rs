//! DIMACS CNF reading and writing, plus the clause-group sidecar format
//! (`g <clause-index> <tag>` per line).

use std::fmt::Write as _;

use super::{Clause, ClauseId, CnfError, Formula, Group, Lit};

pub fn parse_dimacs(text: &str) -> Result<Formula, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut formula = Formula::new(0);
    let mut current: Vec<Lit> = Vec::new();

    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::MalformedHeader("duplicate header".into()));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            let (vars, clauses) = parsed.ok_or_else(|| CnfError::MalformedHeader(line.to_string()))?;
            formula.set_num_vars(vars);
            header = Some((vars, clauses));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| CnfError::MalformedHeader("clause before `p cnf` line".into()))?;
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| CnfError::BadToken {
                line: n + 1,
                msg: format!("not an integer: `{token}`"),
            })?;
            if value == 0 {
                formula.push(Clause::new(current.drain(..)), Group::Other);
                continue;
            }
            if value.unsigned_abs() as usize > vars {
                return Err(CnfError::LiteralOutOfRange { lit: value, vars });
            }
            current.push(Lit::new(value as i32));
        }
    }

    let (_, expected) = header.ok_or_else(|| CnfError::MalformedHeader("missing `p cnf` line".into()))?;
    if !current.is_empty() {
        return Err(CnfError::UnterminatedClause);
    }
    if formula.len() != expected {
        return Err(CnfError::MalformedHeader(format!(
            "header announces {expected} clauses, found {}",
            formula.len()
        )));
    }
    Ok(formula)
}

fn write_clause(out: &mut String, clause: &Clause) {
    for l in clause.lits() {
        let _ = write!(out, "{l} ");
    }
    out.push_str("0\n");
}

/// Active clauses only; tombstoned slots are skipped.
pub fn write_dimacs(formula: &Formula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars(), formula.active_count());
    for (_, c) in formula.iter() {
        write_clause(&mut out, c);
    }
    out
}

/// Like [`write_dimacs`], with a `c id <n>` comment before each clause
/// giving its id in `formula`.
pub fn write_dimacs_with_ids(formula: &Formula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars(), formula.active_count());
    for (id, c) in formula.iter() {
        let _ = writeln!(out, "c id {id}");
        write_clause(&mut out, c);
    }
    out
}

/// Group tags of the active clauses, numbered as in [`write_dimacs`] output.
pub fn write_groups(formula: &Formula) -> String {
    let mut out = String::new();
    for (n, (id, _)) in formula.iter().enumerate() {
        let _ = writeln!(out, "g {n} {}", formula.group(id));
    }
    out
}

fn parse_group(fields: &[&str]) -> Option<Group> {
    let num = |s: &str| s.parse::<usize>().ok();
    match fields {
        ["vertex", v] => Some(Group::Vertex(num(v)?)),
        ["edge", u, v, c] => Some(Group::Edge {
            u: num(u)?,
            v: num(v)?,
            color: num(c)?,
        }),
        ["symmetry"] => Some(Group::Symmetry),
        ["blocking"] => Some(Group::Blocking),
        ["other"] => Some(Group::Other),
        _ => None,
    }
}

/// Applies a group sidecar to `formula`. Indices refer to clause ids.
pub fn parse_groups(text: &str, formula: &mut Formula) -> Result<(), CnfError> {
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| CnfError::BadGroup {
            line: n + 1,
            msg: msg.to_string(),
        };
        if fields.len() < 3 || fields[0] != "g" {
            return Err(bad("expected `g <index> <tag>`"));
        }
        let id: ClauseId = fields[1].parse().map_err(|_| bad("bad clause index"))?;
        if id >= formula.len() {
            return Err(bad("clause index out of range"));
        }
        let group = parse_group(&fields[2..]).ok_or_else(|| bad("unknown tag"))?;
        formula.set_group(id, group);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_small() {
        let f = parse_dimacs("p cnf 2 2\n1 0\n-1 2 0\n").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.len(), 2);
        assert_eq!(f.clause(1), &Clause::from_dimacs(&[-1, 2]));
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = "c comment\np cnf 3 3\n1 -2\n 0 3 0\n0\n";
        let f = parse_dimacs(text).unwrap();
        let canonical = "p cnf 3 3\n1 -2 0\n3 0\n0\n";
        assert_eq!(write_dimacs(&f), canonical);
        assert_eq!(write_dimacs(&parse_dimacs(canonical).unwrap()), canonical);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_dimacs("1 0\n"), Err(CnfError::MalformedHeader(_))));
        assert!(matches!(parse_dimacs("p cnf x 1\n1 0\n"), Err(CnfError::MalformedHeader(_))));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(CnfError::LiteralOutOfRange { lit: 2, vars: 1 })
        ));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 2\n"), Err(CnfError::UnterminatedClause)));
        assert!(matches!(parse_dimacs("p cnf 2 2\n1 2 0\n"), Err(CnfError::MalformedHeader(_))));
    }

    #[test]
    fn groups_round_trip() {
        let mut f = parse_dimacs("p cnf 4 4\n1 2 0\n3 4 0\n-1 -3 0\n1 0\n").unwrap();
        f.set_group(0, Group::Vertex(0));
        f.set_group(1, Group::Vertex(1));
        f.set_group(2, Group::Edge { u: 0, v: 1, color: 1 });
        f.set_group(3, Group::Symmetry);
        let text = write_groups(&f);
        assert_eq!(text, "g 0 vertex 0\ng 1 vertex 1\ng 2 edge 0 1 1\ng 3 symmetry\n");
        let mut g = parse_dimacs(&write_dimacs(&f)).unwrap();
        parse_groups(&text, &mut g).unwrap();
        assert_eq!(g, f);
        assert!(parse_groups("g 9 vertex 1\n", &mut g).is_err());
        assert!(parse_groups("g 0 colour 1\n", &mut g).is_err());
    }

    #[test]
    fn ids_in_comments() {
        let mut f = parse_dimacs("p cnf 2 2\n1 0\n2 0\n").unwrap();
        f.remove(0);
        assert_eq!(write_dimacs_with_ids(&f), "p cnf 2 1\nc id 1\n2 0\n");
    }
}
