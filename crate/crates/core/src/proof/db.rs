//! Clause store with two watched literals, used for reverse unit
//! propagation checks over a changing set of active clauses.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cnf::{Lit, PropagationOrder};

const NO_REASON: u32 = u32::MAX;

pub(crate) struct ClauseDb {
    lits: Vec<Vec<Lit>>,
    active: Vec<bool>,
    /// Whether watch entries may exist for the clause.
    attached: Vec<bool>,
    watches: Vec<Vec<u32>>,
    units: Vec<u32>,
    empties: Vec<u32>,
    value: Vec<i8>,
    reason: Vec<u32>,
    seen: Vec<bool>,
    trail: Vec<Lit>,
    qhead: usize,
    order: PropagationOrder,
}

impl ClauseDb {
    pub fn new(num_vars: usize, order: PropagationOrder) -> ClauseDb {
        let mut db = ClauseDb {
            lits: Vec::new(),
            active: Vec::new(),
            attached: Vec::new(),
            watches: Vec::new(),
            units: Vec::new(),
            empties: Vec::new(),
            value: Vec::new(),
            reason: Vec::new(),
            seen: Vec::new(),
            trail: Vec::new(),
            qhead: 0,
            order,
        };
        db.reserve_vars(num_vars);
        db
    }

    fn reserve_vars(&mut self, num_vars: usize) {
        if self.value.len() <= num_vars {
            self.value.resize(num_vars + 1, 0);
            self.reason.resize(num_vars + 1, NO_REASON);
            self.seen.resize(num_vars + 1, false);
            self.watches.resize(2 * num_vars, Vec::new());
        }
    }

    /// Stores an inactive clause and returns its index.
    pub fn push(&mut self, lits: &[Lit]) -> usize {
        let max_var = lits.iter().map(|l| l.var() as usize).max().unwrap_or(0);
        self.reserve_vars(max_var);
        let idx = self.lits.len() as u32;
        match lits.len() {
            0 => self.empties.push(idx),
            1 => self.units.push(idx),
            _ => {}
        }
        self.lits.push(lits.to_vec());
        self.active.push(false);
        self.attached.push(false);
        idx as usize
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    /// Activates every clause flagged in `active` and attaches watches. With
    /// a seeded order the watch lists are permuted afterwards.
    pub fn activate_initial(&mut self, active: &[bool]) {
        for (idx, &on) in active.iter().enumerate() {
            if on {
                self.activate(idx);
            }
        }
        if let PropagationOrder::Seeded(seed) = self.order {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for list in &mut self.watches {
                list.shuffle(&mut rng);
            }
            self.units.shuffle(&mut rng);
        }
    }

    pub fn activate(&mut self, idx: usize) {
        if self.active[idx] {
            return;
        }
        self.active[idx] = true;
        if self.lits[idx].len() < 2 {
            return;
        }
        let (a, b) = (self.lits[idx][0], self.lits[idx][1]);
        if self.attached[idx] {
            let i = idx as u32;
            self.watches[a.code()].retain(|&c| c != i);
            self.watches[b.code()].retain(|&c| c != i);
        }
        self.watches[a.code()].push(idx as u32);
        self.watches[b.code()].push(idx as u32);
        self.attached[idx] = true;
    }

    /// Watch entries are dropped lazily on the next visit.
    pub fn deactivate(&mut self, idx: usize) {
        self.active[idx] = false;
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[l.var() as usize];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    fn assign(&mut self, l: Lit, reason: u32) {
        let var = l.var() as usize;
        self.value[var] = if l.is_positive() { 1 } else { -1 };
        self.reason[var] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let falsified = !self.trail[self.qhead];
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let c = ws[i];
                i += 1;
                let ci = c as usize;
                if !self.active[ci] {
                    continue;
                }
                if self.lits[ci][0] == falsified {
                    self.lits[ci].swap(0, 1);
                }
                let first = self.lits[ci][0];
                if self.lit_value(first) == 1 {
                    ws[j] = c;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.lits[ci].len() {
                    let l = self.lits[ci][k];
                    if self.lit_value(l) != -1 {
                        self.lits[ci].swap(1, k);
                        self.watches[l.code()].push(c);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = c;
                j += 1;
                if self.lit_value(first) == -1 {
                    conflict = Some(c);
                    break;
                }
                self.assign(first, c);
            }
            while i < ws.len() {
                ws[j] = ws[i];
                i += 1;
                j += 1;
            }
            ws.truncate(j);
            self.watches[falsified.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn analyze(&mut self, conflict: u32) -> Vec<usize> {
        let mut used = vec![conflict as usize];
        let mut stack = vec![conflict as usize];
        let mut touched = Vec::new();
        while let Some(c) = stack.pop() {
            for k in 0..self.lits[c].len() {
                let v = self.lits[c][k].var() as usize;
                if self.seen[v] {
                    continue;
                }
                self.seen[v] = true;
                touched.push(v);
                let r = self.reason[v];
                if r != NO_REASON {
                    used.push(r as usize);
                    stack.push(r as usize);
                }
            }
        }
        for v in touched {
            self.seen[v] = false;
        }
        used.sort_unstable();
        used.dedup();
        used
    }

    fn reset(&mut self) {
        for l in self.trail.drain(..) {
            let v = l.var() as usize;
            self.value[v] = 0;
            self.reason[v] = NO_REASON;
        }
        self.qhead = 0;
    }

    /// Reverse unit propagation: falsifies `clause`, propagates its
    /// consequences, then the active unit clauses. On conflict returns the
    /// indices of the clauses on the trail leading to it; otherwise the
    /// propagation fixpoint.
    pub fn rup(&mut self, clause: &[Lit]) -> Result<Vec<usize>, Vec<Lit>> {
        let max_var = clause.iter().map(|l| l.var() as usize).max().unwrap_or(0);
        self.reserve_vars(max_var);

        let mut result = None;
        for &l in clause {
            match self.lit_value(!l) {
                1 => {}
                -1 => {
                    // tautology: nothing to derive
                    result = Some(Ok(Vec::new()));
                    break;
                }
                _ => self.assign(!l, NO_REASON),
            }
        }
        if result.is_none() {
            if let Some(&e) = self.empties.iter().find(|&&e| self.active[e as usize]) {
                result = Some(Ok(vec![e as usize]));
            }
        }
        if result.is_none() {
            let mut conflict = self.propagate();
            if conflict.is_none() {
                for k in 0..self.units.len() {
                    let u = self.units[k];
                    if !self.active[u as usize] {
                        continue;
                    }
                    let l = self.lits[u as usize][0];
                    match self.lit_value(l) {
                        1 => {}
                        -1 => {
                            conflict = Some(u);
                            break;
                        }
                        _ => self.assign(l, u),
                    }
                }
                if conflict.is_none() {
                    conflict = self.propagate();
                }
            }
            result = Some(match conflict {
                Some(c) => Ok(self.analyze(c)),
                None => Err(self.trail.clone()),
            });
        }
        self.reset();
        result.expect("set on every path")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;

    fn db_of(clauses: &[&[i32]]) -> ClauseDb {
        let mut db = ClauseDb::new(3, PropagationOrder::Fifo);
        for c in clauses {
            db.push(Clause::from_dimacs(c).lits());
        }
        let all = vec![true; clauses.len()];
        db.activate_initial(&all);
        db
    }

    #[test]
    fn unit_clause_conflict() {
        let mut db = db_of(&[&[1], &[-1]]);
        assert_eq!(db.rup(Clause::from_dimacs(&[]).lits()), Ok(vec![0, 1]));
    }

    #[test]
    fn failure_reports_fixpoint() {
        let mut db = db_of(&[&[1, 2]]);
        let fix = db.rup(Clause::from_dimacs(&[1]).lits()).unwrap_err();
        assert_eq!(fix, vec![Lit::new(-1), Lit::new(2)]);
        // state is reset between checks
        assert_eq!(db.rup(Clause::from_dimacs(&[1, 2]).lits()), Ok(vec![0]));
    }

    #[test]
    fn deactivation_and_reactivation() {
        let mut db = db_of(&[&[-1, 2], &[-2, 3]]);
        assert!(db.rup(Clause::from_dimacs(&[-1, 3]).lits()).is_ok());
        db.deactivate(1);
        assert!(db.rup(Clause::from_dimacs(&[-1, 3]).lits()).is_err());
        db.activate(1);
        assert!(db.rup(Clause::from_dimacs(&[-1, 3]).lits()).is_ok());
        db.deactivate(1);
        db.activate(1);
        assert_eq!(db.rup(Clause::from_dimacs(&[-1, 3]).lits()), Ok(vec![0, 1]));
    }
}
