//! A small deterministic CDCL solver that logs a resolution derivation for
//! every learned clause, so an UNSAT answer comes with a checkable refutation.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Literal `2*var` is positive, `2*var + 1` negative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(var: u32) -> Self {
        Lit(var << 1)
    }

    pub fn neg(var: u32) -> Self {
        Lit(var << 1 | 1)
    }

    pub fn new(var: u32, positive: bool) -> Self {
        if positive {
            Self::pos(var)
        } else {
            Self::neg(var)
        }
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }

    fn index(self) -> usize {
        self.0 as usize
    }

    /// DIMACS integer (variables counted from 1).
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Option<Self> {
        match x {
            0 => None,
            x if x > 0 => Some(Lit::pos(x as u32 - 1)),
            x => Some(Lit::neg((-x) as u32 - 1)),
        }
    }

    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var() as usize] == self.is_positive()
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Derivation of one clause: resolve `start` with each `(pivot, clause)` in turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub start: usize,
    pub steps: Vec<(u32, usize)>,
    pub result: Vec<Lit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProofStep {
    /// A clause supplied during search by a lazy schema, tagged by the caller.
    Lazy { clause: Vec<Lit>, tag: String },
    Derived(Derivation),
}

/// Clause ids: `0..inputs` are the input clauses, then one id per step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    pub inputs: usize,
    pub steps: Vec<ProofStep>,
}

impl Proof {
    pub fn resolution_count(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s {
                ProofStep::Derived(d) => d.steps.len(),
                ProofStep::Lazy { .. } => 0,
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    /// Lowest unassigned variable index.
    Fixed,
    /// Highest activity, ties to the lowest index.
    Vsids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Maximum number of decisions.
    pub budget: u64,
    pub heuristic: Heuristic,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { budget: 10_000_000, heuristic: Heuristic::Vsids }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub lazy_clauses: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Vec<bool>),
    Unsat(Proof),
    BudgetExceeded,
}

/// Clauses that are only produced when a total assignment violates them.
pub trait LazyClauses {
    /// Violated clauses under `model`, each with a tag; empty if none.
    fn violated(&mut self, model: &[bool]) -> Vec<(Vec<Lit>, String)>;
}

const UNASSIGNED: u8 = 2;

struct Solver {
    nvars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    proof: Proof,
    heuristic: Heuristic,
    scan: usize,
    activity: Vec<f64>,
    bump: f64,
    heap: BinaryHeap<(u64, Reverse<u32>)>,
    stats: Stats,
    seen: Vec<bool>,
}

enum Added {
    Ok,
    Conflict(usize),
}

impl Solver {
    fn new(nvars: usize, heuristic: Heuristic, inputs: usize) -> Self {
        let mut s = Solver {
            nvars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * nvars],
            value: vec![UNASSIGNED; nvars],
            level: vec![0; nvars],
            reason: vec![None; nvars],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            proof: Proof { inputs, steps: Vec::new() },
            heuristic,
            scan: 0,
            activity: vec![0.0; nvars],
            bump: 1.0,
            heap: BinaryHeap::new(),
            stats: Stats::default(),
            seen: vec![false; nvars],
        };
        for v in 0..nvars as u32 {
            s.heap.push((0f64.to_bits(), Reverse(v)));
        }
        s
    }

    fn lit_value(&self, l: Lit) -> u8 {
        let v = self.value[l.var() as usize];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            v ^ (l.0 & 1) as u8
        }
    }

    fn is_true(&self, l: Lit) -> bool {
        self.lit_value(l) == 1
    }

    fn is_false(&self, l: Lit) -> bool {
        self.lit_value(l) == 0
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var() as usize;
        self.value[v] = l.is_positive() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds a clause at the current state. Clause literals must be distinct.
    fn add_clause(&mut self, lits: Vec<Lit>) -> Added {
        let id = self.clauses.len();
        if lits.is_empty() {
            self.clauses.push(lits);
            return Added::Conflict(id);
        }
        if lits.len() == 1 {
            let l = lits[0];
            self.clauses.push(lits);
            if self.is_false(l) {
                return Added::Conflict(id);
            }
            if !self.is_true(l) {
                self.enqueue(l, Some(id));
            }
            return Added::Ok;
        }
        let mut lits = lits;
        // Prefer non-false literals in the watch slots.
        lits.sort_by_key(|&l| match self.lit_value(l) {
            0 => (1, Reverse(self.level[l.var() as usize])),
            _ => (0, Reverse(0)),
        });
        self.watches[lits[0].negate().index()].push(id);
        self.watches[lits[1].negate().index()].push(id);
        let (a, b) = (lits[0], lits[1]);
        self.clauses.push(lits);
        if self.is_false(a) {
            return Added::Conflict(id);
        }
        if self.is_false(b) && !self.is_true(a) {
            self.enqueue(a, Some(id));
        }
        Added::Ok
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.negate();
            let mut ws = std::mem::take(&mut self.watches[p.index()]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cid = ws[i];
                let clause = &mut self.clauses[cid];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.value[first.var() as usize] != UNASSIGNED
                    && (self.value[first.var() as usize] ^ (first.0 & 1) as u8) == 1
                {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let val = self.value[l.var() as usize];
                    if val == UNASSIGNED || (val ^ (l.0 & 1) as u8) == 1 {
                        clause.swap(1, k);
                        let new_watch = clause[1].negate().index();
                        self.watches[new_watch].push(cid);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.is_false(first) {
                    conflict = Some(cid);
                    break;
                }
                self.enqueue(first, Some(cid));
                i += 1;
            }
            let rest = std::mem::take(&mut self.watches[p.index()]);
            ws.extend(rest);
            self.watches[p.index()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: u32) {
        if self.heuristic != Heuristic::Vsids {
            return;
        }
        let a = &mut self.activity[v as usize];
        *a += self.bump;
        if *a > 1e100 {
            for x in self.activity.iter_mut() {
                *x *= 1e-100;
            }
            self.bump *= 1e-100;
            let entries: Vec<u32> = self.heap.drain().map(|(_, Reverse(v))| v).collect();
            for v in entries {
                self.heap.push((self.activity[v as usize].to_bits(), Reverse(v)));
            }
        }
        self.heap.push((self.activity[v as usize].to_bits(), Reverse(v)));
    }

    /// Resolves away level-0 literals of `clause` (marked in `seen`),
    /// appending steps. Returns the surviving literals in `clause` order.
    fn strip_level_zero(&mut self, steps: &mut Vec<(u32, usize)>, marked: &mut Vec<u32>) {
        let zero_end = self.trail_lim.first().copied().unwrap_or(self.trail.len());
        for idx in (0..zero_end).rev() {
            let p = self.trail[idx];
            let v = p.var();
            if !self.seen[v as usize] {
                continue;
            }
            let r = self.reason[v as usize].expect("level-0 literals have reasons");
            steps.push((v, r));
            for k in 0..self.clauses[r].len() {
                let q = self.clauses[r][k];
                if q.var() != v && !self.seen[q.var() as usize] {
                    self.seen[q.var() as usize] = true;
                    marked.push(q.var());
                }
            }
            self.seen[v as usize] = false;
        }
    }

    /// First-UIP analysis. Returns the learned clause id and backjump level.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, u32, Derivation) {
        let d = self.decision_level();
        let mut steps = Vec::new();
        let mut marked: Vec<u32> = Vec::new();
        let mut counter = 0;
        let mut lower: Vec<Lit> = Vec::new();
        let absorb = |s: &mut Solver, cid: usize, skip: Option<u32>, counter: &mut u32, lower: &mut Vec<Lit>, marked: &mut Vec<u32>| {
            for k in 0..s.clauses[cid].len() {
                let q = s.clauses[cid][k];
                let v = q.var();
                if Some(v) == skip || s.seen[v as usize] {
                    continue;
                }
                s.seen[v as usize] = true;
                marked.push(v);
                s.bump_var(v);
                let lv = s.level[v as usize];
                if lv == d {
                    *counter += 1;
                } else if lv > 0 {
                    lower.push(q);
                }
            }
        };
        absorb(self, conflict, None, &mut counter, &mut lower, &mut marked);
        let mut idx = self.trail.len();
        let uip = loop {
            idx -= 1;
            let p = self.trail[idx];
            let v = p.var();
            if !self.seen[v as usize] || self.level[v as usize] != d {
                continue;
            }
            counter -= 1;
            if counter == 0 {
                break p.negate();
            }
            let r = self.reason[v as usize].expect("non-decision literal has a reason");
            steps.push((v, r));
            self.seen[v as usize] = false;
            absorb(self, r, Some(v), &mut counter, &mut lower, &mut marked);
        };
        // The UIP and the lower-level literals stay; only level-0 ones remain marked for stripping.
        self.seen[uip.var() as usize] = false;
        for l in &lower {
            self.seen[l.var() as usize] = false;
        }
        self.strip_level_zero(&mut steps, &mut marked);
        for v in marked {
            self.seen[v as usize] = false;
        }
        let mut learned = vec![uip];
        learned.extend(lower);
        let back = if learned.len() == 1 {
            0
        } else {
            let (pos, lv) = learned[1..]
                .iter()
                .enumerate()
                .map(|(i, l)| (i + 1, self.level[l.var() as usize]))
                .max_by_key(|&(i, lv)| (lv, Reverse(i)))
                .unwrap();
            learned.swap(1, pos);
            lv
        };
        let derivation = Derivation { start: conflict, steps, result: learned.clone() };
        (learned, back, derivation)
    }

    /// Level-0 conflict: resolve everything away to the empty clause.
    fn refute(&mut self, conflict: usize) -> Derivation {
        let mut marked = Vec::new();
        for k in 0..self.clauses[conflict].len() {
            let v = self.clauses[conflict][k].var();
            if !self.seen[v as usize] {
                self.seen[v as usize] = true;
                marked.push(v);
            }
        }
        let mut steps = Vec::new();
        self.strip_level_zero(&mut steps, &mut marked);
        for v in marked {
            self.seen[v as usize] = false;
        }
        Derivation { start: conflict, steps, result: Vec::new() }
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let keep = self.trail_lim[lvl as usize];
        for idx in (keep..self.trail.len()).rev() {
            let v = self.trail[idx].var();
            self.value[v as usize] = UNASSIGNED;
            self.reason[v as usize] = None;
            self.scan = self.scan.min(v as usize);
            if self.heuristic == Heuristic::Vsids {
                self.heap.push((self.activity[v as usize].to_bits(), Reverse(v)));
            }
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = keep;
    }

    fn pick(&mut self) -> Option<u32> {
        match self.heuristic {
            Heuristic::Fixed => {
                while self.scan < self.nvars && self.value[self.scan] != UNASSIGNED {
                    self.scan += 1;
                }
                (self.scan < self.nvars).then_some(self.scan as u32)
            }
            Heuristic::Vsids => {
                while let Some((bits, Reverse(v))) = self.heap.pop() {
                    if self.value[v as usize] == UNASSIGNED && bits == self.activity[v as usize].to_bits() {
                        return Some(v);
                    }
                }
                None
            }
        }
    }

    fn model(&self) -> Vec<bool> {
        self.value.iter().map(|&v| v == 1).collect()
    }

    /// Handles a conflict; returns `true` when the formula is refuted.
    fn resolve_conflict(&mut self, conflict: usize) -> bool {
        self.stats.conflicts += 1;
        if self.decision_level() == 0 {
            let d = self.refute(conflict);
            self.proof.steps.push(ProofStep::Derived(d));
            return true;
        }
        let (learned, back, derivation) = self.analyze(conflict);
        self.proof.steps.push(ProofStep::Derived(derivation));
        self.backtrack(back);
        let id = self.clauses.len();
        if learned.len() == 1 {
            self.clauses.push(learned.clone());
            self.enqueue(learned[0], Some(id));
        } else {
            self.watches[learned[0].negate().index()].push(id);
            self.watches[learned[1].negate().index()].push(id);
            let uip = learned[0];
            self.clauses.push(learned);
            self.enqueue(uip, Some(id));
        }
        self.bump *= 1.0 / 0.95;
        false
    }
}

fn normalize(clause: &[Lit]) -> Option<Vec<Lit>> {
    let mut c = clause.to_vec();
    c.sort_unstable();
    c.dedup();
    if c.windows(2).any(|w| w[0].var() == w[1].var()) {
        None
    } else {
        Some(c)
    }
}

/// Decides the conjunction of `clauses` over `nvars` variables.
///
/// Tautological input clauses are kept (so ids line up) but never watched.
pub fn solve(
    nvars: usize,
    clauses: &[Vec<Lit>],
    config: SolverConfig,
    mut lazy: Option<&mut dyn LazyClauses>,
) -> (Outcome, Stats) {
    let mut s = Solver::new(nvars, config.heuristic, clauses.len());
    let mut initial_conflict = None;
    for c in clauses {
        assert!(c.iter().all(|l| (l.var() as usize) < nvars), "literal out of range");
        match normalize(c) {
            None => {
                // Satisfied by every assignment; a placeholder keeps the id.
                s.clauses.push(c.clone());
            }
            Some(c) => {
                if let Added::Conflict(id) = s.add_clause(c) {
                    initial_conflict.get_or_insert(id);
                }
            }
        }
    }
    if let Some(id) = initial_conflict {
        let d = s.refute(id);
        s.proof.steps.push(ProofStep::Derived(d));
        return (Outcome::Unsat(s.proof), s.stats);
    }
    loop {
        if let Some(conflict) = s.propagate() {
            if s.resolve_conflict(conflict) {
                return (Outcome::Unsat(s.proof), s.stats);
            }
            continue;
        }
        let Some(v) = s.pick() else {
            let model = s.model();
            let extra = lazy.as_mut().map(|l| l.violated(&model)).unwrap_or_default();
            if extra.is_empty() {
                return (Outcome::Sat(model), s.stats);
            }
            s.backtrack(0);
            let mut conflict = None;
            for (clause, tag) in extra {
                s.stats.lazy_clauses += 1;
                let c = normalize(&clause).expect("lazy clauses are not tautologies");
                s.proof.steps.push(ProofStep::Lazy { clause: c.clone(), tag });
                if let Added::Conflict(id) = s.add_clause(c) {
                    conflict.get_or_insert(id);
                }
            }
            if let Some(id) = conflict {
                if s.resolve_conflict(id) {
                    return (Outcome::Unsat(s.proof), s.stats);
                }
            }
            continue;
        };
        if s.stats.decisions >= config.budget {
            return (Outcome::BudgetExceeded, s.stats);
        }
        s.stats.decisions += 1;
        s.trail_lim.push(s.trail.len());
        s.enqueue(Lit::neg(v), None);
    }
}

/// Exhaustive check over all `2^nvars` assignments; `nvars <= 24`.
pub fn truth_table_sat(nvars: usize, clauses: &[Vec<Lit>]) -> Option<Vec<bool>> {
    assert!(nvars <= 24);
    // Clause i holds under `mask` iff it meets pos[i] in mask or neg[i] outside it.
    let masks: Vec<(u32, u32)> = clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(p, n), l| {
                let bit = 1u32 << l.var();
                if l.is_positive() {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    let mask = (0u32..1 << nvars).find(|&m| masks.iter().all(|&(p, n)| m & p != 0 || !m & n != 0))?;
    Some((0..nvars).map(|v| mask >> v & 1 == 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upper::proof::check_proof;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    #[test]
    fn trivial_cases() {
        let (o, _) = solve(0, &[], SolverConfig::default(), None);
        assert_eq!(o, Outcome::Sat(vec![]));
        let cnf = vec![lits(&[1]), lits(&[-1])];
        let (o, _) = solve(1, &cnf, SolverConfig::default(), None);
        let Outcome::Unsat(p) = o else { panic!() };
        check_proof(&cnf, &p, |_, _| true).unwrap();
        let cnf = vec![vec![]];
        assert!(matches!(solve(0, &cnf, SolverConfig::default(), None).0, Outcome::Unsat(_)));
    }

    #[test]
    fn pigeonhole_three_into_two() {
        // p(i,h): pigeon i in hole h, var 2*i + h.
        let v = |i: i64, h: i64| 2 * i + h + 1;
        let mut cnf = Vec::new();
        for i in 0..3 {
            cnf.push(lits(&[v(i, 0), v(i, 1)]));
        }
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    cnf.push(lits(&[-v(i, h), -v(j, h)]));
                }
            }
        }
        for heuristic in [Heuristic::Fixed, Heuristic::Vsids] {
            let (o, stats) = solve(6, &cnf, SolverConfig { budget: 1000, heuristic }, None);
            let Outcome::Unsat(p) = o else { panic!("{heuristic:?}") };
            check_proof(&cnf, &p, |_, _| true).unwrap();
            assert!(stats.conflicts > 0);
        }
    }

    #[test]
    fn budget_is_reported() {
        let cnf: Vec<Vec<Lit>> = (0..10).map(|v| vec![Lit::pos(v), Lit::pos(v + 10)]).collect();
        let (o, _) = solve(20, &cnf, SolverConfig { budget: 3, heuristic: Heuristic::Fixed }, None);
        assert_eq!(o, Outcome::BudgetExceeded);
    }

    #[test]
    fn lazy_clauses_are_added() {
        struct ForbidAllFalse;
        impl LazyClauses for ForbidAllFalse {
            fn violated(&mut self, model: &[bool]) -> Vec<(Vec<Lit>, String)> {
                if model.iter().all(|&b| !b) {
                    vec![((0..model.len() as u32).map(Lit::pos).collect(), "lazy".into())]
                } else {
                    vec![]
                }
            }
        }
        let (o, stats) = solve(3, &[], SolverConfig::default(), Some(&mut ForbidAllFalse));
        let Outcome::Sat(m) = o else { panic!() };
        assert!(m.iter().any(|&b| b));
        assert_eq!(stats.lazy_clauses, 1);
    }
}
