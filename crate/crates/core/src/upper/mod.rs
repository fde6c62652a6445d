//! Propositional replay of the upper-bound argument: the lemmas about
//! eventual colors between classes of `ω²·n + ω·K + 1` become clauses, and
//! an UNSAT answer (with a checked refutation) replays the contradiction.

mod clauses;
mod dimacs;
mod proof;
mod sat;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coloring::{extract_canonical_table, Color, QuotientColoring};
use crate::ordinal::{Ordinal, Term};
use crate::ramsey::{Provenance, RamseyError, RamseyRecord, RamseyTable};

pub use clauses::{
    c8_instance_count, instantiate_clauses, instantiate_with, ClassRef, ClauseSystem, InstantiateError,
    Instantiation, Schema, TaggedClause, VarName, VariableSpace,
};
pub use dimacs::{parse_dimacs, sidecar, to_dimacs};
pub use proof::{check_proof, ProofCheck, ProofError};
pub use sat::{solve, truth_table_sat, Derivation, Heuristic, LazyClauses, Lit, Outcome, Proof, ProofStep, SolverConfig, Stats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UpperError {
    #[error(transparent)]
    Instantiate(#[from] InstantiateError),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error("R({0},3) is only known to lie in {1}; ramsey-K needs an exact value")]
    NotExact(u32, String),
    #[error("witness proves R({n},3) >= {witness}, above the configured value {configured}")]
    WitnessConflict { n: u32, witness: u32, configured: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RamseyK,
    SquareK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Unsat,
    Sat,
    BudgetExceeded,
}

/// `ω²·n + ω·K + 1`.
pub fn replay_gamma(n: u32, k: u32) -> Ordinal {
    let terms = [Term { exponent: 2, coefficient: n as u64 }, Term { exponent: 1, coefficient: k as u64 }, Term { exponent: 0, coefficient: 1 }];
    Ordinal::from_terms(terms.into_iter().filter(|t| t.coefficient > 0).collect()).expect("descending exponents")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub solver: SolverConfig,
    /// C8 is generated lazily when it would have more instances than this.
    pub c8_eager_limit: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self { solver: SolverConfig::default(), c8_eager_limit: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceSummary {
    pub derived: usize,
    pub resolutions: usize,
    pub lazy_clauses: usize,
    /// SHA-256 of the JSON-serialized proof.
    pub digest: String,
    pub verified: bool,
    /// How often each input schema is cited by a resolution step.
    pub citations: BTreeMap<String, usize>,
}

/// Satisfying assignment laid out by class pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    /// Names of the tilde variables set to 1.
    pub blue: Vec<String>,
    pub hat: BTreeMap<String, bool>,
    /// Whether every color between two singleton classes is red.
    pub l_block_red: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecideReport {
    pub status: Status,
    pub variables: usize,
    pub clauses: usize,
    pub per_schema: BTreeMap<Schema, usize>,
    pub lazy_c8: bool,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelReport>,
    #[serde(skip)]
    pub proof: Option<Proof>,
}

struct LazyC8<'a> {
    space: &'a VariableSpace,
}

impl LazyClauses for LazyC8<'_> {
    fn violated(&mut self, model: &[bool]) -> Vec<(Vec<Lit>, String)> {
        let mut out = Vec::new();
        clauses::for_each_c8(self.space.n(), self.space.k(), |k, l, s| {
            if out.len() < 256 {
                let c = clauses::c8_clause(self.space, k, l, s);
                if !c.iter().any(|x| x.eval(model)) {
                    out.push((c, Schema::C8.to_string()));
                }
            }
        });
        out
    }
}

/// Accepts exactly the C8 instances of `space`, in any literal order.
fn is_c8_instance(space: &VariableSpace, clause: &[Lit]) -> bool {
    let n = space.n();
    let hats: Vec<(u32, u32)> = clause
        .iter()
        .filter_map(|l| match space.name(l.var()) {
            VarName::Hat { comp, level } if l.is_positive() => Some((comp, level)),
            _ => None,
        })
        .collect();
    let [(k, l)] = hats[..] else { return false };
    let target = ClassRef::new(k, l);
    let mut subset: Vec<u32> = clause
        .iter()
        .filter_map(|x| match space.name(x.var()) {
            VarName::Tilde { src, tgt } if tgt == target && space.is_l(src) => Some(src.comp),
            _ => None,
        })
        .collect();
    subset.sort_unstable();
    if subset.len() != (n - 1) as usize || subset.first().is_some_and(|&p| p <= k) {
        return false;
    }
    let mut expect = clauses::c8_clause(space, k, l, &subset);
    let mut got = clause.to_vec();
    expect.sort_unstable();
    got.sort_unstable();
    expect == got
}

fn summarize(sys: &ClauseSystem, proof: &Proof, verified: bool) -> TraceSummary {
    let bytes = serde_json::to_vec(proof).expect("proof serializes");
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let mut tags: Vec<String> = sys.clauses.iter().map(|c| c.schema.to_string()).collect();
    let mut citations: BTreeMap<String, usize> = BTreeMap::new();
    let mut lazy = 0;
    for step in &proof.steps {
        match step {
            ProofStep::Lazy { tag, .. } => {
                lazy += 1;
                tags.push(tag.clone());
            }
            ProofStep::Derived(d) => {
                for id in std::iter::once(d.start).chain(d.steps.iter().map(|s| s.1)) {
                    *citations.entry(tags[id].clone()).or_insert(0) += 1;
                }
                tags.push("learned".into());
            }
        }
    }
    TraceSummary {
        derived: proof.steps.len() - lazy,
        resolutions: proof.resolution_count(),
        lazy_clauses: lazy,
        digest,
        verified,
        citations,
    }
}

fn model_report(space: &VariableSpace, model: &[bool]) -> ModelReport {
    let mut blue = Vec::new();
    let mut hat = BTreeMap::new();
    let mut l_block_red = true;
    for v in 0..space.len() as u32 {
        match space.name(v) {
            VarName::Hat { .. } => {
                hat.insert(space.display(v), model[v as usize]);
            }
            VarName::Tilde { src, tgt } => {
                if model[v as usize] {
                    blue.push(space.display(v));
                    if space.is_l(src) && space.is_l(tgt) {
                        l_block_red = false;
                    }
                }
            }
        }
    }
    ModelReport { blue, hat, l_block_red }
}

/// Decides `sys`. With `lazy_c8`, `sys` must not contain C8 itself.
pub fn decide(sys: &ClauseSystem, opts: DecideOptions, lazy_c8: bool) -> DecideReport {
    let cnf = sys.cnf();
    let mut lazy = LazyC8 { space: &sys.space };
    let lazy_ref: Option<&mut dyn LazyClauses> = if lazy_c8 { Some(&mut lazy) } else { None };
    let (outcome, stats) = solve(sys.space.len(), &cnf, opts.solver, lazy_ref);
    let mut report = DecideReport {
        status: Status::BudgetExceeded,
        variables: sys.space.len(),
        clauses: sys.clauses.len(),
        per_schema: sys.counts(),
        lazy_c8,
        stats,
        trace: None,
        model: None,
        proof: None,
    };
    match outcome {
        Outcome::Unsat(p) => {
            let verified = check_proof(&cnf, &p, |c, tag| tag == "C8" && is_c8_instance(&sys.space, c)).is_ok();
            report.status = Status::Unsat;
            report.trace = Some(summarize(sys, &p, verified));
            report.proof = Some(p);
        }
        Outcome::Sat(m) => {
            debug_assert!(sys.first_violated(&m).is_none());
            report.status = Status::Sat;
            report.model = Some(model_report(&sys.space, &m));
        }
        Outcome::BudgetExceeded => {}
    }
    report
}

/// Instantiates the catalogue for `(n, K)` (minus `drop`) and decides it.
pub fn decide_catalogue(n: u32, k: u32, drop: &[Schema], opts: DecideOptions) -> Result<DecideReport, UpperError> {
    let lazy_c8 = !drop.contains(&Schema::C8) && c8_instance_count(n, k) > opts.c8_eager_limit;
    let sys = instantiate_with(n, k, Instantiation { lazy_c8 })?.without(drop);
    Ok(decide(&sys, opts, lazy_c8))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamseyInput {
    pub n: u32,
    pub value: u32,
    pub provenance: Provenance,
    pub witness_checked: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub n: u32,
    pub mode: Mode,
    pub k: u32,
    pub gamma: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramsey: Option<RamseyInput>,
    pub main: DecideReport,
    /// Status with C4 and C10 removed; must agree with the main status.
    pub without_redundant: Status,
    pub pass: bool,
}

/// `K` for the chosen mode: `R(2n-3,3)+1` or `n²-4`.
pub fn replay_k(n: u32, mode: Mode, table: &RamseyTable, rec: Option<&RamseyRecord>) -> Result<(u32, Option<RamseyInput>), UpperError> {
    match mode {
        Mode::SquareK => Ok(((n * n).saturating_sub(4), None)),
        Mode::RamseyK => {
            let m = 2 * n - 3;
            let (value, provenance) = match table.get(m) {
                Some(e) => (e.value.exact().ok_or_else(|| UpperError::NotExact(m, e.value.to_string()))?, e.provenance),
                None => match rec {
                    // A user witness is the only data: take its value.
                    Some(r) if r.n() == m => (r.value(), Provenance::External),
                    _ => return Err(RamseyError::Missing(m).into()),
                },
            };
            let witness = match rec {
                Some(r) if r.n() == m => Some(r.clone()),
                _ => table.witness_record(m).ok(),
            };
            if let Some(w) = &witness {
                if w.value() > value {
                    return Err(UpperError::WitnessConflict { n: m, witness: w.value(), configured: value });
                }
            }
            let witness_checked = witness.is_some_and(|w| w.value() == value);
            Ok((value + 1, Some(RamseyInput { n: m, value, provenance, witness_checked })))
        }
    }
}

pub fn replay_theorem(
    n: u32,
    mode: Mode,
    table: &RamseyTable,
    rec: Option<&RamseyRecord>,
    opts: DecideOptions,
) -> Result<ReplayReport, UpperError> {
    let (k, ramsey) = replay_k(n, mode, table, rec)?;
    let main = decide_catalogue(n, k, &[], opts)?;
    let without_redundant = decide_catalogue(n, k, &[Schema::C4, Schema::C10], opts)?.status;
    let pass = main.status == Status::Unsat
        && main.trace.as_ref().is_some_and(|t| t.verified)
        && without_redundant == main.status;
    Ok(ReplayReport { n, mode, k, gamma: replay_gamma(n, k).to_string(), ramsey, main, without_redundant, pass })
}

/// Reads the variables of `space` off a normal, omega-homogeneous coloring
/// whose first `n+K` components have the shape of the replay's `γ`.
pub fn assignment_from_coloring(space: &VariableSpace, c: &QuotientColoring) -> Result<Vec<bool>, String> {
    let canon = extract_canonical_table(c).map_err(|e| e.to_string())?;
    let normal = c.normal_table().map_err(|v| format!("not normal at {{{}, {}}}", v.lower, v.upper))?;
    let mut model = Vec::with_capacity(space.len());
    for v in 0..space.len() as u32 {
        let color = match space.name(v) {
            VarName::Tilde { src, tgt } => canon.get(src.comp as u64, src.level, tgt.comp as u64, tgt.level),
            VarName::Hat { comp, level } => normal.get(comp as u64, 2, level),
        };
        let color = color.ok_or_else(|| format!("{} has no counterpart in the coloring", space.display(v)))?;
        model.push(color == Color::Blue);
    }
    Ok(model)
}
