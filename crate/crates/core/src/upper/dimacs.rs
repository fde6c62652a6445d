//! DIMACS CNF export with a JSON sidecar naming variables and clause tags.

use std::fmt::Write as _;

use serde::Serialize;

use super::clauses::{ClauseSystem, Schema, VarName};
use super::sat::Lit;

pub fn to_dimacs(sys: &ClauseSystem) -> String {
    let mut out = String::new();
    writeln!(out, "c n={} K={}", sys.space.n(), sys.space.k()).unwrap();
    writeln!(out, "p cnf {} {}", sys.space.len(), sys.clauses.len()).unwrap();
    for c in &sys.clauses {
        for l in &c.lits {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Serialize)]
struct SidecarVar {
    index: i64,
    name: String,
    var: VarName,
}

#[derive(Debug, Serialize)]
struct SidecarClause {
    index: usize,
    schema: Schema,
    anchor: &'static str,
}

/// Variables are numbered from 1 and clauses from 0, matching the CNF file.
pub fn sidecar(sys: &ClauseSystem) -> serde_json::Value {
    let vars: Vec<SidecarVar> = (0..sys.space.len() as u32)
        .map(|v| SidecarVar { index: Lit::pos(v).to_dimacs(), name: sys.space.display(v), var: sys.space.name(v) })
        .collect();
    let clauses: Vec<SidecarClause> = sys
        .clauses
        .iter()
        .enumerate()
        .map(|(index, c)| SidecarClause { index, schema: c.schema, anchor: c.schema.anchor() })
        .collect();
    serde_json::json!({
        "n": sys.space.n(),
        "K": sys.space.k(),
        "variables": vars,
        "clauses": clauses,
    })
}

/// Parses a DIMACS CNF body into `(variable count, clauses)`.
pub fn parse_dimacs(text: &str) -> Result<(usize, Vec<Vec<Lit>>), String> {
    let mut nvars = None;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let nums: Vec<usize> = rest.split_whitespace().map(|x| x.parse().map_err(|_| format!("bad header {line:?}"))).collect::<Result<_, _>>()?;
            if nums.len() != 2 {
                return Err(format!("bad header {line:?}"));
            }
            nvars = Some(nums[0]);
            continue;
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| format!("bad literal {tok:?}"))?;
            match Lit::from_dimacs(x) {
                None => clauses.push(std::mem::take(&mut cur)),
                Some(l) => cur.push(l),
            }
        }
    }
    if !cur.is_empty() {
        return Err("unterminated clause".into());
    }
    let nvars = nvars.ok_or("missing header")?;
    if clauses.iter().flatten().any(|l| l.var() as usize >= nvars) {
        return Err("literal exceeds declared variable count".into());
    }
    Ok((nvars, clauses))
}
