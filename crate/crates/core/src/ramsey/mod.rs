//! Classical Ramsey data: triangle-free witness graphs for `R(n,3)`, exact
//! values for tiny `n`, and a table of literature values.

mod graph;
mod search;
mod table;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use graph::{WitnessFile, WitnessGraph, MAX_ORDER};
pub use search::{canonical_code, triangle_free_levels, CANON_MAX_ORDER};
pub use table::{Provenance, RamseyTable, RamseyValue, TableEntry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamseyError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("n = {0} is outside the supported range {1}")]
    OutOfRange(u32, &'static str),
    #[error("witness fails for n = {n}: {failure}")]
    WitnessFailed { n: u32, failure: WitnessFailure },
    #[error("no value for R({0},3) is available")]
    Missing(u32),
    #[error("malformed table: {0}")]
    Table(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// Why a graph does not witness `R(n,3) > order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "vertices")]
pub enum WitnessFailure {
    Triangle([u32; 3]),
    IndependentSet(Vec<u32>),
}

impl std::fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WitnessFailure::Triangle(t) => write!(f, "triangle {t:?}"),
            WitnessFailure::IndependentSet(s) => write!(f, "independent set {s:?}"),
        }
    }
}

/// Checks that `g` is triangle-free with no independent set of size `n`.
pub fn verify_witness(g: &WitnessGraph, n: u32) -> Result<(), WitnessFailure> {
    if let Some(t) = g.find_triangle() {
        return Err(WitnessFailure::Triangle(t));
    }
    match g.find_independent_set(n) {
        Some(s) => Err(WitnessFailure::IndependentSet(s)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Builtin,
    Computed,
    UserFile,
}

/// A verified witness for `R(n,3) > value - 1`. For computed records the
/// value is exact; otherwise it is exact only if the table says so.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamseyRecord {
    n: u32,
    value: u32,
    witness: WitnessGraph,
    source: Source,
}

impl RamseyRecord {
    pub fn new(n: u32, witness: WitnessGraph, source: Source) -> Result<Self, RamseyError> {
        if n < 2 {
            return Err(RamseyError::OutOfRange(n, "n >= 2"));
        }
        verify_witness(&witness, n).map_err(|failure| RamseyError::WitnessFailed { n, failure })?;
        Ok(Self { n, value: witness.order() + 1, witness, source })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn witness(&self) -> &WitnessGraph {
        &self.witness
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Loads `{"n": .., "order": .., "edges": ..}`; `n` in the file must agree if present.
    pub fn from_json_str(n: u32, text: &str) -> Result<Self, RamseyError> {
        let file: WitnessFile = serde_json::from_str(text).map_err(|e| RamseyError::InvalidGraph(e.to_string()))?;
        if let Some(m) = file.n {
            if m != n {
                return Err(RamseyError::InvalidGraph(format!("file is for n = {m}, expected {n}")));
            }
        }
        Self::new(n, WitnessGraph::try_from(file)?, Source::UserFile)
    }

    pub fn load(n: u32, path: impl Into<PathBuf>) -> Result<Self, RamseyError> {
        let path = path.into();
        let text = std::fs::read_to_string(&path).map_err(|e| RamseyError::Io { path: path.clone(), message: e.to_string() })?;
        Self::from_json_str(n, &text).map_err(|e| match e {
            RamseyError::Io { .. } => e,
            other => RamseyError::Io { path, message: other.to_string() },
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut file = WitnessFile::from(self.witness.clone());
        file.n = Some(self.n);
        serde_json::to_value(file).expect("witness file serializes")
    }
}

/// Shipped witnesses: `C5`, `C8(1,4)` and `C13(1,5)`. Each is verified here.
pub fn builtin(n: u32) -> Result<RamseyRecord, RamseyError> {
    let g = match n {
        3 => WitnessGraph::circulant(5, &[1])?,
        4 => WitnessGraph::circulant(8, &[1, 4])?,
        5 => WitnessGraph::circulant(13, &[1, 5])?,
        _ => return Err(RamseyError::OutOfRange(n, "3..=5 for builtin witnesses")),
    };
    RamseyRecord::new(n, g, Source::Builtin)
}

/// Exact `R(n,3)` for `n` in `2..=4` by exhaustive search.
pub fn brute_force_ramsey(n: u32) -> Result<RamseyRecord, RamseyError> {
    if !(2..=4).contains(&n) {
        return Err(RamseyError::OutOfRange(n, "2..=4 for exhaustive search"));
    }
    let levels = triangle_free_levels(n);
    let witness = levels[levels.len() - 2][0].clone();
    RamseyRecord::new(n, witness, Source::Computed)
}

/// Moves an independent `(n-1)`-set to vertices `0..n-1`. The rest keep
/// their relative order.
pub fn relabel_red_prefix(rec: &RamseyRecord) -> Result<RamseyRecord, RamseyError> {
    let relabeled = independent_prefix(rec.witness(), rec.n() - 1)
        .ok_or_else(|| RamseyError::InvalidGraph(format!("no independent set of size {}", rec.n() - 1)))?;
    RamseyRecord::new(rec.n(), relabeled, rec.source())
}

/// `g` relabeled so that `0..k` is independent, or `None` if `g` has no
/// independent `k`-set. Returns `g` itself when the prefix already works.
pub fn independent_prefix(g: &WitnessGraph, k: u32) -> Option<WitnessGraph> {
    let prefix: Vec<u32> = (0..k.min(g.order())).collect();
    if prefix.len() as u32 == k && g.is_independent(&prefix) {
        return Some(g.clone());
    }
    let set = g.find_independent_set(k)?;
    let mut perm = vec![0u32; g.order() as usize];
    let rest = (0..g.order()).filter(|v| !set.contains(v));
    for (new, old) in set.iter().copied().chain(rest).enumerate() {
        perm[old as usize] = new as u32;
    }
    Some(g.relabel(&perm).expect("constructed permutation"))
}
