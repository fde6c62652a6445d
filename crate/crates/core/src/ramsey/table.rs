//! Versioned table of `R(n,3)` values with provenance.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{brute_force_ramsey, builtin, RamseyError, RamseyRecord};

const DEFAULT_TABLE: &str = include_str!("../../data/ramsey_table.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RamseyValue {
    Exact(u32),
    Interval { lower: u32, upper: u32 },
}

impl RamseyValue {
    pub fn lower(self) -> u32 {
        match self {
            RamseyValue::Exact(v) => v,
            RamseyValue::Interval { lower, .. } => lower,
        }
    }

    pub fn upper(self) -> u32 {
        match self {
            RamseyValue::Exact(v) => v,
            RamseyValue::Interval { upper, .. } => upper,
        }
    }

    pub fn exact(self) -> Option<u32> {
        match self {
            RamseyValue::Exact(v) => Some(v),
            RamseyValue::Interval { .. } => None,
        }
    }
}

impl std::fmt::Display for RamseyValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RamseyValue::Exact(v) => write!(f, "{v}"),
            RamseyValue::Interval { lower, upper } => write!(f, "[{lower},{upper}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Computed,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    pub value: RamseyValue,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    value: Option<u32>,
    lower: Option<u32>,
    upper: Option<u32>,
    #[serde(default = "external")]
    provenance: Provenance,
    witness: Option<PathBuf>,
}

fn external() -> Provenance {
    Provenance::External
}

#[derive(Deserialize)]
struct RawTable {
    version: u32,
    #[serde(default)]
    #[allow(dead_code)]
    note: Option<String>,
    entries: BTreeMap<String, RawEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RamseyTable {
    entries: BTreeMap<u32, TableEntry>,
}

impl RamseyTable {
    /// The shipped literature table (no computed entries).
    pub fn external_default() -> Self {
        Self::from_json_str(DEFAULT_TABLE, None).expect("shipped table parses")
    }

    /// Witness paths are resolved against `base` when relative.
    pub fn from_json_str(text: &str, base: Option<&Path>) -> Result<Self, RamseyError> {
        let raw: RawTable = serde_json::from_str(text).map_err(|e| RamseyError::Table(e.to_string()))?;
        if raw.version != 1 {
            return Err(RamseyError::Table(format!("unsupported version {}", raw.version)));
        }
        let mut entries = BTreeMap::new();
        for (key, e) in raw.entries {
            let n: u32 = key.parse().map_err(|_| RamseyError::Table(format!("key {key:?} is not a natural number")))?;
            let value = match (e.value, e.lower, e.upper) {
                (Some(v), None, None) => RamseyValue::Exact(v),
                (None, Some(lower), Some(upper)) if lower < upper => RamseyValue::Interval { lower, upper },
                (None, Some(v), Some(w)) if v == w => RamseyValue::Exact(v),
                _ => return Err(RamseyError::Table(format!("entry {n}: give either value or lower < upper"))),
            };
            let witness = e.witness.map(|p| match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            });
            entries.insert(n, TableEntry { value, provenance: e.provenance, witness });
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, RamseyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RamseyError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_json_str(&text, path.parent())
    }

    pub fn get(&self, n: u32) -> Option<&TableEntry> {
        self.entries.get(&n)
    }

    pub fn value(&self, n: u32) -> Result<RamseyValue, RamseyError> {
        self.get(n).map(|e| e.value).ok_or(RamseyError::Missing(n))
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, &TableEntry)> {
        self.entries.iter().map(|(&n, e)| (n, e))
    }

    /// Adds exhaustively computed values for `2..=max_n` (at most 4). A
    /// configured value that disagrees with the computation is an error.
    pub fn with_computed(mut self, max_n: u32) -> Result<Self, RamseyError> {
        for n in 2..=max_n.min(4) {
            let v = brute_force_ramsey(n)?.value();
            if let Some(old) = self.entries.get(&n) {
                if old.value.lower() > v || old.value.upper() < v {
                    return Err(RamseyError::Table(format!("R({n},3) configured as {} but computed {v}", old.value)));
                }
            }
            let entry = TableEntry { value: RamseyValue::Exact(v), provenance: Provenance::Computed, witness: None };
            self.entries.insert(n, entry);
        }
        Ok(self)
    }

    pub fn insert(&mut self, n: u32, entry: TableEntry) {
        self.entries.insert(n, entry);
    }

    /// A verified witness: from the configured path if any, else builtin
    /// (3..=5) or computed (2).
    pub fn witness_record(&self, n: u32) -> Result<RamseyRecord, RamseyError> {
        let rec = match self.get(n).and_then(|e| e.witness.as_ref()) {
            Some(path) => RamseyRecord::load(n, path.clone())?,
            None => match n {
                2 => brute_force_ramsey(2)?,
                3..=5 => builtin(n)?,
                _ => return Err(RamseyError::Missing(n)),
            },
        };
        if let Some(e) = self.get(n) {
            if rec.value() > e.value.upper() {
                return Err(RamseyError::Table(format!(
                    "witness for n = {n} proves R({n},3) >= {} above configured {}",
                    rec.value(),
                    e.value
                )));
            }
        }
        Ok(rec)
    }
}
