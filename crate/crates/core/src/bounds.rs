//! The four bounds on `R^cl(ω+n, 3)` as functions of classical Ramsey values.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ordinal::Ordinal;
use crate::ramsey::{Provenance, RamseyError, RamseyTable, RamseyValue};

/// `ω²·a + ω·b + c`.
pub fn quadratic(a: u64, b: u64, c: u64) -> Ordinal {
    let mut x = Ordinal::omega_pow(2, a);
    x = &x + &Ordinal::omega_pow(1, b);
    &x + &Ordinal::nat(c)
}

/// A bound evaluated at both ends of a Ramsey interval. `low == high` when
/// the value it depends on is exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrdinalRange {
    pub low: Ordinal,
    pub high: Ordinal,
}

impl OrdinalRange {
    fn eval(v: RamseyValue, f: impl Fn(u64) -> Ordinal) -> Self {
        Self { low: f(v.lower() as u64), high: f(v.upper() as u64) }
    }

    pub fn is_exact(&self) -> bool {
        self.low == self.high
    }
}

impl std::fmt::Display for OrdinalRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.low)
        } else {
            write!(f, "{} .. {}", self.low, self.high)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Yes,
    No,
    Unknown,
}

impl std::fmt::Display for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flag::Yes => "yes",
            Flag::No => "no",
            Flag::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UsedValue {
    pub value: RamseyValue,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsRow {
    pub n: u32,
    /// `ω²·n + ω·(R(n,3)−n) + n`.
    pub lower: OrdinalRange,
    /// `ω²·n + ω·(R(2n−3,3)+1) + 1`.
    pub upper_ramsey: OrdinalRange,
    /// `ω²·n + ω·(n²−4) + 1`.
    pub upper_square: Ordinal,
    /// `ω²·(R(n−1,3)+1) + ω·(n−1) + n`.
    pub upper_prior: OrdinalRange,
    pub ramsey_values_used: BTreeMap<u32, UsedValue>,
    /// Whether `upper_square < upper_ramsey`.
    pub square_better: Flag,
}

impl BoundsRow {
    /// `lower <= upper` for every upper bound, at the proven ends.
    pub fn is_consistent(&self) -> bool {
        self.lower.low <= self.upper_square && self.lower.low <= self.upper_ramsey.high && self.lower.low <= self.upper_prior.high
    }

    pub fn uses_external(&self) -> bool {
        self.ramsey_values_used.values().any(|u| u.provenance == Provenance::External)
    }
}

pub fn bounds_row(n: u32, table: &RamseyTable) -> Result<BoundsRow, RamseyError> {
    if n < 3 {
        return Err(RamseyError::OutOfRange(n, "n >= 3"));
    }
    let mut used = BTreeMap::new();
    let mut fetch = |m: u32| -> Result<RamseyValue, RamseyError> {
        let e = table.get(m).ok_or(RamseyError::Missing(m))?;
        used.insert(m, UsedValue { value: e.value, provenance: e.provenance });
        Ok(e.value)
    };
    let n64 = n as u64;
    let r_n = fetch(n)?;
    let r_ram = fetch(2 * n - 3)?;
    let r_prior = fetch(n - 1)?;
    let lower = OrdinalRange::eval(r_n, |r| quadratic(n64, r - n64, n64));
    let upper_ramsey = OrdinalRange::eval(r_ram, |r| quadratic(n64, r + 1, 1));
    let upper_square = quadratic(n64, n64 * n64 - 4, 1);
    let upper_prior = OrdinalRange::eval(r_prior, |r| quadratic(r + 1, n64 - 1, n64));
    let square_better = if upper_square < upper_ramsey.low {
        Flag::Yes
    } else if upper_square >= upper_ramsey.high {
        Flag::No
    } else {
        Flag::Unknown
    };
    Ok(BoundsRow { n, lower, upper_ramsey, upper_square, upper_prior, ramsey_values_used: used, square_better })
}

/// Rows for `3..=nmax`.
pub fn compute_bounds(nmax: u32, table: &RamseyTable) -> Result<Vec<BoundsRow>, RamseyError> {
    (3..=nmax).map(|n| bounds_row(n, table)).collect()
}
