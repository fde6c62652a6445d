//! Ordinals below `w^w` in Cantor normal form.
//!
//! An [`Ordinal`] is a list of `(exponent, coefficient)` terms with strictly
//! decreasing exponents and positive coefficients; the empty list is zero.
//! The textual form uses `w` for omega, e.g. `w^2*3 + w + 4`.

mod classes;
mod forest;
mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use classes::{class_size, classify, cnf_index, next_in_class, node_class, ClassSize, Components, NodeClassId};
pub use forest::{
    f_set, next_with_cb, one_minus, one_plus, star_children, star_less, star_parent, t_level, t_set,
    BoundedEnumeration,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("exponent or coefficient overflow")]
    Overflow,
    #[error("{alpha} exceeds {gamma}")]
    OutOfRange { alpha: Ordinal, gamma: Ordinal },
    #[error("level {level} exceeds the Cantor-Bendixson rank {rank} of {theta}")]
    LevelTooHigh { theta: Ordinal, level: u32, rank: u32 },
    #[error("{id} is not a node class of {gamma}")]
    InvalidClass { gamma: Ordinal, id: NodeClassId },
}

/// One Cantor normal form term `w^exponent * coefficient`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub exponent: u32,
    pub coefficient: u64,
}

/// An ordinal below `w^w`.
///
/// The derived ordering is the ordinal ordering: terms compare by exponent
/// then coefficient, and a proper prefix is smaller.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    pub fn omega() -> Self {
        Self::omega_pow(1, 1)
    }

    pub fn nat(n: u64) -> Self {
        Self::omega_pow(0, n)
    }

    /// `w^exponent * coefficient`.
    pub fn omega_pow(exponent: u32, coefficient: u64) -> Self {
        if coefficient == 0 {
            return Self::zero();
        }
        Self { terms: vec![Term { exponent, coefficient }] }
    }

    /// Builds an ordinal from terms, validating the canonical-form invariants.
    pub fn from_terms(terms: Vec<Term>) -> Option<Self> {
        let ok = terms.iter().all(|t| t.coefficient > 0)
            && terms.windows(2).all(|w| w[0].exponent > w[1].exponent);
        ok.then_some(Self { terms })
    }

    /// Builds from `(exponent, coefficient)` pairs with strictly decreasing
    /// exponents, dropping zero coefficients.
    pub(crate) fn from_pairs_unchecked(pairs: impl IntoIterator<Item = (u32, u64)>) -> Self {
        let terms = pairs
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(exponent, coefficient)| Term { exponent, coefficient })
            .collect::<Vec<_>>();
        debug_assert!(terms.windows(2).all(|w| w[0].exponent > w[1].exponent));
        Self { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent == 0)
    }

    /// Nonzero with Cantor-Bendixson rank at least one.
    pub fn is_limit(&self) -> bool {
        self.cb_rank() > 0
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [Term { exponent: 0, coefficient }] => Some(*coefficient),
            _ => None,
        }
    }

    /// Exponent of the leading term; zero for the ordinal zero.
    pub fn leading_exponent(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.exponent)
    }

    /// Coefficient of `w^exponent` in the normal form (zero if absent).
    pub fn coefficient_of(&self, exponent: u32) -> u64 {
        self.terms
            .iter()
            .find(|t| t.exponent == exponent)
            .map_or(0, |t| t.coefficient)
    }

    /// Cantor-Bendixson rank: exponent of the last term, `CB(0) = 0`.
    pub fn cb_rank(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.exponent)
    }

    /// Coefficient of the last term, `L(0) = 1`.
    pub fn l_count(&self) -> u64 {
        self.terms.last().map_or(1, |t| t.coefficient)
    }

    /// Ordinal sum `self + rhs`, or `None` on coefficient overflow.
    pub fn checked_add(&self, rhs: &Ordinal) -> Option<Ordinal> {
        let Some(lead) = rhs.terms.first() else {
            return Some(self.clone());
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .copied()
            .take_while(|t| t.exponent >= lead.exponent)
            .collect();
        let mut rest = rhs.terms.iter().copied();
        if let Some(last) = terms.last_mut() {
            if last.exponent == lead.exponent {
                last.coefficient = last.coefficient.checked_add(lead.coefficient)?;
                rest.next();
            }
        }
        terms.extend(rest);
        Some(Ordinal { terms })
    }

    /// The unique `d` with `self + d = larger`, or `None` if `larger < self`.
    pub fn left_subtract(&self, larger: &Ordinal) -> Option<Ordinal> {
        if larger < self {
            return None;
        }
        let common = self
            .terms
            .iter()
            .zip(&larger.terms)
            .take_while(|(a, b)| a == b)
            .count();
        if common == self.terms.len() {
            return Some(Ordinal { terms: larger.terms[common..].to_vec() });
        }
        // larger > self, so the first differing term of `larger` is bigger.
        let a = self.terms[common];
        let b = larger.terms[common];
        let mut terms = Vec::with_capacity(larger.terms.len() - common);
        if a.exponent == b.exponent {
            terms.push(Term { exponent: b.exponent, coefficient: b.coefficient - a.coefficient });
        } else {
            terms.push(b);
        }
        terms.extend_from_slice(&larger.terms[common + 1..]);
        Some(Ordinal { terms })
    }

    /// Splits a nonzero ordinal as `delta + w^cb` where `cb` is its rank.
    pub(crate) fn split_last_unit(&self) -> Option<(Ordinal, u32)> {
        let last = *self.terms.last()?;
        let mut terms = self.terms.clone();
        if last.coefficient == 1 {
            terms.pop();
        } else {
            terms.last_mut().expect("nonempty").coefficient -= 1;
        }
        Some((Ordinal { terms }, last.exponent))
    }

    /// Terms with exponent strictly above `exponent`.
    pub(crate) fn truncate_above(&self, exponent: u32) -> Ordinal {
        Ordinal {
            terms: self.terms.iter().copied().take_while(|t| t.exponent > exponent).collect(),
        }
    }
}

impl std::ops::Add for &Ordinal {
    type Output = Ordinal;

    /// Panics on coefficient overflow; use [`Ordinal::checked_add`] to handle it.
    fn add(self, rhs: &Ordinal) -> Ordinal {
        self.checked_add(rhs).expect("ordinal coefficient overflow")
    }
}

impl std::ops::Add for Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: Ordinal) -> Ordinal {
        &self + &rhs
    }
}

/// Three-way ordinal comparison.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, t) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            match (t.exponent, t.coefficient) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse(s)
    }
}

/// Parses an ordinal expression such as `w^2*3 + w*3 + 3`.
pub fn parse(text: &str) -> Result<Ordinal, OrdinalError> {
    parse::parse(text)
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn absorption_and_concatenation() {
        assert_eq!(o("w*5") + o("w^2"), o("w^2"));
        assert_eq!(o("w^2*2") + o("w*3 + 1"), o("w^2*2 + w*3 + 1"));
        assert_eq!(Ordinal::zero() + o("w^3 + 2"), o("w^3 + 2"));
        assert_eq!(Ordinal::one() + Ordinal::omega(), Ordinal::omega());
        assert_ne!(Ordinal::omega() + Ordinal::one(), Ordinal::omega());
        assert_eq!(o("w^2 + w*2") + o("w*3 + 4"), o("w^2 + w*5 + 4"));
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare(&o("w^2"), &o("w*100")), Ordering::Greater);
        assert_eq!(compare(&o("w^2*3 + w"), &o("w^2*3 + w")), Ordering::Equal);
        assert_eq!(compare(&o("w + 1"), &o("w*2")), Ordering::Less);
        assert!(o("w") < o("w + 1"));
        assert!(o("7") < o("w"));
    }

    #[test]
    fn rank_and_last_coefficient() {
        assert_eq!(o("w^2*3 + w*2").cb_rank(), 1);
        assert_eq!(o("w^2*3 + w*2").l_count(), 2);
        assert_eq!(o("w^2*4 + w*9 + 1").cb_rank(), 0);
        assert_eq!(o("w^2*4 + w*9 + 1").l_count(), 1);
        assert_eq!(Ordinal::zero().cb_rank(), 0);
        assert_eq!(Ordinal::zero().l_count(), 1);
    }

    #[test]
    fn left_subtraction() {
        let cases = [("5", "w^2*2 + w"), ("w*2", "w*3"), ("w^2 + 3", "w^2 + w"), ("w", "w"), ("0", "w^4")];
        for (a, b) in cases {
            let (a, b) = (o(a), o(b));
            let d = a.left_subtract(&b).unwrap();
            assert_eq!(&a + &d, b, "{a} + {d}");
        }
        assert_eq!(o("w*2").left_subtract(&o("w*3")), Some(o("w")));
        assert_eq!(o("w").left_subtract(&o("5")), None);
    }

    #[test]
    fn overflow_is_reported() {
        let big = Ordinal::nat(u64::MAX);
        assert_eq!(big.checked_add(&Ordinal::one()), None);
    }

    #[test]
    fn serde_uses_expression_strings() {
        let a = o("w^2*3 + w + 2");
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "\"w^2*3 + w + 2\"");
        assert_eq!(serde_json::from_str::<Ordinal>(&json).unwrap(), a);
    }
}
