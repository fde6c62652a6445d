//! Normal-form components of an ordinal and the node classes they induce.
//!
//! Writing `gamma = w^b1 + w^b2 + ... + w^bN` with every coefficient one,
//! component `i` is the interval `(S_{i-1}, S_i]` of partial sums, with `0`
//! placed in component 1. Node class `(i, j)` is the set of `alpha < gamma`
//! in component `i` with Cantor-Bendixson rank `j`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::forest::{next_with_cb, BoundedEnumeration};
use super::{Ordinal, OrdinalError, Term};

/// Identifies the node class `(cnf_index, cb_level)` of some ambient ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeClassId {
    pub cnf_index: u64,
    pub cb_level: u32,
}

impl NodeClassId {
    pub const fn new(cnf_index: u64, cb_level: u32) -> Self {
        Self { cnf_index, cb_level }
    }
}

impl fmt::Display for NodeClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.cnf_index, self.cb_level)
    }
}

impl Serialize for NodeClassId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.cnf_index, self.cb_level).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NodeClassId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (cnf_index, cb_level) = <(u64, u32)>::deserialize(deserializer)?;
        Ok(Self { cnf_index, cb_level })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassSize {
    Finite(u64),
    Infinite,
}

impl ClassSize {
    pub fn is_empty(self) -> bool {
        self == ClassSize::Finite(0)
    }

    pub fn at_least(self, k: u64) -> bool {
        match self {
            ClassSize::Finite(n) => n >= k,
            ClassSize::Infinite => true,
        }
    }
}

/// Unit-coefficient decomposition of an ordinal, indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    gamma: Ordinal,
    /// `starts[t]` counts the components contributed by terms before `t`.
    starts: Vec<u64>,
    count: u64,
}

impl Components {
    pub fn new(gamma: &Ordinal) -> Self {
        let mut starts = Vec::with_capacity(gamma.terms().len());
        let mut count = 0u64;
        for t in gamma.terms() {
            starts.push(count);
            count += t.coefficient;
        }
        Self { gamma: gamma.clone(), starts, count }
    }

    pub fn gamma(&self) -> &Ordinal {
        &self.gamma
    }

    /// Number of components `N`.
    pub fn count(&self) -> u64 {
        self.count
    }

    fn term_of(&self, i: u64) -> Option<usize> {
        if i == 0 || i > self.count {
            return None;
        }
        Some(self.starts.partition_point(|&s| s < i) - 1)
    }

    /// Exponent of component `i` (1-based).
    pub fn exponent(&self, i: u64) -> Option<u32> {
        self.term_of(i).map(|t| self.gamma.terms()[t].exponent)
    }

    /// Partial sum `S_i` of the first `i` components; `S_0 = 0`.
    pub fn partial_sum(&self, i: u64) -> Ordinal {
        let Some(t) = self.term_of(i) else {
            return if i == 0 { Ordinal::zero() } else { self.gamma.clone() };
        };
        let mut terms = self.gamma.terms()[..t].to_vec();
        terms.push(Term { exponent: self.gamma.terms()[t].exponent, coefficient: i - self.starts[t] });
        Ordinal::from_terms(terms).expect("prefix of a normal form")
    }

    /// `CNF_gamma(alpha)`: least `i` with `alpha <= S_i`; zero maps to 1.
    pub fn index_of(&self, alpha: &Ordinal) -> Result<u64, OrdinalError> {
        if alpha > &self.gamma {
            return Err(OrdinalError::OutOfRange { alpha: alpha.clone(), gamma: self.gamma.clone() });
        }
        if alpha.is_zero() {
            return Ok(1);
        }
        let terms = self.gamma.terms();
        for (t, term) in terms.iter().enumerate() {
            let block_end = Ordinal::from_terms(terms[..=t].to_vec()).expect("prefix");
            if alpha <= &block_end {
                // alpha agrees with gamma on the first t terms and exceeds that prefix.
                let rest = alpha.terms()[t];
                let q = if rest.exponent < term.exponent {
                    1
                } else if alpha.terms().len() == t + 1 {
                    rest.coefficient
                } else {
                    rest.coefficient + 1
                };
                return Ok(self.starts[t] + q);
            }
        }
        unreachable!("alpha <= gamma is dominated by the full sum")
    }

    /// All class ids `(i, j)` with `j <= exponent(i)`, in lexicographic order.
    pub fn class_ids(&self) -> impl Iterator<Item = NodeClassId> + '_ {
        (1..=self.count).flat_map(move |i| {
            let e = self.exponent(i).expect("in range");
            (0..=e).map(move |j| NodeClassId::new(i, j))
        })
    }

    pub fn is_valid(&self, id: NodeClassId) -> bool {
        self.exponent(id.cnf_index).is_some_and(|e| id.cb_level <= e)
    }

    pub fn classify(&self, alpha: &Ordinal) -> Result<NodeClassId, OrdinalError> {
        if alpha >= &self.gamma {
            return Err(OrdinalError::OutOfRange { alpha: alpha.clone(), gamma: self.gamma.clone() });
        }
        Ok(NodeClassId::new(self.index_of(alpha)?, alpha.cb_rank()))
    }

    pub fn class_size(&self, id: NodeClassId) -> Result<ClassSize, OrdinalError> {
        let e = self.checked_exponent(id)?;
        if id.cb_level < e {
            return Ok(ClassSize::Infinite);
        }
        // The top S_i is the only rank-e member; it lies below gamma unless i = N.
        let top = u64::from(id.cnf_index < self.count);
        let zero = u64::from(id.cnf_index == 1 && id.cb_level == 0);
        Ok(ClassSize::Finite(top + zero))
    }

    fn checked_exponent(&self, id: NodeClassId) -> Result<u32, OrdinalError> {
        match self.exponent(id.cnf_index) {
            Some(e) if id.cb_level <= e => Ok(e),
            _ => Err(OrdinalError::InvalidClass { gamma: self.gamma.clone(), id }),
        }
    }

    /// Least member of class `id` strictly above `after` (`None`: the least member).
    pub fn next_in_class(&self, id: NodeClassId, after: Option<&Ordinal>) -> Option<Ordinal> {
        self.checked_exponent(id).ok()?;
        if after.is_none() && id == NodeClassId::new(1, 0) && !self.gamma.is_zero() {
            return Some(Ordinal::zero());
        }
        let lo = self.partial_sum(id.cnf_index - 1);
        let start = match after {
            Some(a) if a > &lo => a.clone(),
            _ => lo,
        };
        let y = next_with_cb(&start, id.cb_level);
        (y <= self.partial_sum(id.cnf_index) && y < self.gamma).then_some(y)
    }

    pub fn node_class(&self, id: NodeClassId) -> Result<BoundedEnumeration, OrdinalError> {
        self.checked_exponent(id)?;
        let me = Arc::new(self.clone());
        let pred = Arc::clone(&me);
        Ok(BoundedEnumeration::from_successor(
            move |a| pred.classify(a).is_ok_and(|c| c == id),
            move |after| me.next_in_class(id, after),
        ))
    }
}

/// `CNF_gamma(alpha)`, with `cnf_index(gamma, 0) = 1`.
pub fn cnf_index(gamma: &Ordinal, alpha: &Ordinal) -> Result<u64, OrdinalError> {
    Components::new(gamma).index_of(alpha)
}

/// The node class containing `alpha < gamma`.
pub fn classify(gamma: &Ordinal, alpha: &Ordinal) -> Result<NodeClassId, OrdinalError> {
    Components::new(gamma).classify(alpha)
}

pub fn class_size(gamma: &Ordinal, id: NodeClassId) -> Result<ClassSize, OrdinalError> {
    Components::new(gamma).class_size(id)
}

pub fn node_class(gamma: &Ordinal, id: NodeClassId) -> Result<BoundedEnumeration, OrdinalError> {
    Components::new(gamma).node_class(id)
}

pub fn next_in_class(gamma: &Ordinal, id: NodeClassId, after: Option<&Ordinal>) -> Option<Ordinal> {
    Components::new(gamma).next_in_class(id, after)
}
