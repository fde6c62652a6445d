//! Boolean variables for the eventual colors between classes of
//! `ω²·n + ω·K + 1`, and the lemma clause schemas over them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::sat::Lit;

/// A class `(i,j)`: component `i` (from 1), level `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassRef {
    pub comp: u32,
    pub level: u32,
}

impl ClassRef {
    pub fn new(comp: u32, level: u32) -> Self {
        Self { comp, level }
    }
}

impl fmt::Display for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.comp, self.level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum VarName {
    /// Eventual color from class `src` toward the tails of class `tgt`.
    Tilde { src: ClassRef, tgt: ClassRef },
    /// Color between `L_comp` and its level-`level` descendants.
    Hat { comp: u32, level: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Schema {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
    C11,
    C12,
    C13,
    C14,
}

impl Schema {
    pub const ALL: [Schema; 14] = [
        Schema::C1,
        Schema::C2,
        Schema::C3,
        Schema::C4,
        Schema::C5,
        Schema::C6,
        Schema::C7,
        Schema::C8,
        Schema::C9,
        Schema::C10,
        Schema::C11,
        Schema::C12,
        Schema::C13,
        Schema::C14,
    ];

    /// The fact each schema encodes, in words.
    pub fn anchor(self) -> &'static str {
        match self {
            Schema::C1 => "a class is not blue to both low levels of another component",
            Schema::C2 => "levels 0 and 1 of a component are not both blue into one class",
            Schema::C3 => "the top point is not blue to both low levels",
            Schema::C4 => "two CB-0 classes blue into a common class are red to each other",
            Schema::C5 => "a red top-to-level pair forces a blue connection from every upper class",
            Schema::C6 => "every upper class has a blue connection into each lower component",
            Schema::C7 => "the top point is blue to some low level",
            Schema::C8 => "no red closed w+n through the singleton classes",
            Schema::C9 => "no blue connection to the red-side level",
            Schema::C10 => "exactly one of the two cross connections is blue",
            Schema::C11 => "if every CB-0 class above n is blue into a class, no singleton is",
            Schema::C12 => "blue triangle through common tails",
            Schema::C13 => "no blue 3 among singleton classes",
            Schema::C14 => "a blue singleton connection excludes the opposite one",
        }
    }

    /// Schemas that follow from the others and only serve the sanity check.
    pub fn is_redundant(self) -> bool {
        matches!(self, Schema::C4 | Schema::C10)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for Schema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown schema {s:?}"))
    }
}

/// The variables for `γ = ω²·n + ω·K + 1`. Components `1..=n` have levels
/// 0..=2, components `n+1..=n+K` levels 0..=1. The final unit component is
/// empty and gets no variables.
#[derive(Debug, Clone)]
pub struct VariableSpace {
    n: u32,
    k: u32,
    names: Vec<VarName>,
    index: HashMap<VarName, u32>,
}

impl VariableSpace {
    pub fn new(n: u32, k: u32) -> Self {
        let mut space = Self { n, k, names: Vec::new(), index: HashMap::new() };
        // Component-major order: a component's hat variables, then every
        // tilde variable whose source lies in it.
        for i in 1..=n + k {
            if i <= n {
                for l in 0..2 {
                    space.declare(VarName::Hat { comp: i, level: l });
                }
            }
            for j in 0..=space.top(i) {
                let src = ClassRef::new(i, j);
                let targets: Vec<ClassRef> = space.classes().filter(|t| t.comp != i).collect();
                for tgt in targets {
                    space.declare(space.canonical(src, tgt));
                }
            }
        }
        space
    }

    fn declare(&mut self, name: VarName) {
        if !self.index.contains_key(&name) {
            self.index.insert(name, self.names.len() as u32);
            self.names.push(name);
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn components(&self) -> u32 {
        self.n + self.k
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Highest level of component `i`.
    pub fn top(&self, i: u32) -> u32 {
        if i <= self.n {
            2
        } else {
            1
        }
    }

    /// The singleton class `L_i`.
    pub fn l(&self, i: u32) -> ClassRef {
        ClassRef::new(i, self.top(i))
    }

    pub fn is_l(&self, c: ClassRef) -> bool {
        c.level == self.top(c.comp)
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassRef> + '_ {
        (1..=self.components()).flat_map(move |i| (0..=self.top(i)).map(move |j| ClassRef::new(i, j)))
    }

    /// Colors between two singletons are symmetric, so `t(L_a;L_b)` and
    /// `t(L_b;L_a)` are one variable, stored with the larger index first.
    fn canonical(&self, src: ClassRef, tgt: ClassRef) -> VarName {
        if self.is_l(src) && self.is_l(tgt) && src.comp < tgt.comp {
            VarName::Tilde { src: tgt, tgt: src }
        } else {
            VarName::Tilde { src, tgt }
        }
    }

    fn valid(&self, c: ClassRef) -> bool {
        (1..=self.components()).contains(&c.comp) && c.level <= self.top(c.comp)
    }

    /// `t(src;tgt)`; panics on an undeclared pair.
    pub fn t(&self, src: ClassRef, tgt: ClassRef) -> u32 {
        self.try_t(src, tgt).unwrap_or_else(|| panic!("no variable t({src};{tgt})"))
    }

    pub fn try_t(&self, src: ClassRef, tgt: ClassRef) -> Option<u32> {
        if !self.valid(src) || !self.valid(tgt) || src.comp == tgt.comp {
            return None;
        }
        self.index.get(&self.canonical(src, tgt)).copied()
    }

    pub fn h(&self, i: u32, l: u32) -> u32 {
        self.index[&VarName::Hat { comp: i, level: l }]
    }

    pub fn name(&self, var: u32) -> VarName {
        self.names[var as usize]
    }

    pub fn names(&self) -> &[VarName] {
        &self.names
    }

    pub fn lookup(&self, name: &VarName) -> Option<u32> {
        match *name {
            VarName::Tilde { src, tgt } => self.try_t(src, tgt),
            VarName::Hat { .. } => self.index.get(name).copied(),
        }
    }

    /// `t(L_3;L_2)`, `t(4,0;1,1)`, `h(1,0)`.
    pub fn display(&self, var: u32) -> String {
        let show = |c: ClassRef| if self.is_l(c) { format!("L_{}", c.comp) } else { c.to_string() };
        match self.name(var) {
            VarName::Tilde { src, tgt } => format!("t({};{})", show(src), show(tgt)),
            VarName::Hat { comp, level } => format!("h({comp},{level})"),
        }
    }

    pub fn display_lit(&self, l: Lit) -> String {
        let s = self.display(l.var());
        if l.is_positive() {
            s
        } else {
            format!("¬{s}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedClause {
    pub lits: Vec<Lit>,
    pub schema: Schema,
}

#[derive(Debug, Clone)]
pub struct ClauseSystem {
    pub space: VariableSpace,
    pub clauses: Vec<TaggedClause>,
}

impl ClauseSystem {
    pub fn counts(&self) -> BTreeMap<Schema, usize> {
        let mut m = BTreeMap::new();
        for c in &self.clauses {
            *m.entry(c.schema).or_insert(0) += 1;
        }
        m
    }

    /// The same system without the given schemas.
    pub fn without(&self, drop: &[Schema]) -> ClauseSystem {
        ClauseSystem {
            space: self.space.clone(),
            clauses: self.clauses.iter().filter(|c| !drop.contains(&c.schema)).cloned().collect(),
        }
    }

    pub fn cnf(&self) -> Vec<Vec<Lit>> {
        self.clauses.iter().map(|c| c.lits.clone()).collect()
    }

    /// Whether every clause holds under the assignment; returns the first
    /// failing clause index otherwise.
    pub fn first_violated(&self, model: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| !c.lits.iter().any(|l| l.eval(model)))
    }

    pub fn display_clause(&self, idx: usize) -> String {
        let c = &self.clauses[idx];
        let body: Vec<String> = c.lits.iter().map(|&l| self.space.display_lit(l)).collect();
        format!("{}: {}", c.schema, body.join(" ∨ "))
    }
}

struct Builder {
    space: VariableSpace,
    clauses: Vec<TaggedClause>,
    seen: HashSet<(Schema, Vec<Lit>)>,
}

impl Builder {
    fn push(&mut self, schema: Schema, lits: Vec<Lit>) {
        let mut key = lits.clone();
        key.sort_unstable();
        key.dedup();
        assert!(!key.is_empty());
        if key.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        if self.seen.insert((schema, key.clone())) {
            // Keep first-occurrence order for readability, drop repeats.
            let mut out = Vec::with_capacity(key.len());
            for l in lits {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
            self.clauses.push(TaggedClause { lits: out, schema });
        }
    }

    fn t(&self, positive: bool, src: ClassRef, tgt: ClassRef) -> Lit {
        Lit::new(self.space.t(src, tgt), positive)
    }

    fn h(&self, positive: bool, i: u32, l: u32) -> Lit {
        Lit::new(self.space.h(i, l), positive)
    }
}

fn c(i: u32, j: u32) -> ClassRef {
    ClassRef::new(i, j)
}

fn subsets(items: &[u32], size: usize, mut f: impl FnMut(&[u32])) {
    fn go(items: &[u32], size: usize, start: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for idx in start..items.len() {
            if items.len() - idx < size - cur.len() {
                break;
            }
            cur.push(items[idx]);
            go(items, size, idx + 1, cur, f);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::new(), &mut f);
}

/// Sources `(i,j)` used by the upward-connection schemas for target `k`:
/// `k<i<=n` with `j<=1`, and `n<i<=n+K` with `j=0`.
fn upward_sources(n: u32, k: u32, big_k: u32) -> Vec<ClassRef> {
    let mut out = Vec::new();
    for i in k + 1..=n {
        out.push(c(i, 0));
        out.push(c(i, 1));
    }
    for i in n + 1..=n + big_k {
        out.push(c(i, 0));
    }
    out
}

/// C8 instances for one `(k, ℓ)` and index subset.
pub(crate) fn c8_clause(space: &VariableSpace, k: u32, l: u32, subset: &[u32]) -> Vec<Lit> {
    let mut lits = Vec::new();
    for (a, &p) in subset.iter().enumerate() {
        for &q in &subset[a + 1..] {
            lits.push(Lit::pos(space.t(space.l(q), space.l(p))));
        }
    }
    for &p in subset {
        lits.push(Lit::pos(space.t(space.l(p), c(k, l))));
    }
    for &p in subset {
        lits.push(Lit::pos(space.t(space.l(p), space.l(k))));
    }
    lits.push(Lit::pos(space.h(k, l)));
    lits
}

/// Calls `f(k, ℓ, subset)` for every C8 instance.
pub(crate) fn for_each_c8(n: u32, big_k: u32, mut f: impl FnMut(u32, u32, &[u32])) {
    for k in 1..=n {
        let above: Vec<u32> = (k + 1..=n + big_k).collect();
        for l in 0..2 {
            subsets(&above, (n - 1) as usize, |s| f(k, l, s));
        }
    }
}

pub fn c8_instance_count(n: u32, big_k: u32) -> u64 {
    fn binom(a: u64, b: u64) -> u64 {
        if b > a {
            return 0;
        }
        (0..b).fold(1u64, |acc, i| acc * (a - i) / (i + 1))
    }
    (1..=n).map(|k| 2 * binom((n + big_k - k) as u64, (n - 1) as u64)).sum()
}

/// Options for instantiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instantiation {
    /// Leave C8 out of the clause list; the caller supplies it lazily.
    pub lazy_c8: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstantiateError {
    #[error("n must be at least 3 (got {0})")]
    NTooSmall(u32),
    #[error("K must be at least 2 (got {0})")]
    KTooSmall(u32),
}

pub fn instantiate_clauses(n: u32, big_k: u32) -> Result<ClauseSystem, InstantiateError> {
    instantiate_with(n, big_k, Instantiation { lazy_c8: false })
}

pub fn instantiate_with(n: u32, big_k: u32, opts: Instantiation) -> Result<ClauseSystem, InstantiateError> {
    if n < 3 {
        return Err(InstantiateError::NTooSmall(n));
    }
    if big_k < 2 {
        return Err(InstantiateError::KTooSmall(big_k));
    }
    let space = VariableSpace::new(n, big_k);
    let mut b = Builder { space, clauses: Vec::new(), seen: HashSet::new() };
    let nk = n + big_k;
    let all: Vec<ClassRef> = b.space.classes().collect();

    // C1: a source never sees both lower levels of a low component blue.
    for &src in &all {
        for k in 1..=n {
            if k != src.comp {
                let cl = vec![b.t(false, src, c(k, 0)), b.t(false, src, c(k, 1))];
                b.push(Schema::C1, cl);
            }
        }
    }

    // C2
    for i in 1..=n {
        for k in 1..=n {
            if i == k {
                continue;
            }
            for l in 0..=2 {
                let cl = vec![b.t(false, c(i, 0), c(k, l)), b.t(false, c(i, 1), c(k, l))];
                b.push(Schema::C2, cl);
            }
        }
    }

    // C3
    for i in 1..=n {
        let cl = vec![b.h(false, i, 0), b.h(false, i, 1)];
        b.push(Schema::C3, cl);
    }

    // C4
    for i in n + 1..=nk {
        for m in n + 1..=nk {
            if i == m {
                continue;
            }
            for k in 1..=n {
                for l in 0..=2 {
                    let cl = vec![
                        b.t(false, c(m, 0), c(k, l)),
                        b.t(false, c(i, 0), c(k, l)),
                        b.t(false, c(m, 0), c(i, 0)),
                    ];
                    b.push(Schema::C4, cl);
                }
            }
        }
    }

    // C5
    for k in 1..=n {
        for l in 0..2 {
            for src in upward_sources(n, k, big_k) {
                let cl = vec![b.h(true, k, l), b.t(true, src, c(k, l)), b.t(true, src, c(k, 2))];
                b.push(Schema::C5, cl);
            }
        }
    }

    // C6
    for k in 1..n {
        for src in upward_sources(n, k, big_k) {
            let cl = (0..=2).map(|l| b.t(true, src, c(k, l))).collect();
            b.push(Schema::C6, cl);
        }
    }

    // C7
    for i in 1..n {
        let cl = vec![b.h(true, i, 0), b.h(true, i, 1)];
        b.push(Schema::C7, cl);
    }

    // C8
    if !opts.lazy_c8 {
        let mut pending = Vec::new();
        for_each_c8(n, big_k, |k, l, s| pending.push(c8_clause(&b.space, k, l, s)));
        for cl in pending {
            b.push(Schema::C8, cl);
        }
    }

    // C9: B_k = (k,ℓ) exactly when h(k,ℓ) holds.
    for k in 1..n {
        for l in 0..2 {
            for src in upward_sources(n, k, big_k) {
                let cl = vec![b.h(false, k, l), b.t(false, src, c(k, l))];
                b.push(Schema::C9, cl);
            }
        }
    }

    // C10, guarded by h(k,ℓ) so that it speaks about A_k = (k,ℓ).
    for k in 1..n {
        for l in 0..2 {
            let guard = b.h(true, k, l);
            for i in n + 1..=nk {
                let cl = vec![guard, b.t(true, c(i, 0), c(k, l)), b.t(true, c(i, 0), c(k, 2))];
                b.push(Schema::C10, cl);
            }
            for i in k + 1..=n {
                // t(i,1;L_k) = t(i,0;A_k) != t(i,1;A_k) = t(i,0;L_k)
                let a = b.space.t(c(i, 1), c(k, 2));
                let bb = b.space.t(c(i, 0), c(k, l));
                let cc = b.space.t(c(i, 1), c(k, l));
                let d = b.space.t(c(i, 0), c(k, 2));
                for (x, y, same) in [(a, bb, true), (cc, d, true), (bb, cc, false)] {
                    if same {
                        b.push(Schema::C10, vec![guard, Lit::neg(x), Lit::pos(y)]);
                        b.push(Schema::C10, vec![guard, Lit::pos(x), Lit::neg(y)]);
                    } else {
                        b.push(Schema::C10, vec![guard, Lit::neg(x), Lit::neg(y)]);
                        b.push(Schema::C10, vec![guard, Lit::pos(x), Lit::pos(y)]);
                    }
                }
            }
        }
    }

    // C11
    for i in 1..n {
        for j in 0..=2 {
            for mp in n + 1..nk {
                let mut cl: Vec<Lit> = (n + 1..=nk).map(|m| b.t(false, c(m, 0), c(i, j))).collect();
                cl.push(b.t(false, b.space.l(mp), c(i, j)));
                b.push(Schema::C11, cl);
            }
        }
    }

    // C12 over ordered triples in three distinct components.
    for &a in &all {
        for &bc in &all {
            if bc.comp == a.comp {
                continue;
            }
            for &x in &all {
                if x.comp == a.comp || x.comp == bc.comp {
                    continue;
                }
                let cl = vec![b.t(false, a, x), b.t(false, bc, x), b.t(false, a, bc)];
                b.push(Schema::C12, cl);
            }
        }
    }
    for i in 1..=n {
        for j in 0..2 {
            for &x in &all {
                if x.comp == i {
                    continue;
                }
                let cl = vec![b.t(false, c(i, 2), x), b.t(false, c(i, j), x), b.h(false, i, j)];
                b.push(Schema::C12, cl);
            }
        }
    }

    // C13
    for a in 1..=nk {
        for bb in a + 1..=nk {
            for cc in bb + 1..=nk {
                let (la, lb, lc) = (b.space.l(a), b.space.l(bb), b.space.l(cc));
                let cl = vec![b.t(false, lb, la), b.t(false, lc, la), b.t(false, lc, lb)];
                b.push(Schema::C13, cl);
            }
        }
    }

    // C14: with B_k = (k,1-ℓ), A_k = (k,ℓ) and the bar swaps A_k and L_k.
    for k in 1..=n {
        for i in k + 1..=n {
            for l in 0..2 {
                for m in n + 1..nk {
                    let g = b.h(false, k, 1 - l);
                    let (li, lm, lk) = (b.space.l(i), b.space.l(m), b.space.l(k));
                    let cl = vec![g, b.t(false, li, c(k, l)), b.t(false, lm, lk)];
                    b.push(Schema::C14, cl);
                    let cl = vec![g, b.t(false, li, lk), b.t(false, lm, c(k, l))];
                    b.push(Schema::C14, cl);
                }
            }
        }
    }

    Ok(ClauseSystem { space: b.space, clauses: b.clauses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has(sys: &ClauseSystem, text: &str) -> bool {
        (0..sys.clauses.len()).any(|i| sys.display_clause(i) == text)
    }

    #[test]
    fn variable_space_shape() {
        let s = VariableSpace::new(3, 2);
        // 3*3 + 2*2 = 13 classes.
        assert_eq!(s.classes().count(), 13);
        assert_eq!(s.t(s.l(3), s.l(2)), s.t(s.l(2), s.l(3)));
        assert_ne!(s.t(c(3, 0), c(2, 0)), s.t(c(2, 0), c(3, 0)));
        assert!(s.try_t(c(1, 0), c(1, 1)).is_none());
        assert!(s.try_t(c(4, 2), c(1, 1)).is_none());
        assert_eq!(s.display(s.t(s.l(2), s.l(3))), "t(L_3;L_2)");
        assert_eq!(s.display(s.h(1, 0)), "h(1,0)");
        assert_eq!(s.name(0), VarName::Hat { comp: 1, level: 0 });
        let pairs: usize = s
            .classes()
            .map(|a| s.classes().filter(|b| b.comp != a.comp).count())
            .sum();
        // 5 singletons give C(5,2) aliased pairs; plus 6 hat variables.
        assert_eq!(s.len(), pairs - 10 + 6);
    }

    #[test]
    fn catalogue_examples() {
        let sys = instantiate_clauses(3, 7).unwrap();
        assert!(has(&sys, "C8: t(L_3;L_2) ∨ t(L_2;1,0) ∨ t(L_3;1,0) ∨ t(L_2;L_1) ∨ t(L_3;L_1) ∨ h(1,0)"));
        assert!(has(&sys, "C3: ¬h(2,0) ∨ ¬h(2,1)"));
        assert!(has(&sys, "C5: h(1,1) ∨ t(4,0;1,1) ∨ t(4,0;L_1)"));
        let counts = sys.counts();
        assert_eq!(counts[&Schema::C8] as u64, c8_instance_count(3, 7));
        assert_eq!(counts[&Schema::C3], 3);
        assert_eq!(counts[&Schema::C7], 2);
        // C13: C(10,3) triples of singletons.
        assert_eq!(counts[&Schema::C13], 120);
        assert!(sys.clauses.iter().all(|c| !c.lits.is_empty()));
        assert!(Schema::ALL.iter().all(|s| counts.contains_key(s)));
    }

    #[test]
    fn preconditions() {
        assert_eq!(instantiate_clauses(2, 5).unwrap_err(), InstantiateError::NTooSmall(2));
        assert_eq!(instantiate_clauses(3, 1).unwrap_err(), InstantiateError::KTooSmall(1));
    }

    #[test]
    fn lazy_c8_leaves_the_schema_out() {
        let sys = instantiate_with(3, 4, Instantiation { lazy_c8: true }).unwrap();
        assert!(!sys.counts().contains_key(&Schema::C8));
        let mut count = 0;
        for_each_c8(3, 4, |_, _, _| count += 1);
        assert_eq!(count as u64, c8_instance_count(3, 4));
    }
}
