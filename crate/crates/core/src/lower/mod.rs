//! The triangle-free graph `G_n` on a partition of
//! `w^2*n + w*(R(n,3)-n) + (n-1)` into node-class unions, and the coloring it
//! induces. Verifying that coloring shows the closed Ramsey lower bound.

mod dot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::coloring::{
    decide_blue_closed_3, decide_red_closed_omega_plus_n, extract_canonical_table, verify_certificate, Color,
    ColoringError, CopyCertificate, QuotientColoring,
};
use crate::ordinal::{ClassSize, Components, NodeClassId, Ordinal, Term};
use crate::ramsey::{independent_prefix, RamseyError, RamseyRecord, Source, WitnessGraph};

pub use dot::to_dot;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LowerError {
    #[error("the construction needs n >= 3, got {0}")]
    NTooSmall(u32),
    #[error("record is for R({found},3), expected R({expected},3)")]
    RecordMismatch { expected: u32, found: u32 },
    #[error("witness on {order} vertices is too small for n = {n}")]
    WitnessTooSmall { n: u32, order: u32 },
    #[error("witness vertices 0..{0} are not independent; relabel first")]
    PrefixNotIndependent(u32),
    #[error("pair {0} lands in two edge strata")]
    Overlap(String),
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// A vertex of `G_n`: `A_i`, `B_i`, `L_i` (`i <= n`), `C_i`, `L_i` (`n < i <= n+K`) or `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    A(u32),
    B(u32),
    L(u32),
    C(u32),
    R,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::A(i) => write!(f, "A_{i}"),
            Vertex::B(i) => write!(f, "B_{i}"),
            Vertex::L(i) => write!(f, "L_{i}"),
            Vertex::C(i) => write!(f, "C_{i}"),
            Vertex::R => f.write_str("R"),
        }
    }
}

impl FromStr for Vertex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "R" {
            return Ok(Vertex::R);
        }
        let (tag, idx) = s.split_once('_').ok_or_else(|| format!("bad vertex name {s:?}"))?;
        let i: u32 = idx.parse().map_err(|_| format!("bad vertex index in {s:?}"))?;
        match tag {
            "A" => Ok(Vertex::A(i)),
            "B" => Ok(Vertex::B(i)),
            "L" => Ok(Vertex::L(i)),
            "C" => Ok(Vertex::C(i)),
            _ => Err(format!("bad vertex name {s:?}")),
        }
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The vertex partition for a given `n` and witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClassSpec {
    n: u32,
    k: u32,
    witness: WitnessGraph,
    source: Option<Source>,
    gamma: Ordinal,
    components: Components,
    members: BTreeMap<Vertex, Vec<NodeClassId>>,
    owner: BTreeMap<NodeClassId, Vertex>,
}

fn id(i: u32, j: u32) -> NodeClassId {
    NodeClassId::new(i as u64, j)
}

fn lower_gamma(n: u32, k: u32) -> Ordinal {
    let mut terms = vec![Term { exponent: 2, coefficient: n as u64 }, Term { exponent: 1, coefficient: k as u64 }];
    if n > 1 {
        terms.push(Term { exponent: 0, coefficient: n as u64 - 1 });
    }
    Ordinal::from_terms(terms).expect("decreasing exponents")
}

/// Partition from a verified record. `R(n,3)` is taken as the record's value.
pub fn build_partition(n: u32, rec: &RamseyRecord) -> Result<VertexClassSpec, LowerError> {
    if rec.n() != n {
        return Err(LowerError::RecordMismatch { expected: n, found: rec.n() });
    }
    let mut spec = build_partition_unverified(n, rec.witness().clone())?;
    spec.source = Some(rec.source());
    Ok(spec)
}

/// Same, trusting `witness` blindly: `R(n,3)` is read as `order + 1`.
/// Meant for sabotage experiments.
pub fn build_partition_unverified(n: u32, witness: WitnessGraph) -> Result<VertexClassSpec, LowerError> {
    if n < 3 {
        return Err(LowerError::NTooSmall(n));
    }
    let order = witness.order();
    if order < n {
        return Err(LowerError::WitnessTooSmall { n, order });
    }
    let k = order + 1 - n;
    let gamma = lower_gamma(n, k);
    let components = Components::new(&gamma);
    let mut members: BTreeMap<Vertex, Vec<NodeClassId>> = BTreeMap::new();
    for i in 1..=n {
        members.insert(Vertex::A(i), vec![id(i, 0)]);
        members.insert(Vertex::B(i), vec![id(i, 1)]);
        members.insert(Vertex::L(i), vec![id(i, 2)]);
    }
    for i in n + 1..=n + k {
        members.insert(Vertex::C(i), vec![id(i, 0)]);
        members.insert(Vertex::L(i), vec![id(i, 1)]);
    }
    members.insert(Vertex::R, (1..=n - 2).map(|m| id(n + k + m, 0)).collect());
    let owner = members.iter().flat_map(|(v, ids)| ids.iter().map(move |c| (*c, *v))).collect();
    Ok(VertexClassSpec { n, k, witness, source: None, gamma, components, members, owner })
}

impl VertexClassSpec {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `K = R(n,3) - n`.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn ramsey_value(&self) -> u32 {
        self.n + self.k
    }

    pub fn witness(&self) -> &WitnessGraph {
        &self.witness
    }

    pub fn source(&self) -> Option<Source> {
        self.source
    }

    pub fn gamma(&self) -> &Ordinal {
        &self.gamma
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.members.keys().copied()
    }

    pub fn classes_of(&self, v: Vertex) -> &[NodeClassId] {
        self.members.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn vertex_of_class(&self, c: NodeClassId) -> Option<Vertex> {
        self.owner.get(&c).copied()
    }

    /// The vertex containing `alpha`.
    pub fn vertex_of(&self, alpha: &Ordinal) -> Result<Vertex, LowerError> {
        let c = self.components.classify(alpha).map_err(ColoringError::from)?;
        Ok(self.vertex_of_class(c).expect("partition covers every nonempty class"))
    }

    /// `W = {C_(n+1), ..., C_(n+K), L_(n+K), R}`.
    pub fn w_set(&self) -> Vec<Vertex> {
        let (n, k) = (self.n, self.k);
        let mut w: Vec<Vertex> = (n + 1..=n + k).map(Vertex::C).collect();
        w.push(Vertex::L(n + k));
        w.push(Vertex::R);
        w
    }

    /// Every nonempty class of `gamma` is owned by exactly one vertex, every
    /// owned class is nonempty, and `R` has `n - 2` singleton members.
    pub fn check_partition(&self) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        for (v, ids) in &self.members {
            for c in ids {
                if !seen.insert(*c) {
                    return Err(format!("class {c} listed twice"));
                }
                match self.components.class_size(*c) {
                    Ok(ClassSize::Finite(0)) | Err(_) => return Err(format!("{v} owns empty or invalid class {c}")),
                    _ => {}
                }
            }
        }
        for c in self.components.class_ids() {
            let empty = self.components.class_size(c).map(|s| s.is_empty()).unwrap_or(true);
            if !empty && !seen.contains(&c) {
                return Err(format!("class {c} has no vertex"));
            }
        }
        let r = self.classes_of(Vertex::R);
        if r.len() as u32 != self.n - 2 || r.iter().any(|c| self.components.class_size(*c) != Ok(ClassSize::Finite(1))) {
            return Err("R must be n-2 singletons".into());
        }
        if !self.components.node_class(id(1, 0)).is_ok_and(|e| e.contains(&Ordinal::zero())) {
            return Err("A_1 must contain 0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stratum {
    E1,
    E2,
    E3,
    E4,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone)]
pub struct GnGraph {
    spec: VertexClassSpec,
    edges: BTreeMap<(Vertex, Vertex), Stratum>,
}

fn pair(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Adds the four edge strata. The witness must already have an independent
/// prefix `0..n-1` so that `L_1, ..., L_(n-1)` are pairwise non-adjacent.
pub fn build_gn(spec: VertexClassSpec) -> Result<GnGraph, LowerError> {
    let (n, k) = (spec.n, spec.k);
    let prefix: Vec<u32> = (0..n - 1).collect();
    if !spec.witness.is_independent(&prefix) {
        return Err(LowerError::PrefixNotIndependent(n - 1));
    }
    let mut edges = BTreeMap::new();
    let mut add = |a: Vertex, b: Vertex, s: Stratum| match edges.insert(pair(a, b), s) {
        Some(old) if old != s => Err(LowerError::Overlap(format!("{{{a},{b}}} in {old} and {s}"))),
        Some(_) => Err(LowerError::Overlap(format!("{{{a},{b}}} twice in {s}"))),
        None => Ok(()),
    };
    for i in 1..=n {
        for j in i + 1..=n {
            add(Vertex::L(i), Vertex::A(j), Stratum::E1)?;
            add(Vertex::A(i), Vertex::B(j), Stratum::E1)?;
        }
        add(Vertex::A(i), Vertex::B(i), Stratum::E1)?;
        add(Vertex::B(i), Vertex::L(i), Stratum::E1)?;
    }
    for i in n + 1..n + k {
        add(Vertex::C(i), Vertex::L(i), Stratum::E2)?;
    }
    // L_i is witness vertex i-1, for 1 <= i < R(n,3).
    for [u, v] in spec.witness.edges() {
        add(Vertex::L(u + 1), Vertex::L(v + 1), Stratum::E3)?;
    }
    for x in spec.w_set() {
        for i in 1..=n {
            add(x, Vertex::A(i), Stratum::E4)?;
        }
    }
    Ok(GnGraph { spec, edges })
}

impl GnGraph {
    pub fn spec(&self) -> &VertexClassSpec {
        &self.spec
    }

    pub fn stratum(&self, a: Vertex, b: Vertex) -> Option<Stratum> {
        self.edges.get(&pair(a, b)).copied()
    }

    pub fn adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.stratum(a, b).is_some()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, Stratum)> + '_ {
        self.edges.iter().map(|(&(a, b), &s)| (a, b, s))
    }

    pub fn stratum_sizes(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for s in self.edges.values() {
            out[*s as usize] += 1;
        }
        out
    }

    /// Neighbors of `v` through edges of the given strata.
    pub fn neighbors(&self, v: Vertex, strata: &[Stratum]) -> BTreeSet<Vertex> {
        self.edges()
            .filter(|(_, _, s)| strata.contains(s))
            .filter_map(|(a, b, _)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    /// A triangle, by exhaustive search over vertex triples.
    pub fn find_triangle(&self) -> Option<[Vertex; 3]> {
        let vs: Vec<Vertex> = self.spec.vertices().collect();
        for (x, &a) in vs.iter().enumerate() {
            for (y, &b) in vs.iter().enumerate().skip(x + 1) {
                if !self.adjacent(a, b) {
                    continue;
                }
                for &c in &vs[y + 1..] {
                    if self.adjacent(a, c) && self.adjacent(b, c) {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }
}

pub fn check_triangle_free(g: &GnGraph) -> Result<(), [Vertex; 3]> {
    match g.find_triangle() {
        Some(t) => Err(t),
        None => Ok(()),
    }
}

/// Blue exactly between classes of adjacent vertices; no overrides.
pub fn induced_lower_coloring(g: &GnGraph) -> Result<QuotientColoring, LowerError> {
    let mut c = QuotientColoring::new(g.spec.gamma.clone());
    for (a, b, _) in g.edges() {
        for &x in g.spec.classes_of(a) {
            for &y in g.spec.classes_of(b) {
                c.set_cross(x, y, Color::Blue)?;
            }
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

impl Stage {
    fn ok(name: &'static str) -> Self {
        Stage { name, pass: true, witness: None }
    }

    fn fail(name: &'static str, witness: serde_json::Value) -> Self {
        Stage { name, pass: false, witness: Some(witness) }
    }
}

/// Outcome of the full pipeline. When `pass` holds, `gamma` does not arrow
/// `(w+n, 3)` for closed copies, so `R^cl(w+n,3) >= bound = gamma + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerReport {
    pub n: u32,
    pub ramsey_value: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramsey_source: Option<Source>,
    pub gamma: Ordinal,
    pub bound: Ordinal,
    pub vertices: usize,
    pub edges: BTreeMap<Stratum, usize>,
    pub stages: Vec<Stage>,
    pub pass: bool,
}

impl LowerReport {
    pub fn failed_stage(&self) -> Option<&Stage> {
        self.stages.iter().find(|s| !s.pass)
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

/// Relabels the witness, builds `G_n` and runs every check.
pub fn verify_lower_bound(n: u32, rec: &RamseyRecord) -> Result<LowerReport, LowerError> {
    let rec = crate::ramsey::relabel_red_prefix(rec)?;
    verify_spec(build_partition(n, &rec)?)
}

/// The pipeline on an arbitrary (possibly sabotaged) witness.
pub fn verify_unverified(n: u32, witness: WitnessGraph) -> Result<LowerReport, LowerError> {
    let witness = independent_prefix(&witness, n.saturating_sub(1)).unwrap_or(witness);
    verify_spec(build_partition_unverified(n, witness)?)
}

/// Runs partition, triangle, structure, blue-3 and red-`w+n` stages. Every
/// stage runs even after a failure so the report is complete.
pub fn verify_spec(spec: VertexClassSpec) -> Result<LowerReport, LowerError> {
    let n = spec.n;
    let mut stages = Vec::new();
    stages.push(match spec.check_partition() {
        Ok(()) => Stage::ok("partition"),
        Err(e) => Stage::fail("partition", e.into()),
    });
    let g = build_gn(spec)?;
    stages.push(match check_triangle_free(&g) {
        Ok(()) => Stage::ok("triangle-free"),
        Err(t) => Stage::fail("triangle-free", serde_json::to_value(t).expect("vertices serialize")),
    });
    let c = induced_lower_coloring(&g)?;
    stages.push(structure_stage(&c));
    stages.push(match decide_blue_closed_3(&c) {
        None => Stage::ok("blue-3"),
        Some(cert) => Stage::fail("blue-3", certificate_json(&c, &cert)),
    });
    stages.push(match decide_red_closed_omega_plus_n(&c, n as u64) {
        None => Stage::ok("red-omega-plus-n"),
        Some(cert) => Stage::fail("red-omega-plus-n", certificate_json(&c, &cert)),
    });
    let spec = g.spec();
    let gamma = spec.gamma.clone();
    let bound = &gamma + &Ordinal::one();
    let mut edges = BTreeMap::new();
    for (s, count) in [Stratum::E1, Stratum::E2, Stratum::E3, Stratum::E4].into_iter().zip(g.stratum_sizes()) {
        edges.insert(s, count);
    }
    Ok(LowerReport {
        n,
        ramsey_value: spec.ramsey_value(),
        ramsey_source: spec.source,
        gamma,
        bound,
        vertices: spec.members.len(),
        edges,
        pass: stages.iter().all(|s| s.pass),
        stages,
    })
}

/// Runs the red search with `n - 1` on the construction for `n`. It must
/// find a checked copy, otherwise the red stage proves nothing.
pub fn positive_control(n: u32, rec: &RamseyRecord) -> Result<Stage, LowerError> {
    let rec = crate::ramsey::relabel_red_prefix(rec)?;
    let g = build_gn(build_partition(n, &rec)?)?;
    let c = induced_lower_coloring(&g)?;
    let name = "red-omega-plus-n-minus-1";
    Ok(match decide_red_closed_omega_plus_n(&c, (n - 1) as u64) {
        Some(cert) => {
            let witness = certificate_json(&c, &cert);
            Stage { name, pass: witness["checked"] == true, witness: Some(witness) }
        }
        None => Stage { name, pass: false, witness: None },
    })
}

fn structure_stage(c: &QuotientColoring) -> Stage {
    if let Err(v) = c.check_omega_homogeneous() {
        return Stage::fail("structure", format!("not w-homogeneous: {v:?}").into());
    }
    if let Err(v) = c.normal_table() {
        return Stage::fail("structure", format!("not normal: {v:?}").into());
    }
    match extract_canonical_table(c) {
        Ok(_) => Stage::ok("structure"),
        Err(e) => Stage::fail("structure", e.to_string().into()),
    }
}

fn certificate_json(c: &QuotientColoring, cert: &CopyCertificate) -> serde_json::Value {
    let mut v = serde_json::to_value(cert).expect("certificate serializes");
    let checked = verify_certificate(c, cert, 4);
    v["checked"] = serde_json::Value::Bool(checked.is_ok());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::parse;
    use crate::ramsey::builtin;

    fn o(s: &str) -> Ordinal {
        parse(s).unwrap()
    }

    fn gn(n: u32) -> GnGraph {
        let rec = crate::ramsey::relabel_red_prefix(&builtin(n).unwrap()).unwrap();
        build_gn(build_partition(n, &rec).unwrap()).unwrap()
    }

    #[test]
    fn partition_for_three() {
        let g = gn(3);
        let s = g.spec();
        assert_eq!(s.gamma(), &o("w^2*3 + w*3 + 2"));
        s.check_partition().unwrap();
        assert_eq!(s.vertex_of(&o("w^2*3 + w")).unwrap(), Vertex::L(4));
        assert_eq!(s.vertex_of(&o("w^2*3 + w*3")).unwrap(), Vertex::L(6));
        assert_eq!(s.vertex_of(&o("w^2*3 + w*3 + 1")).unwrap(), Vertex::R);
        assert_eq!(s.vertex_of(&o("w^2 + w*5")).unwrap(), Vertex::B(2));
        assert_eq!(s.vertex_of(&o("0")).unwrap(), Vertex::A(1));
        assert_eq!(s.vertex_of(&o("w*4 + 2")).unwrap(), Vertex::A(1));
        assert_eq!(s.vertex_of(&o("w^2*3 + w + 5")).unwrap(), Vertex::C(5));
        assert!(s.vertex_of(&o("w^2*3 + w*3 + 2")).is_err());
        assert_eq!(gn(4).spec().classes_of(Vertex::R).len(), 2);
    }

    #[test]
    fn edge_examples() {
        let g = gn(3);
        assert_eq!(g.stratum(Vertex::B(3), Vertex::L(3)), Some(Stratum::E1));
        assert_eq!(g.stratum(Vertex::A(1), Vertex::B(3)), Some(Stratum::E1));
        assert!(!g.adjacent(Vertex::A(3), Vertex::B(1)));
        assert_eq!(g.stratum(Vertex::C(4), Vertex::L(4)), Some(Stratum::E2));
        assert!(!g.adjacent(Vertex::C(6), Vertex::L(6)));
        assert_eq!(g.stratum(Vertex::R, Vertex::A(2)), Some(Stratum::E4));
        assert!(!g.adjacent(Vertex::L(1), Vertex::L(2)));
    }

    #[test]
    fn neighborhoods() {
        for n in 3..=5 {
            let g = gn(n);
            for j in 1..=n {
                let expect: BTreeSet<Vertex> =
                    (j..=n).map(Vertex::B).chain((1..j).map(Vertex::L)).collect();
                assert_eq!(g.neighbors(Vertex::A(j), &[Stratum::E1]), expect);
                for i in 1..=n {
                    assert_eq!(g.adjacent(Vertex::L(i), Vertex::B(j)), i == j);
                }
            }
        }
    }

    #[test]
    fn triangle_free_and_injected_triangle() {
        for n in 3..=5 {
            assert_eq!(check_triangle_free(&gn(n)), Ok(()));
        }
        let w = WitnessGraph::from_edges(5, &[[2, 3], [3, 4], [2, 4]]).unwrap();
        let spec = build_partition_unverified(3, w).unwrap();
        let t = check_triangle_free(&build_gn(spec).unwrap()).unwrap_err();
        assert!(t.iter().all(|v| matches!(v, Vertex::L(_))));
    }

    #[test]
    fn coloring_examples() {
        let g = gn(3);
        let c = induced_lower_coloring(&g).unwrap();
        assert_eq!(c.color_of(&o("w"), &o("w^2")).unwrap(), Color::Blue);
        assert_eq!(c.color_of(&o("0"), &o("5")).unwrap(), Color::Red);
        assert_eq!(c.color_of(&o("w^2*3 + 1"), &o("7")).unwrap(), Color::Blue);
        assert!(c.is_normal() && c.is_omega_homogeneous());
    }

    #[test]
    fn prefix_required() {
        let w = WitnessGraph::circulant(5, &[1]).unwrap();
        let spec = build_partition_unverified(3, w).unwrap();
        assert_eq!(build_gn(spec).unwrap_err(), LowerError::PrefixNotIndependent(2));
    }

    #[test]
    fn vertex_names_round_trip() {
        for v in [Vertex::A(1), Vertex::B(12), Vertex::L(3), Vertex::C(9), Vertex::R] {
            assert_eq!(v.to_string().parse::<Vertex>().unwrap(), v);
        }
        assert!("Q_1".parse::<Vertex>().is_err());
    }
}
