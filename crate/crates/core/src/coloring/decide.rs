//! Exact searches for blue triangles and red closed copies of `w+n` in
//! quotient colorings, and checkers for the certificates they emit.
//!
//! Points touched by an override are handled one by one. Every other point
//! of a class behaves like every other, so each class contributes one
//! "generic" item whose multiplicity is bounded by how many such points exist.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::clique::WeightedGraph;
use super::{Color, ColoringError, QuotientColoring};
use crate::ordinal::{ClassSize, NodeClassId, Ordinal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    #[serde(rename = "red-omega-plus-n")]
    RedOmegaPlusN,
    #[serde(rename = "blue-3")]
    Blue3,
}

/// A homogeneous copy found by a decision procedure.
///
/// For the red kind the copy is the tail sequence of `tail_class` converging
/// to `limit_point` (minus `excluded`), the limit point, and `top_points`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyCertificate {
    pub kind: CertificateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_class: Option<NodeClassId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<Ordinal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_point: Option<Ordinal>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub top_points: Vec<Ordinal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle: Option<[Ordinal; 3]>,
}

impl CopyCertificate {
    /// The `c`-th point (from 1) of the canonical sequence of class
    /// `(CNF(p), j)` converging to `p = pi + w^e`:
    /// `pi + w^(e-1)*c + w^j`, dropping the last term when `j = e - 1`.
    pub fn tail_point(limit: &Ordinal, j: u32, c: u64) -> Ordinal {
        let (pi, e) = limit.split_last_unit().expect("limit point is nonzero");
        let step = &pi + &Ordinal::omega_pow(e - 1, c);
        if j + 1 == e {
            step
        } else {
            &step + &Ordinal::omega_pow(j, 1)
        }
    }

    fn on_tail(limit: &Ordinal, j: u32, x: &Ordinal) -> bool {
        let Some((pi, e)) = limit.split_last_unit() else {
            return false;
        };
        let Some(d) = pi.left_subtract(x) else {
            return false;
        };
        match d.terms() {
            [a] => j + 1 == e && a.exponent == e - 1,
            [a, b] => j + 1 < e && a.exponent == e - 1 && b.exponent == j && b.coefficient == 1,
            _ => false,
        }
    }

    /// First `m` tail points not listed in `excluded`.
    pub fn tail_sample(&self, m: usize) -> Vec<Ordinal> {
        let (Some(x), Some(p)) = (self.tail_class, self.limit_point.as_ref()) else {
            return Vec::new();
        };
        let excluded: BTreeSet<&Ordinal> = self.excluded.iter().collect();
        (1..)
            .map(|c| Self::tail_point(p, x.cb_level, c))
            .filter(|t| !excluded.contains(t))
            .take(m)
            .collect()
    }
}

/// Class `(i, j)` has members converging to `p` exactly when `p` lies in
/// component `i` with rank above `j`.
fn accumulates(c: &QuotientColoring, x: NodeClassId, p: &Ordinal) -> bool {
    c.classify(p).is_ok_and(|cp| cp.cnf_index == x.cnf_index && cp.cb_level > x.cb_level)
}

#[derive(Debug, Clone)]
enum Item {
    Point(Ordinal, NodeClassId),
    Generic(NodeClassId, Vec<Ordinal>),
}

fn item_color(c: &QuotientColoring, a: &Item, b: &Item) -> Color {
    match (a, b) {
        (Item::Point(x, _), Item::Point(y, _)) => c.color_of(x, y).expect("points in range"),
        (Item::Point(_, cx), Item::Generic(y, _)) | (Item::Generic(y, _), Item::Point(_, cx)) => c.base(*cx, *y),
        (Item::Generic(x, _), Item::Generic(y, _)) => c.base(*x, *y),
    }
}

/// Up to `limit` members of `id` above `after` that no override touches.
fn generic_points(
    c: &QuotientColoring,
    touched: &BTreeSet<Ordinal>,
    id: NodeClassId,
    after: Option<&Ordinal>,
    limit: u64,
) -> Vec<Ordinal> {
    let comps = c.components();
    let mut out = Vec::new();
    let mut cursor = after.cloned();
    while (out.len() as u64) < limit {
        let Some(x) = comps.next_in_class(id, cursor.as_ref()) else {
            break;
        };
        if !touched.contains(&x) {
            out.push(x.clone());
        }
        cursor = Some(x);
    }
    out
}

/// Weighted clique of `color` of weight `target` among `items`, expanded to points.
fn clique_points(c: &QuotientColoring, items: &[Item], color: Color, target: u64) -> Option<Vec<Ordinal>> {
    let caps = items
        .iter()
        .map(|it| match it {
            Item::Point(..) => 1,
            Item::Generic(id, pts) if c.within(*id) == color => pts.len() as u64,
            Item::Generic(_, pts) => (pts.len() as u64).min(1),
        })
        .collect();
    let graph = WeightedGraph::new(caps, |i, j| item_color(c, &items[i], &items[j]) == color);
    let chosen = graph.find(target)?;
    let mut points: Vec<Ordinal> = chosen
        .into_iter()
        .flat_map(|(i, m)| match &items[i] {
            Item::Point(x, _) => vec![x.clone()],
            Item::Generic(_, pts) => pts[..m as usize].to_vec(),
        })
        .collect();
    points.sort();
    Some(points)
}

/// A blue triangle, if one exists.
pub fn decide_blue_closed_3(c: &QuotientColoring) -> Option<CopyCertificate> {
    let touched = c.override_points();
    let mut items: Vec<Item> =
        touched.iter().map(|x| Item::Point(x.clone(), c.classify(x).expect("in range"))).collect();
    for id in c.class_ids() {
        let pts = generic_points(c, &touched, id, None, 3);
        if !pts.is_empty() {
            items.push(Item::Generic(id, pts));
        }
    }
    let pts = clique_points(c, &items, Color::Blue, 3)?;
    Some(CopyCertificate {
        kind: CertificateKind::Blue3,
        tail_class: None,
        excluded: Vec::new(),
        limit_point: None,
        top_points: Vec::new(),
        triangle: Some([pts[0].clone(), pts[1].clone(), pts[2].clone()]),
    })
}

/// A red closed copy of `w + n`, if one exists (`n >= 1`).
///
/// The `w`-part of any such copy visits some class infinitely often and
/// avoids override points from some stage on, so it may be replaced by a
/// canonical sequence in a single class converging to the same limit `p`.
/// A limit point untouched by overrides may be lowered to the least such
/// point of its class without losing any candidate top points.
pub fn decide_red_closed_omega_plus_n(c: &QuotientColoring, n: u64) -> Option<CopyCertificate> {
    assert!(n >= 1, "w + n needs n >= 1");
    let target = n - 1;
    let touched = c.override_points();
    let mut limits: BTreeSet<Ordinal> = touched.iter().filter(|x| x.cb_rank() >= 1).cloned().collect();
    for id in c.class_ids() {
        if id.cb_level >= 1 {
            limits.extend(generic_points(c, &touched, id, None, 1));
        }
    }
    for p in &limits {
        let cp = c.classify(p).expect("in range");
        for j in 0..cp.cb_level {
            let x = NodeClassId::new(cp.cnf_index, j);
            if c.within(x) != Color::Red || c.cross(x, cp) != Color::Red {
                continue;
            }
            let mut items = Vec::new();
            for q in touched.range(p.clone()..).filter(|q| *q != p) {
                let cq = c.classify(q).expect("in range");
                if c.color_of(p, q).expect("distinct") == Color::Red && c.base(x, cq) == Color::Red {
                    items.push(Item::Point(q.clone(), cq));
                }
            }
            for y in c.class_ids() {
                if c.base(cp, y) != Color::Red || c.base(x, y) != Color::Red {
                    continue;
                }
                let pts = generic_points(c, &touched, y, Some(p), target);
                if !pts.is_empty() {
                    items.push(Item::Generic(y, pts));
                }
            }
            if let Some(tops) = clique_points(c, &items, Color::Red, target) {
                let excluded = touched.iter().filter(|q| q < &p && c.classify(q).ok() == Some(x)).cloned().collect();
                return Some(CopyCertificate {
                    kind: CertificateKind::RedOmegaPlusN,
                    tail_class: Some(x),
                    excluded,
                    limit_point: Some(p.clone()),
                    top_points: tops,
                    triangle: None,
                });
            }
        }
    }
    None
}

fn well_formed(cert: &CopyCertificate) -> Result<(), ColoringError> {
    let bad = |m: &str| Err(ColoringError::MalformedCertificate(m.into()));
    match cert.kind {
        CertificateKind::Blue3 if cert.triangle.is_none() => bad("blue-3 certificate without a triangle"),
        CertificateKind::RedOmegaPlusN if cert.tail_class.is_none() => bad("red certificate without a tail class"),
        CertificateKind::RedOmegaPlusN if cert.limit_point.as_ref().is_none_or(Ordinal::is_zero) => {
            bad("red certificate without a nonzero limit point")
        }
        _ => Ok(()),
    }
}

fn all_pairs(c: &QuotientColoring, pts: &[Ordinal], color: Color) -> Result<(), String> {
    for (k, a) in pts.iter().enumerate() {
        for b in &pts[k + 1..] {
            match c.color_of(a, b) {
                Ok(col) if col == color => {}
                Ok(col) => return Err(format!("{{{a}, {b}}} is {col}")),
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    Ok(())
}

/// Checks a certificate, returning the first failed condition.
///
/// Tail points outside `excluded` must avoid every override; given that, the
/// sampled pairs stand for all pairs, so any `depth >= 2` is conclusive.
pub fn verify_certificate(c: &QuotientColoring, cert: &CopyCertificate, depth: usize) -> Result<(), String> {
    well_formed(cert).map_err(|e| e.to_string())?;
    if cert.kind == CertificateKind::Blue3 {
        let t = cert.triangle.as_ref().expect("well formed");
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err("triangle points are not distinct".into());
        }
        return all_pairs(c, t, Color::Blue);
    }
    let x = cert.tail_class.expect("well formed");
    let p = cert.limit_point.as_ref().expect("well formed");
    if p >= c.gamma() {
        return Err(format!("limit point {p} is not below {}", c.gamma()));
    }
    if !accumulates(c, x, p) {
        return Err(format!("class {x} does not accumulate at {p}"));
    }
    let mut prev = p;
    for t in &cert.top_points {
        if t <= prev {
            return Err(format!("top point {t} is not above {prev}"));
        }
        if t >= c.gamma() {
            return Err(format!("top point {t} is not below {}", c.gamma()));
        }
        prev = t;
    }
    let excluded: BTreeSet<&Ordinal> = cert.excluded.iter().collect();
    for q in c.override_points() {
        if q < *p && CopyCertificate::on_tail(p, x.cb_level, &q) && !excluded.contains(&q) {
            return Err(format!("tail point {q} is touched by an override but not excluded"));
        }
    }
    let mut pts = cert.tail_sample(depth.max(2));
    pts.push(p.clone());
    pts.extend(cert.top_points.iter().cloned());
    all_pairs(c, &pts, Color::Red)
}

/// `verify_certificate` as a boolean; malformed certificates are errors.
pub fn check_certificate(c: &QuotientColoring, cert: &CopyCertificate, depth: usize) -> Result<bool, ColoringError> {
    well_formed(cert)?;
    Ok(verify_certificate(c, cert, depth).is_ok())
}

/// An infinite blue set (every such set is a closed copy of `w`): the
/// generic points of an infinite class whose within color is blue.
pub fn blue_closed_omega(c: &QuotientColoring) -> Option<(NodeClassId, Vec<Ordinal>)> {
    let touched = c.override_points();
    c.class_ids()
        .into_iter()
        .find(|&id| c.within(id) == Color::Blue && c.class_size(id) == ClassSize::Infinite)
        .map(|id| (id, generic_points(c, &touched, id, None, 3)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum OmegaSquaredOutcome {
    /// `c^(1,1,0) = 1`.
    CaseA,
    /// Blue pairs toward every `W_i` from cofinally many rank-one points.
    CaseB,
    /// The coloring has a red closed copy of `w+n`.
    RedOmegaPlusN { certificate: CopyCertificate },
    /// The coloring has a blue closed copy of `w`.
    BlueOmega { class: NodeClassId, sample: Vec<Ordinal> },
}

/// Decides which alternative of the two-level dichotomy holds for a normal
/// omega-homogeneous coloring of `w^2`, after checking its hypotheses.
pub fn check_omega_squared_levels(c: &QuotientColoring, n: u64) -> Result<OmegaSquaredOutcome, ColoringError> {
    let w2 = Ordinal::omega_pow(2, 1);
    if c.gamma() != &w2 {
        return Err(ColoringError::WrongGamma { expected: w2, got: c.gamma().clone() });
    }
    let table = c.normal_table().map_err(|v| ColoringError::NotNormal(format!("{{{}, {}}}", v.lower, v.upper)))?;
    c.check_omega_homogeneous()
        .map_err(|v| ColoringError::NotOmegaHomogeneous(format!("{{{}, {}}}", v.a, v.b)))?;
    if let Some(certificate) = decide_red_closed_omega_plus_n(c, n) {
        return Ok(OmegaSquaredOutcome::RedOmegaPlusN { certificate });
    }
    if let Some((class, sample)) = blue_closed_omega(c) {
        return Ok(OmegaSquaredOutcome::BlueOmega { class, sample });
    }
    let a0 = NodeClassId::new(1, 0);
    let a1 = NodeClassId::new(1, 1);
    if table.get(1, 1, 0) == Some(Color::Blue) {
        return Ok(OmegaSquaredOutcome::CaseA);
    }
    // W_i lies in (1,0) and only finitely many of its points carry overrides,
    // so a rank-one point sees cofinally many blue pairs in W_i exactly when
    // the cross color of the two classes is blue.
    if c.cross(a0, a1) == Color::Blue {
        return Ok(OmegaSquaredOutcome::CaseB);
    }
    Err(ColoringError::LemmaContradicted(
        "c^(1,1,0) = 0 and the eventual color from (1,1) into W_i is red".into(),
    ))
}
