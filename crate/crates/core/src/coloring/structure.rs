//! Structural properties of quotient colorings: omega-homogeneity, normality,
//! canonical tables, and skeletons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Color, ColoringError, QuotientColoring};
use crate::ordinal::{
    one_minus, star_less, star_parent, BoundedEnumeration, Components, NodeClassId, Ordinal,
};

/// Two children of `parent` whose color differs from the other children's.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityViolation {
    pub parent: Ordinal,
    pub a: Ordinal,
    pub b: Ordinal,
    pub color: Color,
    pub expected: Color,
}

/// A `<*`-related pair whose color disagrees with its class-level value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalViolation {
    pub lower: Ordinal,
    pub upper: Ordinal,
    pub color: Color,
    pub expected: Color,
}

/// `c^(i, e, j)`: color of `b1 <* b2` with `CNF(b2) = i`, `CB(b2) = e`, `CB(b1) = j`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalTable {
    entries: BTreeMap<(u64, u32, u32), Color>,
}

impl NormalTable {
    pub fn get(&self, cnf_index: u64, upper_cb: u32, lower_cb: u32) -> Option<Color> {
        self.entries.get(&(cnf_index, upper_cb, lower_cb)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u64, u32, u32), Color)> + '_ {
        self.entries.iter().map(|(&k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `c~(i, j; k, l)` for nonempty classes `(i, j)` and `(k, l)` with `k != i`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CanonicalTable {
    entries: BTreeMap<(NodeClassId, NodeClassId), Color>,
}

impl CanonicalTable {
    pub fn get(&self, i: u64, j: u32, k: u64, l: u32) -> Option<Color> {
        self.entries.get(&(NodeClassId::new(i, j), NodeClassId::new(k, l))).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((NodeClassId, NodeClassId), Color)> + '_ {
        self.entries.iter().map(|(&k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl QuotientColoring {
    /// Children of a node `a < gamma` all lie in the class `(CNF(a), CB(a) - 1)`,
    /// so only overrides between siblings can break homogeneity.
    pub fn check_omega_homogeneous(&self) -> Result<(), HomogeneityViolation> {
        for (a, b, color) in self.overrides() {
            let parent = star_parent(a);
            if parent != star_parent(b) || &parent >= self.gamma() {
                continue;
            }
            let expected = self.within(self.classify(a).expect("override in range"));
            if color != expected {
                return Err(HomogeneityViolation { parent, a: a.clone(), b: b.clone(), color, expected });
            }
        }
        Ok(())
    }

    pub fn is_omega_homogeneous(&self) -> bool {
        self.check_omega_homogeneous().is_ok()
    }

    /// Extracts `c^` when every `<*`-related pair is colored by its classes.
    ///
    /// If `b1 <* b2 < gamma` then `b1` lies in component `CNF(b2)` at a lower
    /// level, so `c^(i, e, j) = cross((i, j), (i, e))`.
    pub fn normal_table(&self) -> Result<NormalTable, NormalViolation> {
        for (a, b, color) in self.overrides() {
            if star_less(a, b) {
                let expected = self.base(self.classify(a).expect("in range"), self.classify(b).expect("in range"));
                if color != expected {
                    return Err(NormalViolation { lower: a.clone(), upper: b.clone(), color, expected });
                }
            }
        }
        let mut entries = BTreeMap::new();
        for id in self.components().class_ids() {
            if id.cb_level == 0 || self.class_size(id).is_empty() {
                continue;
            }
            for j in 0..id.cb_level {
                let lower = NodeClassId::new(id.cnf_index, j);
                entries.insert((id.cnf_index, id.cb_level, j), self.cross(lower, id));
            }
        }
        Ok(NormalTable { entries })
    }

    pub fn is_normal(&self) -> bool {
        self.normal_table().is_ok()
    }
}

/// `c~` of a normal omega-homogeneous quotient coloring.
///
/// Beyond the finitely many override points, `F(S_k)^r_l` lies inside the
/// class `(k, l)`, so the eventual color toward it is the cross color.
pub fn extract_canonical_table(c: &QuotientColoring) -> Result<CanonicalTable, ColoringError> {
    c.normal_table().map_err(|v| {
        ColoringError::NotNormal(format!("{{{}, {}}} is {} but its levels give {}", v.lower, v.upper, v.color, v.expected))
    })?;
    c.check_omega_homogeneous().map_err(|v| {
        ColoringError::NotOmegaHomogeneous(format!(
            "children {} and {} of {} are {} instead of {}",
            v.a, v.b, v.parent, v.color, v.expected
        ))
    })?;
    let live: Vec<NodeClassId> = c.class_ids().into_iter().filter(|&id| !c.class_size(id).is_empty()).collect();
    let mut entries = BTreeMap::new();
    for &x in &live {
        for &y in &live {
            if x.cnf_index != y.cnf_index {
                entries.insert((x, y), c.cross(x, y));
            }
        }
    }
    Ok(CanonicalTable { entries })
}

/// An order-homeomorphism `f` of `gamma` onto a skeleton.
///
/// Component tops are fixed. A non-top point `S_{i-1} + xi` of a component
/// with exponent `b` is sent to `S_{i-1} + xi'`, where `xi'` adds `shift` to
/// every coefficient of `xi` from exponent `CB(xi)` up to `b - 1`, zero
/// coefficients included.
#[derive(Debug, Clone)]
pub struct SkeletonMap {
    components: Components,
    shift: u64,
}

impl SkeletonMap {
    pub fn new(gamma: &Ordinal, shift: u64) -> Self {
        Self { components: Components::new(gamma), shift }
    }

    pub fn gamma(&self) -> &Ordinal {
        self.components.gamma()
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    fn split(&self, x: &Ordinal) -> Result<(u64, Ordinal, Ordinal), ColoringError> {
        let i = self.components.classify(x)?.cnf_index;
        let lo = self.components.partial_sum(i - 1);
        let xi = lo.left_subtract(x).expect("component lies above its base");
        Ok((i, lo, xi))
    }

    pub fn apply(&self, x: &Ordinal) -> Result<Ordinal, ColoringError> {
        let (i, lo, xi) = self.split(x)?;
        if *x == self.components.partial_sum(i) {
            return Ok(x.clone());
        }
        let b = self.components.exponent(i).expect("valid component");
        let e0 = xi.cb_rank();
        let pairs = (e0..b).rev().map(|e| (e, xi.coefficient_of(e) + self.shift));
        Ok(&lo + &Ordinal::from_pairs_unchecked(pairs))
    }

    /// `f^{-1}(y)` when `y` lies in the skeleton.
    pub fn preimage(&self, y: &Ordinal) -> Option<Ordinal> {
        let (i, lo, xi) = self.split(y).ok()?;
        if *y == self.components.partial_sum(i) {
            return Some(y.clone());
        }
        let b = self.components.exponent(i).expect("valid component");
        let e0 = xi.cb_rank();
        let mut pairs = Vec::new();
        for e in (e0..b).rev() {
            pairs.push((e, xi.coefficient_of(e).checked_sub(self.shift)?));
        }
        let x = &lo + &Ordinal::from_pairs_unchecked(pairs);
        (self.apply(&x).ok()? == *y).then_some(x)
    }

    /// The skeleton `f[gamma]`, enumerated along the initial `w`-segment of `gamma`.
    pub fn image(&self) -> BoundedEnumeration {
        let gamma = self.gamma().clone();
        let domain = BoundedEnumeration::from_nth(
            {
                let gamma = gamma.clone();
                move |x| x < &gamma
            },
            move |k| {
                let x = Ordinal::nat(k);
                (x < gamma).then_some(x)
            },
        );
        let (fwd, back) = (self.clone(), self.clone());
        domain.map_monotone(move |x| fwd.apply(x).expect("in range"), move |y| back.preimage(y))
    }
}

/// A skeleton avoiding every non-top override point.
///
/// Each image point has a coefficient of at least `shift` at the exponent just
/// below its component's, while every override point has smaller coefficients.
pub fn skeleton_extract(c: &QuotientColoring) -> SkeletonMap {
    let max = c
        .override_points()
        .iter()
        .flat_map(|p| p.terms().iter().map(|t| t.coefficient).collect::<Vec<_>>())
        .max()
        .unwrap_or(0);
    SkeletonMap::new(c.gamma(), max + 1)
}

/// `c_I({a, b}) = c({f(a), f(b)})`, again a quotient coloring because `f`
/// preserves classes.
pub fn induced_coloring(c: &QuotientColoring, skeleton: &SkeletonMap) -> Result<QuotientColoring, ColoringError> {
    if skeleton.gamma() != c.gamma() {
        return Err(ColoringError::WrongGamma { expected: c.gamma().clone(), got: skeleton.gamma().clone() });
    }
    let mut out = c.clone();
    out.overrides.clear();
    for (a, b, color) in c.overrides() {
        if let (Some(pa), Some(pb)) = (skeleton.preimage(a), skeleton.preimage(b)) {
            out.set_override(pa, pb, color)?;
        }
    }
    Ok(out)
}

/// The coloring of `w^b` carried by the non-top part of component `i`, which
/// is `{x : x <* S_i}` and is identified with `w^b` by its order isomorphism.
pub fn restrict_to_component(c: &QuotientColoring, i: u64) -> Result<QuotientColoring, ColoringError> {
    let comps = c.components();
    let b = comps
        .exponent(i)
        .ok_or_else(|| ColoringError::InvalidClass { gamma: c.gamma().clone(), id: NodeClassId::new(i, 0) })?;
    let lo = comps.partial_sum(i - 1);
    let top = comps.partial_sum(i);
    let rho = |x: &Ordinal| -> Option<Ordinal> {
        if comps.classify(x).ok()?.cnf_index != i || *x == top {
            return None;
        }
        if lo.is_zero() {
            Some(x.clone())
        } else {
            one_minus(&lo.left_subtract(x)?)
        }
    };
    let mut out = QuotientColoring::new(Ordinal::omega_pow(b, 1));
    for j in 0..b {
        out.set_within(NodeClassId::new(1, j), c.within(NodeClassId::new(i, j)))?;
        for k in j + 1..b {
            out.set_cross(NodeClassId::new(1, j), NodeClassId::new(1, k), c.cross(NodeClassId::new(i, j), NodeClassId::new(i, k)))?;
        }
    }
    for (x, y, color) in c.overrides() {
        if let (Some(rx), Some(ry)) = (rho(x), rho(y)) {
            out.set_override(rx, ry, color)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::star_children;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn id(i: u64, j: u32) -> NodeClassId {
        NodeClassId::new(i, j)
    }

    #[test]
    fn omega_homogeneity() {
        let mut c = QuotientColoring::new(o("w*2"));
        c.set_cross(id(1, 0), id(2, 0), Color::Blue).unwrap();
        assert!(c.is_omega_homogeneous());
        // Siblings under w^2*... : children of w*2 are w + k, but w*2 = gamma is not a node.
        c.set_override(o("w + 1"), o("w + 2"), Color::Blue).unwrap();
        assert!(c.is_omega_homogeneous());
        c.set_override(o("1"), o("3"), Color::Blue).unwrap();
        let v = c.check_omega_homogeneous().unwrap_err();
        assert_eq!(v.parent, o("w"));
        assert_eq!((v.color, v.expected), (Color::Blue, Color::Red));
    }

    #[test]
    fn normal_tables() {
        let c = QuotientColoring::new(o("w^2*2 + 1"));
        let t = c.normal_table().unwrap();
        assert!(t.iter().all(|(_, col)| col == Color::Red));
        assert_eq!(t.len(), 6);
        let mut c = c;
        c.set_override(o("w*3"), o("w*3 + w"), Color::Blue).unwrap();
        assert!(c.normal_table().is_ok(), "w*3 is not <* w*4");
        c.set_override(o("w*3 + 2"), o("w*4"), Color::Blue).unwrap();
        let v = c.normal_table().unwrap_err();
        assert_eq!(v.upper, o("w*4"));
    }

    #[test]
    fn canonical_table_needs_preconditions() {
        let mut c = QuotientColoring::new(o("w^2 + w + 1"));
        c.set_cross(id(1, 1), id(2, 0), Color::Blue).unwrap();
        let t = extract_canonical_table(&c).unwrap();
        assert_eq!(t.get(1, 1, 2, 0), Some(Color::Blue));
        assert_eq!(t.get(2, 0, 1, 1), Some(Color::Blue));
        assert_eq!(t.get(1, 0, 2, 1), Some(Color::Red));
        assert_eq!(t.get(1, 0, 3, 0), None, "the final class is empty");
        c.set_override(o("1"), o("2"), Color::Blue).unwrap();
        assert!(matches!(extract_canonical_table(&c), Err(ColoringError::NotOmegaHomogeneous(_))));
    }

    #[test]
    fn skeleton_map_shape() {
        let g = o("w^2*2 + 1");
        let s = SkeletonMap::new(&g, 3);
        assert_eq!(s.apply(&o("0")).unwrap(), o("w*3 + 3"));
        assert_eq!(s.apply(&o("5")).unwrap(), o("w*3 + 8"));
        assert_eq!(s.apply(&o("w*2")).unwrap(), o("w*5"));
        assert_eq!(s.apply(&o("w^2")).unwrap(), o("w^2"));
        assert_eq!(s.apply(&o("w^2 + 1")).unwrap(), o("w^2 + w*3 + 4"));
        assert_eq!(s.apply(&o("w^2*2")).unwrap(), o("w^2*2"));
        assert_eq!(s.preimage(&o("w*3 + 8")), Some(o("5")));
        assert_eq!(s.preimage(&o("w*3 + 2")), None);
        assert_eq!(s.preimage(&o("w*2 + 5")), None);
        assert_eq!(s.preimage(&o("w")), None);
        assert_eq!(s.image().enumerate(2), vec![o("w*3 + 3"), o("w*3 + 4")]);
    }

    #[test]
    fn skeleton_preserves_order_and_star() {
        let g = o("w^3 + w^2*2 + w + 2");
        let s = SkeletonMap::new(&g, 2);
        let mut pts = vec![Ordinal::zero()];
        for a in 0..3u64 {
            for b in 0..3u64 {
                for c in 0..3u64 {
                    pts.push(Ordinal::from_pairs_unchecked([(2, a), (1, b), (0, c)]));
                    pts.push(&o("w^3") + &Ordinal::from_pairs_unchecked([(2, a), (1, b), (0, c)]));
                }
            }
        }
        pts.extend(["w^3 + w^2", "w^3 + w^2 + w*2", "w^3 + w^2*2", "w^3 + w^2*2 + 3", "w^3 + w^2*2 + w", "w^3 + w^2*2 + w + 1"].map(o));
        pts.sort();
        pts.dedup();
        pts.retain(|p| p < &g);
        for x in &pts {
            let fx = s.apply(x).unwrap();
            assert_eq!(s.preimage(&fx).as_ref(), Some(x));
            assert_eq!(s.components.classify(&fx).unwrap(), s.components.classify(x).unwrap());
            for y in &pts {
                let fy = s.apply(y).unwrap();
                assert_eq!(x < y, fx < fy, "{x} {y}");
                assert_eq!(star_less(x, y), star_less(&fx, &fy), "{x} <* {y}");
            }
        }
    }

    #[test]
    fn skeleton_avoids_overridden_children() {
        let mut c = QuotientColoring::new(o("w^2 + 1"));
        for (a, b) in [("w", "w*2"), ("w*2", "w*5"), ("w*3", "w*4")] {
            c.set_override(o(a), o(b), Color::Blue).unwrap();
        }
        assert!(!c.is_omega_homogeneous());
        let s = skeleton_extract(&c);
        let image_children: Vec<Ordinal> =
            star_children(&o("w^2")).enumerate(10).iter().map(|x| s.apply(x).unwrap()).collect();
        for p in c.override_points() {
            assert!(!image_children.contains(&p));
        }
        let induced = induced_coloring(&c, &s).unwrap();
        assert!(induced.is_omega_homogeneous());
        for x in ["3", "w + 2", "w*4"].map(o) {
            for y in ["5", "w*2 + 1", "w^2"].map(o) {
                assert_eq!(
                    induced.color_of(&x, &y).unwrap(),
                    c.color_of(&s.apply(&x).unwrap(), &s.apply(&y).unwrap()).unwrap()
                );
            }
        }
    }

    #[test]
    fn restriction_to_a_component() {
        let mut c = QuotientColoring::new(o("w^2*2 + 1"));
        c.set_cross(id(2, 0), id(2, 1), Color::Blue).unwrap();
        c.set_within(id(2, 1), Color::Blue).unwrap();
        c.set_override(o("w^2 + 1"), o("w^2 + w"), Color::Red).unwrap();
        c.set_override(o("w^2 + 1"), o("w^2*2"), Color::Blue).unwrap();
        let r = restrict_to_component(&c, 2).unwrap();
        assert_eq!(r.gamma(), &o("w^2"));
        assert_eq!(r.cross(id(1, 0), id(1, 1)), Color::Blue);
        assert_eq!(r.within(id(1, 1)), Color::Blue);
        assert_eq!(r.color_of(&o("0"), &o("w")).unwrap(), Color::Red);
        assert_eq!(r.overrides().count(), 1);
    }
}
