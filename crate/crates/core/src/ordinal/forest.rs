//! The `<*` forest on ordinals, the sets `T(a)` and `T^{=k}(a)`, and the
//! large sets `F(theta)^r_m`.
//!
//! `b <* a` holds when `a = b + w^t` for some `t > CB(b)`. Every ordinal `x`
//! has the immediate successor `x + w^(CB(x)+1)`, so `<*` is a forest whose
//! roots do not exist: each node has exactly one parent.

use std::fmt;
use std::sync::Arc;

use super::{Ordinal, OrdinalError, Term};

type Pred = Arc<dyn Fn(&Ordinal) -> bool + Send + Sync>;
type Nth = Arc<dyn Fn(u64) -> Option<Ordinal> + Send + Sync>;
type Next = Arc<dyn Fn(Option<&Ordinal>) -> Option<Ordinal> + Send + Sync>;

#[derive(Clone)]
enum Generator {
    Nth(Nth),
    Successor(Next),
}

/// A possibly infinite set of ordinals given by a membership predicate and an
/// increasing enumeration of an initial segment.
///
/// Only the first `w` elements are reachable by enumeration; for sets of
/// larger order type the enumerator stops at that point in the sense that it
/// keeps producing the initial `w`-sequence.
#[derive(Clone)]
pub struct BoundedEnumeration {
    pred: Pred,
    generator: Generator,
}

impl BoundedEnumeration {
    /// `nth(k)` is the `k`-th member (from 0), or `None` past the end.
    pub fn from_nth(
        pred: impl Fn(&Ordinal) -> bool + Send + Sync + 'static,
        nth: impl Fn(u64) -> Option<Ordinal> + Send + Sync + 'static,
    ) -> Self {
        Self { pred: Arc::new(pred), generator: Generator::Nth(Arc::new(nth)) }
    }

    /// `next(None)` is the least member, `next(Some(x))` the least member above `x`.
    pub fn from_successor(
        pred: impl Fn(&Ordinal) -> bool + Send + Sync + 'static,
        next: impl Fn(Option<&Ordinal>) -> Option<Ordinal> + Send + Sync + 'static,
    ) -> Self {
        Self { pred: Arc::new(pred), generator: Generator::Successor(Arc::new(next)) }
    }

    pub fn empty() -> Self {
        Self::from_nth(|_| false, |_| None)
    }

    pub fn finite(mut items: Vec<Ordinal>) -> Self {
        items.sort();
        items.dedup();
        let items = Arc::new(items);
        let lookup = Arc::clone(&items);
        Self::from_nth(
            move |a| lookup.binary_search(a).is_ok(),
            move |k| usize::try_from(k).ok().and_then(|k| items.get(k).cloned()),
        )
    }

    pub fn contains(&self, a: &Ordinal) -> bool {
        (self.pred)(a)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { source: self, index: 0, last: None, done: false }
    }

    /// The first `m` members in increasing order.
    pub fn enumerate(&self, m: usize) -> Vec<Ordinal> {
        self.iter().take(m).collect()
    }

    /// Pushes every member through a strictly increasing map.
    pub fn map_monotone(
        &self,
        forward: impl Fn(&Ordinal) -> Ordinal + Send + Sync + 'static,
        backward: impl Fn(&Ordinal) -> Option<Ordinal> + Send + Sync + 'static,
    ) -> Self {
        let inner = self.clone();
        let pred_inner = self.clone();
        Self::from_nth(
            move |a| backward(a).is_some_and(|b| pred_inner.contains(&b)),
            move |k| inner.iter().nth(usize::try_from(k).ok()?).map(|x| forward(&x)),
        )
    }
}

impl fmt::Debug for BoundedEnumeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.enumerate(4)).finish_non_exhaustive()
    }
}

pub struct Iter<'a> {
    source: &'a BoundedEnumeration,
    index: u64,
    last: Option<Ordinal>,
    done: bool,
}

impl Iterator for Iter<'_> {
    type Item = Ordinal;

    fn next(&mut self) -> Option<Ordinal> {
        if self.done {
            return None;
        }
        let item = match &self.source.generator {
            Generator::Nth(nth) => nth(self.index),
            Generator::Successor(next) => next(self.last.as_ref()),
        };
        match item {
            Some(x) => {
                debug_assert!(self.last.as_ref().is_none_or(|l| l < &x), "enumeration not increasing");
                self.index += 1;
                self.last = Some(x.clone());
                Some(x)
            }
            None => {
                self.done = true;
                None
            }
        }
    }
}

/// `b <* a`: `a = b + w^t` with `t > CB(b)`.
pub fn star_less(b: &Ordinal, a: &Ordinal) -> bool {
    if b >= a {
        return false;
    }
    match b.left_subtract(a).as_ref().map(Ordinal::terms) {
        Some([Term { exponent, coefficient: 1 }]) => *exponent > b.cb_rank(),
        _ => false,
    }
}

/// The immediate `<*`-successor `x + w^(CB(x)+1)`.
pub fn star_parent(x: &Ordinal) -> Ordinal {
    x + &Ordinal::omega_pow(x.cb_rank() + 1, 1)
}

/// Least `y > x` with `CB(y) = j`.
pub fn next_with_cb(x: &Ordinal, j: u32) -> Ordinal {
    let c = x.coefficient_of(j).checked_add(1).expect("ordinal coefficient overflow");
    &x.truncate_above(j) + &Ordinal::omega_pow(j, c)
}

/// `1 + eta`: the successor for finite `eta`, `eta` itself otherwise.
pub fn one_plus(eta: &Ordinal) -> Ordinal {
    if eta.is_finite() {
        eta + &Ordinal::one()
    } else {
        eta.clone()
    }
}

/// Inverse of [`one_plus`]; `None` for zero.
pub fn one_minus(x: &Ordinal) -> Option<Ordinal> {
    match x.as_nat() {
        Some(0) => None,
        Some(k) => Some(Ordinal::nat(k - 1)),
        None => Some(x.clone()),
    }
}

/// `{b : b ◁* a}` in increasing order. Empty when `CB(a) = 0`.
///
/// For `a = d + w^e` with `e >= 1` the children are `d + w^(e-1)*k`, `k >= 1`,
/// together with `0` when `a = w` (since `0 + w^1 = w` and `CB(0) = 0`).
pub fn star_children(a: &Ordinal) -> BoundedEnumeration {
    let Some((delta, e)) = a.split_last_unit().filter(|&(_, e)| e >= 1) else {
        return BoundedEnumeration::empty();
    };
    let with_zero = u64::from(*a == Ordinal::omega());
    let parent = a.clone();
    BoundedEnumeration::from_nth(
        move |b| star_parent(b) == parent,
        move |k| {
            if k < with_zero {
                Some(Ordinal::zero())
            } else {
                Some(&delta + &Ordinal::omega_pow(e - 1, k - with_zero + 1))
            }
        },
    )
}

/// `(delta, d, zero_included)` describing `T(a) \ {a}` as
/// `{delta + xi : 0 < xi < w^d}` plus `0` when flagged.
fn t_shape(a: &Ordinal) -> (Ordinal, u32, bool) {
    match a.split_last_unit() {
        None => (Ordinal::zero(), 0, false),
        Some((delta, d)) => {
            let zero = delta.is_zero() && d >= 1;
            (delta, d, zero)
        }
    }
}

/// Membership in `T(a)`: `a`, or `delta + xi` with `0 < xi < w^d`, or the flagged `0`.
fn in_t(a: &Ordinal, x: &Ordinal, delta: &Ordinal, d: u32, zero: bool) -> bool {
    if x == a {
        return true;
    }
    if x.is_zero() {
        return zero;
    }
    delta.left_subtract(x).is_some_and(|xi| !xi.is_zero() && xi.leading_exponent() < d)
}

/// `T(a) = {b : b <* a} ∪ {a}`.
pub fn t_set(a: &Ordinal) -> BoundedEnumeration {
    let (delta, d, zero) = t_shape(a);
    let top = a.clone();
    let (pd, pdelta) = (d, delta.clone());
    let offset = u64::from(zero);
    BoundedEnumeration::from_nth(
        move |x| in_t(&top, x, &pdelta, pd, zero),
        {
            let a = a.clone();
            move |k| {
                if k < offset {
                    Some(Ordinal::zero())
                } else if d == 0 {
                    (k == offset).then(|| a.clone())
                } else {
                    Some(&delta + &Ordinal::nat(k - offset + 1))
                }
            }
        },
    )
}

/// `T^{=k}(a)`: members of `T(a)` with Cantor-Bendixson rank `k`.
pub fn t_level(a: &Ordinal, k: u32) -> BoundedEnumeration {
    let (delta, d, zero) = t_shape(a);
    if k > d {
        return BoundedEnumeration::empty();
    }
    if k == d {
        return BoundedEnumeration::finite(vec![a.clone()]);
    }
    let top = a.clone();
    let pdelta = delta.clone();
    let offset = u64::from(zero && k == 0);
    BoundedEnumeration::from_nth(
        move |x| x.cb_rank() == k && in_t(&top, x, &pdelta, d, zero),
        move |idx| {
            if idx < offset {
                Some(Ordinal::zero())
            } else {
                Some(&delta + &Ordinal::omega_pow(k, idx - offset + 1))
            }
        },
    )
}

/// Membership in `F(w^d)^r_m` for `m < d`.
fn in_f_power(d: u32, r: u64, m: u32, x: &Ordinal) -> bool {
    if x.is_zero() {
        return r == 0 && m == 0;
    }
    x.leading_exponent() < d
        && x.cb_rank() == m
        && x.l_count() > r
        && (m + 1..d).all(|e| x.coefficient_of(e) >= r)
}

/// `F(w^d)^r_m` for `m < d`, ignoring the translation to a general `theta`.
fn f_power(d: u32, r: u64, m: u32) -> BoundedEnumeration {
    let zero = u64::from(r == 0 && m == 0);
    BoundedEnumeration::from_nth(
        move |x| in_f_power(d, r, m, x),
        move |k| {
            if k < zero {
                return Some(Ordinal::zero());
            }
            // The initial w-segment fixes every higher coefficient at its minimum r.
            let b = r.checked_add(k - zero + 1)?;
            let pairs = (m + 1..d).rev().map(|e| (e, r)).chain(std::iter::once((m, b)));
            Some(Ordinal::from_pairs_unchecked(pairs))
        },
    )
}

/// `F(theta)^r_m`, defined on `w^d` by descending through children with
/// last coefficient above `r`, and on `theta = delta + w^d` by transport along
/// the order isomorphism `T(theta) -> w^d + 1`.
pub fn f_set(theta: &Ordinal, r: u64, m: u32) -> Result<BoundedEnumeration, OrdinalError> {
    let d = theta.cb_rank();
    if m > d {
        return Err(OrdinalError::LevelTooHigh { theta: theta.clone(), level: m, rank: d });
    }
    if m == d {
        return Ok(BoundedEnumeration::finite(vec![theta.clone()]));
    }
    let base = f_power(d, r, m);
    let (delta, _) = theta.split_last_unit().expect("rank at least one");
    if delta.is_zero() {
        return Ok(base);
    }
    let (fd, bd) = (delta.clone(), delta);
    let top = theta.clone();
    Ok(base.map_monotone(
        move |eta| &fd + &one_plus(eta),
        move |x| {
            if x > &top {
                return None;
            }
            let xi = bd.left_subtract(x)?;
            if xi.is_zero() || &(&bd + &xi) != x {
                return None;
            }
            one_minus(&xi)
        },
    ))
}
