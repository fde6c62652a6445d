//! Strategies and oracle checks shared by the property suites.
//! Each `check_*` returns `Err(description)` on the first disagreement.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;

use orw_core::coloring::{
    decide_blue_closed_3, induced_coloring, skeleton_extract, verify_certificate, Color, QuotientColoring,
};
use orw_core::lower::{build_gn, build_partition, induced_lower_coloring};
use orw_core::ordinal::{f_set, parse, Ordinal};
use orw_core::ramsey::{builtin, relabel_red_prefix};
use orw_core::upper::{
    assignment_from_coloring, check_proof, instantiate_clauses, solve, truth_table_sat, Heuristic, Lit, Outcome,
    SolverConfig,
};

/// `w^3*a + w^2*b + w*c + d`.
pub fn ord(a: u64, b: u64, c: u64, d: u64) -> Ordinal {
    [(3, a), (2, b), (1, c), (0, d)]
        .into_iter()
        .fold(Ordinal::zero(), |acc, (e, k)| &acc + &Ordinal::omega_pow(e, k))
}

/// Ordinals below `w^3*5`.
pub fn small_ordinal() -> impl Strategy<Value = Ordinal> {
    (0u64..5, 0u64..12, 0u64..12, 0u64..12).prop_map(|(a, b, c, d)| ord(a, b, c, d))
}

pub fn check_ordinal_laws(a: &Ordinal, b: &Ordinal, c: &Ordinal) -> Result<(), String> {
    let zero = Ordinal::zero();
    let ab = a + b;
    if &ab + c != a + &(b + c) {
        return Err(format!("({a} + {b}) + {c} differs from {a} + ({b} + {c})"));
    }
    if &(a + &zero) != a || &(&zero + a) != a {
        return Err(format!("zero is not neutral for {a}"));
    }
    if a.left_subtract(&ab).as_ref() != Some(b) {
        return Err(format!("-{a} + ({a} + {b}) is not {b}"));
    }
    if b < c && a + b >= a + c {
        return Err(format!("{a} + _ not strictly increasing at {b} < {c}"));
    }
    if &ab < a || &ab < b {
        return Err(format!("{a} + {b} below a summand"));
    }
    if parse(&a.to_string()).as_ref() != Ok(a) {
        return Err(format!("{a} does not survive display and parse"));
    }
    let rank = if b.is_zero() { a.cb_rank() } else { b.cb_rank() };
    if !ab.is_zero() && ab.cb_rank() != rank {
        return Err(format!("CB({a} + {b}) = {}, expected {rank}", ab.cb_rank()));
    }
    Ok(())
}

/// `L(x)`, with `L(0) = 1`.
fn last_coefficient(x: &Ordinal) -> u64 {
    x.terms().last().map_or(1, |t| t.coefficient)
}

/// `beta` is an immediate child of `alpha` if `alpha = beta + w^(CB(beta)+1)`.
fn is_child(beta: &Ordinal, alpha: &Ordinal) -> bool {
    &(beta + &Ordinal::omega_pow(beta.cb_rank() + 1, 1)) == alpha
}

const WINDOW_A: u64 = 12;
const WINDOW_B: u64 = 30;

/// `F(w^2)^r_m` computed by the defining recursion over `{w*a + b}`, kept to `a < WINDOW_A`.
fn f_brute(r: u64, m: u32) -> BTreeSet<Ordinal> {
    let universe: Vec<Ordinal> =
        (0..=WINDOW_A).flat_map(|a| (0..=WINDOW_B).map(move |b| ord(0, 0, a, b))).collect();
    let mut out = BTreeSet::new();
    let mut stack = vec![Ordinal::omega_pow(2, 1)];
    while let Some(alpha) = stack.pop() {
        if alpha.cb_rank() == m {
            out.insert(alpha);
            continue;
        }
        stack.extend(universe.iter().filter(|b| is_child(b, &alpha) && last_coefficient(b) > r).cloned());
    }
    out.retain(in_window);
    out
}

fn in_window(x: &Ordinal) -> bool {
    x == &Ordinal::omega_pow(2, 1) || x.coefficient_of(2) == 0 && x.coefficient_of(1) < WINDOW_A && x.coefficient_of(0) < WINDOW_B
}

/// Compares membership on the window and the first enumerated elements.
pub fn check_f_set(r: u64, m: u32) -> Result<(), String> {
    let brute = f_brute(r, m);
    let theta = Ordinal::omega_pow(2, 1);
    let f = f_set(&theta, r, m).map_err(|e| e.to_string())?;
    for a in 0..WINDOW_A {
        for b in 0..WINDOW_B {
            let x = ord(0, 0, a, b);
            if f.contains(&x) != brute.contains(&x) {
                return Err(format!("F(w^2)^{r}_{m} disagrees at {x}"));
            }
        }
    }
    if f.contains(&theta) != brute.contains(&theta) {
        return Err(format!("F(w^2)^{r}_{m} disagrees at w^2"));
    }
    let prefix: Vec<Ordinal> = f.enumerate(10).into_iter().take_while(in_window).collect();
    let expected: Vec<Ordinal> = brute.iter().take(prefix.len()).cloned().collect();
    if prefix != expected {
        let show = |v: &[Ordinal]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        return Err(format!("F(w^2)^{r}_{m} prefix [{}] vs brute force [{}]", show(&prefix), show(&expected)));
    }
    if prefix.is_empty() {
        return Err(format!("F(w^2)^{r}_{m} enumerated nothing"));
    }
    Ok(())
}

pub const SHAPES: [&str; 6] = ["w + 3", "w^2 + 1", "w^2 + w + 2", "w^2*2 + 1", "w^2*2 + w + 1", "w*3 + 2"];

/// Raw material for a random coloring; `build_coloring` turns it into one.
#[derive(Debug, Clone)]
pub struct ColoringSeed {
    pub gamma: Ordinal,
    pub colors: Vec<bool>,
    pub overrides: Vec<(usize, usize, bool)>,
}

pub fn coloring_seed(shapes: &'static [&'static str], blue_weight: f64) -> impl Strategy<Value = ColoringSeed> {
    (
        0..shapes.len(),
        prop::collection::vec(prop::bool::weighted(blue_weight), 64),
        prop::collection::vec((0usize..64, 0usize..64, any::<bool>()), 0..5),
    )
        .prop_map(move |(s, colors, overrides)| ColoringSeed { gamma: parse(shapes[s]).unwrap(), colors, overrides })
}

fn color(b: bool) -> Color {
    if b {
        Color::Blue
    } else {
        Color::Red
    }
}

/// Points below `gamma` with every coefficient at most `max`.
pub fn grid(gamma: &Ordinal, max: u64) -> Vec<Ordinal> {
    let mut out = Vec::new();
    for a in 0..=max {
        for b in 0..=max {
            for c in 0..=max {
                let x = ord(0, a, b, c);
                if &x < gamma {
                    out.push(x);
                }
            }
        }
    }
    out.sort();
    out
}

pub fn build_coloring(seed: &ColoringSeed) -> QuotientColoring {
    let mut c = QuotientColoring::new(seed.gamma.clone());
    let ids: Vec<_> = c.class_ids().into_iter().filter(|&id| !c.class_size(id).is_empty()).collect();
    let mut bits = seed.colors.iter().cycle();
    for &id in &ids {
        c.set_within(id, color(*bits.next().unwrap())).unwrap();
    }
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            c.set_cross(a, b, color(*bits.next().unwrap())).unwrap();
        }
    }
    let pool = grid(&seed.gamma, 2);
    for &(x, y, blue) in &seed.overrides {
        let (x, y) = (&pool[x % pool.len()], &pool[y % pool.len()]);
        if x != y {
            c.set_override(x.clone(), y.clone(), color(blue)).unwrap();
        }
    }
    c
}

/// Up to three points per class that no override touches, plus every overridden point.
/// Any blue triangle can be moved onto these points class by class.
pub fn representative_sample(c: &QuotientColoring) -> Vec<Ordinal> {
    let special = c.override_points();
    let mut per_class = std::collections::BTreeMap::new();
    let mut out: Vec<Ordinal> = special.iter().cloned().collect();
    for x in grid(c.gamma(), 6) {
        if special.contains(&x) {
            continue;
        }
        let n = per_class.entry(c.classify(&x).unwrap()).or_insert(0);
        if *n < 3 {
            *n += 1;
            out.push(x);
        }
    }
    out.sort();
    out
}

pub fn sampled_blue_triangle(c: &QuotientColoring) -> Option<[Ordinal; 3]> {
    let pts = representative_sample(c);
    let blue = |x: &Ordinal, y: &Ordinal| c.color_of(x, y).unwrap() == Color::Blue;
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate().skip(i + 1) {
            if !blue(x, y) {
                continue;
            }
            for z in &pts[j + 1..] {
                if blue(x, z) && blue(y, z) {
                    return Some([x.clone(), y.clone(), z.clone()]);
                }
            }
        }
    }
    None
}

pub fn check_blue3(c: &QuotientColoring) -> Result<(), String> {
    let decided = decide_blue_closed_3(c);
    let sampled = sampled_blue_triangle(c);
    match (&decided, &sampled) {
        (Some(cert), Some(_)) => verify_certificate(c, cert, 4).map_err(|e| format!("certificate rejected: {e}")),
        (None, None) => Ok(()),
        (Some(cert), None) => Err(format!("decision found {:?}, oracle found nothing", cert.triangle)),
        (None, Some(t)) => Err(format!("oracle found {} {} {}, decision found nothing", t[0], t[1], t[2])),
    }
}

/// The induced coloring is w-homogeneous and agrees with the original through the skeleton.
pub fn check_skeleton(c: &QuotientColoring) -> Result<(), String> {
    let sk = skeleton_extract(c);
    let ci = induced_coloring(c, &sk).map_err(|e| e.to_string())?;
    if !ci.is_omega_homogeneous() {
        return Err("induced coloring is not w-homogeneous".into());
    }
    let pts = grid(c.gamma(), 3);
    let img: Vec<Ordinal> = pts.iter().map(|x| sk.apply(x).unwrap()).collect();
    if img.windows(2).any(|w| w[0] >= w[1]) {
        return Err("skeleton map is not increasing".into());
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let here = ci.color_of(&pts[i], &pts[j]).unwrap();
            let there = c.color_of(&img[i], &img[j]).unwrap();
            if here != there {
                return Err(format!("pair {} {} induces {here:?}, image has {there:?}", pts[i], pts[j]));
            }
        }
    }
    Ok(())
}

pub fn cnf_system() -> impl Strategy<Value = (usize, Vec<Vec<Lit>>)> {
    (1usize..=20).prop_flat_map(|nvars| {
        let lit = (0..nvars as u32, any::<bool>()).prop_map(|(v, p)| Lit::new(v, p));
        (Just(nvars), prop::collection::vec(prop::collection::vec(lit, 1..=3), 1..=5 * nvars))
    })
}

pub fn check_solver(nvars: usize, cnf: &[Vec<Lit>]) -> Result<(), String> {
    let truth = truth_table_sat(nvars, cnf);
    for heuristic in [Heuristic::Fixed, Heuristic::Vsids] {
        let (outcome, _) = solve(nvars, cnf, SolverConfig { budget: 1_000_000, heuristic }, None);
        match (&outcome, &truth) {
            (Outcome::Sat(m), Some(_)) => {
                if let Some(i) = cnf.iter().position(|cl| !cl.iter().any(|l| l.eval(m))) {
                    return Err(format!("{heuristic:?}: model violates clause {i}"));
                }
            }
            (Outcome::Unsat(p), None) => {
                check_proof(cnf, p, |_, _| false).map_err(|e| format!("{heuristic:?}: proof rejected: {e}"))?;
            }
            _ => return Err(format!("{heuristic:?}: {outcome:?} but truth table says sat = {}", truth.is_some())),
        }
    }
    Ok(())
}

/// Every catalogue clause at n = 3, K = 3 holds on the tables of the lower-bound coloring for n = 3.
pub fn check_g3_bridge() -> Result<(), String> {
    let rec = relabel_red_prefix(&builtin(3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let g = build_gn(build_partition(3, &rec).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let c = induced_lower_coloring(&g).map_err(|e| e.to_string())?;
    let sys = instantiate_clauses(3, 3).map_err(|e| e.to_string())?;
    let model = assignment_from_coloring(&sys.space, &c)?;
    match sys.first_violated(&model) {
        None => Ok(()),
        Some(i) => Err(format!("violated: {}", sys.display_clause(i))),
    }
}
