//! Independent replay of a resolution refutation produced by the solver.

use std::collections::BTreeSet;

use super::sat::{Lit, Proof, ProofStep};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("step {step}: clause id {id} is not yet defined")]
    UnknownClause { step: usize, id: usize },
    #[error("step {step}: pivot {pivot} does not clash between the two clauses")]
    BadPivot { step: usize, pivot: u32 },
    #[error("step {step}: resolvent is a tautology")]
    Tautology { step: usize },
    #[error("step {step}: derived clause differs from the claimed one")]
    WrongResult { step: usize },
    #[error("step {step}: lazy clause tagged {tag} was rejected")]
    BadLazy { step: usize, tag: String },
    #[error("input count {claimed} does not match {actual} clauses")]
    InputCount { claimed: usize, actual: usize },
    #[error("the proof does not end with the empty clause")]
    NoEmptyClause,
}

/// Checked proof summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProofCheck {
    pub derived: usize,
    pub resolutions: usize,
}

/// Replays every resolution in `proof` against `inputs`. Lazy clauses must
/// be accepted by `lazy_ok(clause, tag)`.
pub fn check_proof(
    inputs: &[Vec<Lit>],
    proof: &Proof,
    lazy_ok: impl Fn(&[Lit], &str) -> bool,
) -> Result<ProofCheck, ProofError> {
    if proof.inputs != inputs.len() {
        return Err(ProofError::InputCount { claimed: proof.inputs, actual: inputs.len() });
    }
    let mut db: Vec<BTreeSet<Lit>> = inputs.iter().map(|c| c.iter().copied().collect()).collect();
    let mut derived = 0;
    let mut resolutions = 0;
    let mut last_empty = false;
    for (step, s) in proof.steps.iter().enumerate() {
        match s {
            ProofStep::Lazy { clause, tag } => {
                if !lazy_ok(clause, tag) {
                    return Err(ProofError::BadLazy { step, tag: tag.clone() });
                }
                db.push(clause.iter().copied().collect());
                last_empty = clause.is_empty();
            }
            ProofStep::Derived(d) => {
                let mut cur = db.get(d.start).cloned().ok_or(ProofError::UnknownClause { step, id: d.start })?;
                for &(pivot, id) in &d.steps {
                    let other = db.get(id).ok_or(ProofError::UnknownClause { step, id })?;
                    let (p, n) = (Lit::pos(pivot), Lit::neg(pivot));
                    let (mine, theirs) = if cur.contains(&p) && other.contains(&n) {
                        (p, n)
                    } else if cur.contains(&n) && other.contains(&p) {
                        (n, p)
                    } else {
                        return Err(ProofError::BadPivot { step, pivot });
                    };
                    cur.remove(&mine);
                    for &l in other {
                        if l != theirs {
                            if cur.contains(&l.negate()) {
                                return Err(ProofError::Tautology { step });
                            }
                            cur.insert(l);
                        }
                    }
                    resolutions += 1;
                }
                let claimed: BTreeSet<Lit> = d.result.iter().copied().collect();
                if claimed != cur {
                    return Err(ProofError::WrongResult { step });
                }
                derived += 1;
                last_empty = cur.is_empty();
                db.push(cur);
            }
        }
    }
    if !last_empty {
        return Err(ProofError::NoEmptyClause);
    }
    Ok(ProofCheck { derived, resolutions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::upper::sat::Derivation;

    fn l(x: i64) -> Lit {
        Lit::from_dimacs(x).unwrap()
    }

    #[test]
    fn accepts_and_rejects() {
        let inputs = vec![vec![l(1), l(2)], vec![l(-1), l(2)], vec![l(-2)]];
        let good = Proof {
            inputs: 3,
            steps: vec![
                ProofStep::Derived(Derivation { start: 0, steps: vec![(0, 1)], result: vec![l(2)] }),
                ProofStep::Derived(Derivation { start: 3, steps: vec![(1, 2)], result: vec![] }),
            ],
        };
        assert_eq!(check_proof(&inputs, &good, |_, _| true).unwrap().resolutions, 2);

        let mut wrong = good.clone();
        if let ProofStep::Derived(d) = &mut wrong.steps[0] {
            d.result = vec![l(1)];
        }
        assert_eq!(check_proof(&inputs, &wrong, |_, _| true), Err(ProofError::WrongResult { step: 0 }));

        let mut pivot = good.clone();
        if let ProofStep::Derived(d) = &mut pivot.steps[1] {
            d.steps = vec![(0, 2)];
        }
        assert!(matches!(check_proof(&inputs, &pivot, |_, _| true), Err(ProofError::BadPivot { .. })));

        let short = Proof { inputs: 3, steps: good.steps[..1].to_vec() };
        assert_eq!(check_proof(&inputs, &short, |_, _| true), Err(ProofError::NoEmptyClause));
    }
}
