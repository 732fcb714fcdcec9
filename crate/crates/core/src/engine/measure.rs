//! Termination measure for derivations.
//!
//! A family is measured by the multiset of `(md, n)` pairs, one per member,
//! where `md` is the quantifier nesting depth of the member and `n` its
//! total literal count. Pairs compare lexicographically and multisets by the
//! Dershowitz-Manna extension, which is well founded.
//!
//! Every rule strictly decreases the measure:
//! * A1, A1+ shrink one member's literal count and never raise its depth.
//! * A2, A2+ delete at least the universal itself, and the merged bodies
//!   stay below the depth the universal already had.
//! * A3 shrinks the member it peels and adds one whose depth is strictly
//!   smaller than the member's old depth.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::clause_model::Family;

/// Sorted multiset of `(depth, literal count)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure(Vec<(usize, usize)>);

impl Measure {
    pub fn of(fam: &Family) -> Measure {
        let mut v: Vec<(usize, usize)> = fam.members().map(|f| (f.depth(), f.literal_count())).collect();
        v.sort_unstable();
        Measure(v)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    /// Whether `self` is strictly smaller than `other` in the multiset order.
    pub fn less_than(&self, other: &Measure) -> bool {
        let mut diff: BTreeMap<(usize, usize), isize> = BTreeMap::new();
        for p in &other.0 {
            *diff.entry(*p).or_default() += 1;
        }
        for p in &self.0 {
            *diff.entry(*p).or_default() -= 1;
        }
        // positive: only in `other`; negative: only in `self`
        let removed = diff.iter().filter(|(_, n)| **n > 0).map(|(p, _)| *p).max();
        let added = diff.iter().filter(|(_, n)| **n < 0).map(|(p, _)| *p).max();
        match (removed, added) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(r), Some(a)) => r.cmp(&a) == Ordering::Greater,
        }
    }
}

/// The flat tuple (summed member depth, universal literals anywhere,
/// existential unit clauses, surplus literals of non-unit clauses). Under
/// lexicographic comparison it is not monotone: committing to an
/// existential in a non-unit clause raises the third component while the
/// first two stay put.
pub fn flat_measure(fam: &Family) -> (usize, usize, usize, usize) {
    let mut t = (0, 0, 0, 0);
    for f in fam.members() {
        t.0 += f.depth();
        for c in f.iter() {
            t.1 += c.iter().filter(|l| l.is_forall()).count();
            match c.as_unit() {
                Some(l) if l.is_exists() => t.2 += 1,
                _ => {}
            }
            t.3 += c.len().saturating_sub(1);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::rules::{apply_a1, apply_a1_plus, apply_a3};
    use crate::normal_form::tests::cs;
    use crate::normal_form::{Clause, ClauseSet, Literal};

    fn fam(text: &str) -> Family {
        Family::new(cs(text))
    }

    #[test]
    fn multiset_order() {
        let m = |v: Vec<(usize, usize)>| Measure(v);
        assert!(m(vec![(0, 3)]).less_than(&m(vec![(1, 1)])));
        assert!(m(vec![(0, 1), (0, 2), (0, 5)]).less_than(&m(vec![(1, 1)])));
        assert!(!m(vec![(1, 1)]).less_than(&m(vec![(1, 1)])));
        assert!(m(vec![(1, 1)]).less_than(&m(vec![(1, 1), (0, 0)])));
        assert!(!m(vec![(2, 0)]).less_than(&m(vec![(1, 9), (1, 9)])));
    }

    #[test]
    fn flat_tuple_is_not_monotone_but_multiset_is() {
        let before = fam("B | exists R.A");
        let cl = before.member(0).clauses()[0].clone();
        let l = Literal::exists("R", cs("A"));
        let after = before.with_member(0, apply_a1(before.member(0), &cl, &l).unwrap());
        assert_eq!(flat_measure(&before), (1, 0, 0, 1));
        assert_eq!(flat_measure(&after), (1, 0, 1, 0));
        assert!(Measure::of(&after).less_than(&Measure::of(&before)));

        // peeling a nested existential keeps the summed depth
        let before = fam("exists R.exists R.A & exists R.A");
        let after = apply_a3(&before, 0, &Clause::unit(Literal::exists("R", cs("exists R.A")))).unwrap();
        assert!(flat_measure(&after) >= flat_measure(&before));
        assert!(Measure::of(&after).less_than(&Measure::of(&before)));
    }

    #[test]
    fn rules_decrease() {
        let before = fam("(A | exists R.(B & forall S.C)) & (!A | D)");
        let cl = before.member(0).iter().find(|c| c.contains(&Literal::pos("A"))).unwrap().clone();
        let after = before.with_member(0, apply_a1_plus(before.member(0), &cl, &Literal::pos("A")).unwrap());
        assert!(Measure::of(&after).less_than(&Measure::of(&before)));

        let top = Family::new(ClauseSet::top());
        assert_eq!(Measure::of(&top).pairs(), &[(0, 0)]);
    }
}
