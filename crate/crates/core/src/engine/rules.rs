//! The inference rules, one function each, plus the clash and
//! completeness tests.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clause_model::Family;
use crate::normal_form::{complement, Clause, ClauseSet, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    A1,
    #[serde(rename = "A1+")]
    A1Plus,
    A2,
    #[serde(rename = "A2+")]
    A2Plus,
    A3,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::A1 => "A1",
            Rule::A1Plus => "A1+",
            Rule::A2 => "A2",
            Rule::A2Plus => "A2+",
            Rule::A3 => "A3",
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which rule system drives the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// A1, A2 and A3.
    Basic,
    /// A1+, A2+ and A3.
    #[default]
    Plus,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreconditionViolation {
    #[error("clause {0} is not in the clause set")]
    ClauseNotPresent(Clause),
    #[error("literal {0} is not in the target clause")]
    LiteralNotInClause(Literal),
    #[error("target clause {0} has fewer than two literals")]
    ClauseTooShort(Clause),
    #[error("literal {0} is not a universal")]
    NotUniversal(Literal),
    #[error("universal {0} does not occur in the clause set")]
    UniversalAbsent(Literal),
    #[error("clause {0} is not a unit universal")]
    NotUniversalUnit(Clause),
    #[error("clause {0} is not a unit existential")]
    NotExistentialUnit(Clause),
    #[error("the clause set has a non-unit clause")]
    NotAllUnit,
    #[error("a universal unit clause remains")]
    UniversalPresent,
    #[error("a non-unit clause remains")]
    NonUnitPresent,
    #[error("family has no member {0}")]
    NoSuchMember(usize),
}

fn check_choice(f: &ClauseSet, cl: &Clause, l: &Literal) -> Result<(), PreconditionViolation> {
    if !f.contains(cl) {
        return Err(PreconditionViolation::ClauseNotPresent(cl.clone()));
    }
    if !cl.contains(l) {
        return Err(PreconditionViolation::LiteralNotInClause(l.clone()));
    }
    if cl.len() < 2 {
        return Err(PreconditionViolation::ClauseTooShort(cl.clone()));
    }
    Ok(())
}

/// A1: replace `cl` by the unit clause `{l}`.
pub fn apply_a1(f: &ClauseSet, cl: &Clause, l: &Literal) -> Result<ClauseSet, PreconditionViolation> {
    check_choice(f, cl, l)?;
    Ok(f.iter().map(|c| if c == cl { Clause::unit(l.clone()) } else { c.clone() }).collect())
}

/// A1+: every clause containing `l` becomes `{l}`, and every other clause
/// loses the complement of `l`.
pub fn apply_a1_plus(f: &ClauseSet, cl: &Clause, l: &Literal) -> Result<ClauseSet, PreconditionViolation> {
    check_choice(f, cl, l)?;
    let comp = complement(l);
    Ok(f.iter()
        .map(|c| {
            if c.contains(l) {
                Clause::unit(l.clone())
            } else if c.contains(&comp) {
                c.without(&comp)
            } else {
                c.clone()
            }
        })
        .collect())
}

/// A2: drop every clause containing `forall R.F1` and merge `F1` into the
/// body of every `exists R.F2` left in the clause set.
pub fn apply_a2(f: &ClauseSet, univ: &Literal) -> Result<ClauseSet, PreconditionViolation> {
    let Literal::Forall(role, f1) = univ else {
        return Err(PreconditionViolation::NotUniversal(univ.clone()));
    };
    if !f.iter().any(|c| c.contains(univ)) {
        return Err(PreconditionViolation::UniversalAbsent(univ.clone()));
    }
    Ok(merge_universal(f, univ, role, f1))
}

fn merge_universal(f: &ClauseSet, univ: &Literal, role: &Arc<str>, f1: &ClauseSet) -> ClauseSet {
    f.iter()
        .filter(|c| !c.contains(univ))
        .map(|c| {
            c.iter()
                .map(|l| match l {
                    Literal::Exists(r, f2) if r == role => Literal::Exists(r.clone(), Arc::new(f1.union(f2))),
                    other => other.clone(),
                })
                .collect::<Clause>()
        })
        .collect()
}

/// A2+: A2 restricted to clause sets made only of unit clauses.
pub fn apply_a2_plus(f: &ClauseSet, univ_unit: &Clause) -> Result<ClauseSet, PreconditionViolation> {
    if !f.all_unit() {
        return Err(PreconditionViolation::NotAllUnit);
    }
    if !f.contains(univ_unit) {
        return Err(PreconditionViolation::ClauseNotPresent(univ_unit.clone()));
    }
    match univ_unit.as_unit() {
        Some(u @ Literal::Forall(role, f1)) => Ok(merge_universal(f, u, role, f1)),
        _ => Err(PreconditionViolation::NotUniversalUnit(univ_unit.clone())),
    }
}

/// A3: move the body of the unit existential `ex_unit` out of member `i`
/// into a new member, linked to `i` by the existential's role.
pub fn apply_a3(fam: &Family, i: usize, ex_unit: &Clause) -> Result<Family, PreconditionViolation> {
    if i >= fam.len() {
        return Err(PreconditionViolation::NoSuchMember(i));
    }
    let f = fam.member(i);
    if !f.contains(ex_unit) {
        return Err(PreconditionViolation::ClauseNotPresent(ex_unit.clone()));
    }
    let Some(Literal::Exists(role, body)) = ex_unit.as_unit() else {
        return Err(PreconditionViolation::NotExistentialUnit(ex_unit.clone()));
    };
    if !f.all_unit() {
        return Err(PreconditionViolation::NonUnitPresent);
    }
    if f.iter().any(|c| c.as_unit().is_some_and(Literal::is_forall)) {
        return Err(PreconditionViolation::UniversalPresent);
    }
    let rest: ClauseSet = f.iter().filter(|c| *c != ex_unit).cloned().collect();
    Ok(fam.with_member(i, rest).with_child(i, role.clone(), body.as_ref().clone()))
}

/// Whether `f` holds the empty clause or two complementary unit clauses.
pub fn is_clash(f: &ClauseSet) -> bool {
    is_clash_with(f, true)
}

/// [`is_clash`], with complementary quantified unit pairs detected only
/// when `eager_roles` is set. Without it such pairs surface later, after A2
/// and A3 have moved them into a successor.
pub fn is_clash_with(f: &ClauseSet, eager_roles: bool) -> bool {
    if f.has_empty_clause() {
        return true;
    }
    let units: BTreeSet<&Literal> = f.iter().filter_map(Clause::as_unit).collect();
    for l in &units {
        match l {
            Literal::Pos(n) => {
                if units.contains(&Literal::Neg(n.clone())) {
                    return true;
                }
            }
            Literal::Neg(_) => {}
            Literal::Exists(r, _) | Literal::Forall(r, _) if eager_roles => {
                // complements only ever pair an existential with a universal
                let has_dual = units.iter().any(|u| match (l, u) {
                    (Literal::Exists(..), Literal::Forall(q, _)) | (Literal::Forall(..), Literal::Exists(q, _)) => {
                        q == r
                    }
                    _ => false,
                });
                if has_dual && units.contains(&complement(l)) {
                    return true;
                }
            }
            _ => {}
        }
    }
    false
}

/// Whether no rule of `strategy` applies to any member.
///
/// Both rule systems stop at the same point: every clause is a unit over a
/// concept name (or empty).
pub fn is_complete(fam: &Family, _strategy: Strategy) -> bool {
    fam.members().all(|f| {
        f.iter().all(|c| match c.literals() {
            [] => true,
            [l] => !l.is_exists() && !l.is_forall(),
            _ => false,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::tests::{cs, EXAMPLE_F};
    use crate::normal_form::{canonicalize, to_cnf};
    use crate::oracle::oracle_sat;
    use crate::syntax::{parse_concept, Concept};
    use proptest::prelude::*;
    use proptest::strategy::Strategy;

    fn unit(l: Literal) -> Clause {
        Clause::unit(l)
    }

    fn lit(text: &str) -> Literal {
        cs(text).clauses()[0].as_unit().unwrap().clone()
    }

    fn clause(text: &str) -> Clause {
        let f = cs(text);
        assert_eq!(f.len(), 1, "{text} is not a single clause");
        f.clauses()[0].clone()
    }

    #[test]
    fn a1_on_example() {
        let f0 = cs(EXAMPLE_F);
        let f1 = apply_a1(&f0, &clause("Animal | Black"), &Literal::pos("Animal")).unwrap();
        let expected = cs("Animal \
            & (Animal | forall hasPart.Small) \
            & (!Animal | exists hasPart.(Leg & !Small)) \
            & (forall hasPart.!Leg | forall hasPart.!Wing)");
        assert_eq!(f1, expected);

        let f2 = apply_a1(&f1, &clause("Animal | forall hasPart.Small"), &Literal::pos("Animal")).unwrap();
        let f3 = apply_a1(&f2, &clause("!Animal | exists hasPart.(Leg & !Small)"), &Literal::neg("Animal")).unwrap();
        assert!(f3.contains(&unit(Literal::pos("Animal"))));
        assert!(f3.contains(&unit(Literal::neg("Animal"))));
        assert!(is_clash(&f3));
    }

    #[test]
    fn a1_small_and_errors() {
        let f = cs("A | B");
        assert_eq!(apply_a1(&f, &clause("A | B"), &Literal::pos("B")).unwrap(), cs("B"));
        assert_eq!(
            apply_a1(&f, &clause("A | C"), &Literal::pos("A")),
            Err(PreconditionViolation::ClauseNotPresent(clause("A | C")))
        );
        assert!(matches!(
            apply_a1(&f, &clause("A | B"), &Literal::pos("C")),
            Err(PreconditionViolation::LiteralNotInClause(_))
        ));
        assert!(matches!(
            apply_a1(&cs("A"), &clause("A"), &Literal::pos("A")),
            Err(PreconditionViolation::ClauseTooShort(_))
        ));
    }

    #[test]
    fn a1_plus_examples() {
        let f0 = cs(EXAMPLE_F);
        let f1 = apply_a1_plus(&f0, &clause("Animal | Black"), &Literal::pos("Animal")).unwrap();
        assert_eq!(f1, cs("Animal & exists hasPart.(Leg & !Small) & (forall hasPart.!Leg | forall hasPart.!Wing)"));

        let f = ClauseSet::from(vec![clause("A | B"), clause("!A")]);
        let out = apply_a1_plus(&f, &clause("A | B"), &Literal::pos("A")).unwrap();
        assert_eq!(out, ClauseSet::from(vec![unit(Literal::pos("A")), Clause::empty()]));
        assert!(is_clash(&out));

        let f = cs("(A | B) & (A | C)");
        assert_eq!(apply_a1_plus(&f, &clause("A | B"), &Literal::pos("A")).unwrap(), cs("A"));
    }

    #[test]
    fn a1_plus_removes_quantified_complements() {
        let f = cs("(exists R.A | B) & (forall R.!A | C)");
        let out = apply_a1_plus(&f, &clause("exists R.A | B"), &lit("exists R.A")).unwrap();
        assert_eq!(out, cs("exists R.A & C"));
    }

    #[test]
    fn a2_examples() {
        // fifth node of the basic run on the example
        let f5 = cs("Animal & exists hasPart.(Leg & !Small) & forall hasPart.!Leg");
        let f6 = apply_a2(&f5, &lit("forall hasPart.!Leg")).unwrap();
        assert_eq!(f6, cs("Animal & exists hasPart.(!Leg & Leg & !Small)"));

        assert_eq!(apply_a2(&cs("forall R.A"), &lit("forall R.A")).unwrap(), ClauseSet::top());

        let f = cs("forall R.A & exists S.B");
        assert_eq!(apply_a2(&f, &lit("forall R.A")).unwrap(), cs("exists S.B"));
        // different roles do not interact
        assert!(oracle_sat(&f.to_concept()));

        assert!(matches!(apply_a2(&f, &Literal::pos("A")), Err(PreconditionViolation::NotUniversal(_))));
        assert!(matches!(apply_a2(&f, &lit("forall R.B")), Err(PreconditionViolation::UniversalAbsent(_))));
    }

    #[test]
    fn a2_inside_non_unit_clauses() {
        let f = cs("(forall R.A | B) & (exists R.C | D)");
        let out = apply_a2(&f, &lit("forall R.A")).unwrap();
        assert_eq!(out, cs("exists R.(A & C) | D"));
    }

    #[test]
    fn a2_plus_examples() {
        let f2 = cs("Animal & exists hasPart.(Leg & !Small) & forall hasPart.!Leg");
        let f3 = apply_a2_plus(&f2, &clause("forall hasPart.!Leg")).unwrap();
        assert_eq!(f3, cs("Animal & exists hasPart.(!Leg & Leg & !Small)"));

        assert_eq!(apply_a2_plus(&cs("A & forall R.B"), &clause("forall R.B")).unwrap(), cs("A"));
        assert_eq!(
            apply_a2_plus(&cs("(A | B) & forall R.C"), &clause("forall R.C")),
            Err(PreconditionViolation::NotAllUnit)
        );
        assert!(matches!(
            apply_a2_plus(&cs("A & forall R.C"), &clause("A")),
            Err(PreconditionViolation::NotUniversalUnit(_))
        ));
    }

    #[test]
    fn a3_examples() {
        let f6 = cs("Animal & exists hasPart.(!Leg & Leg & !Small)");
        let fam = Family::new(f6);
        let out = apply_a3(&fam, 0, &clause("exists hasPart.(!Leg & Leg & !Small)")).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.member(0), &cs("Animal"));
        assert_eq!(out.member(1), &cs("!Leg & Leg & !Small"));
        assert_eq!(out.edges()[0].parent, 0);
        assert_eq!(out.edges()[0].child, 1);
        assert_eq!(&*out.edges()[0].role, "hasPart");
        assert!(is_clash(out.member(1)));

        let fam = Family::new(cs("exists R.A"));
        let out = apply_a3(&fam, 0, &clause("exists R.A")).unwrap();
        assert_eq!(out.member(0), &ClauseSet::top());
        assert_eq!(out.member(1), &cs("A"));

        let f9 = cs("Animal & exists hasPart.(!Wing & Leg & !Small)");
        let out = apply_a3(&Family::new(f9), 0, &clause("exists hasPart.(!Wing & Leg & !Small)")).unwrap();
        assert_eq!(out.member(1), &cs("!Wing & Leg & !Small"));
        assert!(is_complete(&out, super::Strategy::Basic));
    }

    #[test]
    fn a3_errors() {
        let fam = Family::new(cs("exists R.A & forall R.B"));
        assert_eq!(apply_a3(&fam, 0, &clause("exists R.A")), Err(PreconditionViolation::UniversalPresent));
        let fam = Family::new(cs("exists R.A & (B | C)"));
        assert_eq!(apply_a3(&fam, 0, &clause("exists R.A")), Err(PreconditionViolation::NonUnitPresent));
        let fam = Family::new(cs("exists R.A & B"));
        assert!(matches!(apply_a3(&fam, 0, &clause("B")), Err(PreconditionViolation::NotExistentialUnit(_))));
        assert_eq!(apply_a3(&fam, 3, &clause("B")), Err(PreconditionViolation::NoSuchMember(3)));
    }

    #[test]
    fn clash_examples() {
        assert!(is_clash(&cs("A & !A & forall R.B")));
        assert!(is_clash(&ClauseSet::bottom()));
        assert!(!is_clash(&cs("A & B")));
        assert!(!is_clash(&ClauseSet::top()));
        // complementary quantified units
        let f = cs("exists R.A & forall R.!A");
        assert!(is_clash(&f));
        assert!(!is_clash_with(&f, false));
        assert!(!is_clash(&cs("exists R.A & forall S.!A")));
        // a non-unit clause with complementary literals is not a clash
        assert!(!is_clash(&cs("A | !A")));
    }

    #[test]
    fn completeness_examples() {
        let done = Family::new(cs("Animal")).with_child(0, Arc::from("hasPart"), cs("!Wing & Leg & !Small"));
        assert!(is_complete(&done, super::Strategy::Basic));
        assert!(is_complete(&done, super::Strategy::Plus));
        assert!(!is_complete(&Family::new(cs("A | B")), super::Strategy::Basic));
        assert!(!is_complete(&Family::new(cs("exists R.A")), super::Strategy::Plus));
        assert!(!is_complete(&Family::new(cs("forall R.A")), super::Strategy::Plus));
        assert!(is_complete(&Family::new(ClauseSet::top()), super::Strategy::Plus));
    }

    fn arb_concept() -> impl Strategy<Value = Concept> {
        let leaf = prop::sample::select(vec!["A", "B", "C"]).prop_map(Concept::name);
        leaf.prop_recursive(3, 14, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Concept::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::or(a, b)),
                inner.clone().prop_map(|c| Concept::forall("R", c)),
                inner.prop_map(|c| Concept::exists("R", c)),
            ]
        })
    }

    fn all_unit_with_forall() -> impl Strategy<Value = (ClauseSet, Clause)> {
        prop::collection::vec(arb_concept(), 1..4).prop_filter_map("needs a universal unit", |cs| {
            let f: ClauseSet = cs.iter().flat_map(|c| to_cnf(c).clauses().to_vec()).filter(Clause::is_unit).collect();
            let u = f.iter().find(|c| c.as_unit().is_some_and(Literal::is_forall))?.clone();
            Some((f, u))
        })
    }

    fn choice() -> impl Strategy<Value = (ClauseSet, Clause, Literal)> {
        (arb_concept(), arb_concept(), any::<prop::sample::Index>()).prop_filter_map(
            "needs a non-unit clause",
            |(a, b, idx)| {
                let f = to_cnf(&Concept::and(a, b));
                let cl = f.iter().find(|c| c.len() >= 2)?.clone();
                let l = cl.literals()[idx.index(cl.len())].clone();
                Some((f, cl, l))
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn a2_plus_matches_a2((f, u) in all_unit_with_forall()) {
            let lit = u.as_unit().unwrap().clone();
            prop_assert_eq!(apply_a2_plus(&f, &u).unwrap(), apply_a2(&f, &lit).unwrap());
        }

        #[test]
        fn a1_plus_refines_a1((f, cl, l) in choice()) {
            let plus = apply_a1_plus(&f, &cl, &l).unwrap();
            let basic = apply_a1(&f, &cl, &l).unwrap();
            let comp = complement(&l);
            prop_assert!(plus.contains(&Clause::unit(l.clone())));
            // every clause of the A1+ result is covered by some clause of
            // the A1 result once the complement is discounted
            for c in plus.iter() {
                prop_assert!(basic.iter().any(|b| c.is_subset(&b.without(&comp)) || c.is_subset(b)));
            }
            prop_assert_eq!(canonicalize(&plus), plus);
        }

        #[test]
        fn rules_preserve_satisfiability_direction((f, cl, l) in choice()) {
            // A1 and A1+ only strengthen: a model of the result is a model
            // of the input
            let input = f.to_concept();
            for out in [apply_a1(&f, &cl, &l).unwrap(), apply_a1_plus(&f, &cl, &l).unwrap()] {
                let c = Concept::and(out.to_concept(), Concept::not(input.clone()));
                prop_assert!(!oracle_sat(&c));
            }
        }
    }

    #[test]
    fn parses_helper_examples() {
        // guards the helpers above against silent shape changes
        assert!(parse_concept("exists R.A").is_ok());
        assert!(lit("forall R.A").is_forall());
    }
}
