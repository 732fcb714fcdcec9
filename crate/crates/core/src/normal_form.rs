//! Clause-set normal form for ALC concepts.
//!
//! A [`ClauseSet`] is a conjunction of [`Clause`]s, each clause a disjunction
//! of [`Literal`]s. Quantified literals carry a clause set as their body, so
//! the normal form holds at every nesting level.
//!
//! Both collections are kept as sorted, duplicate-free vectors. The derived
//! `Ord` on [`Literal`] (`Pos < Neg < Exists < Forall`, then name or role,
//! then body) is the fixed total order every canonical form uses, so clause
//! sets that denote the same set compare equal structurally.
//!
//! `top` and `bot` have no literal of their own: a concept equivalent to
//! `top` becomes the empty clause set and one equivalent to `bot` becomes
//! `{{}}`. Inside quantifiers, `exists R.top` stays as `Exists(R, {})` and
//! `forall R.bot` as `Forall(R, {{}})`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::syntax::Concept;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "LiteralRepr", into = "LiteralRepr")]
pub enum Literal {
    Pos(Arc<str>),
    Neg(Arc<str>),
    Exists(Arc<str>, Arc<ClauseSet>),
    Forall(Arc<str>, Arc<ClauseSet>),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LiteralRepr {
    Pos(Arc<str>),
    Neg(Arc<str>),
    Exists { role: Arc<str>, body: Arc<ClauseSet> },
    Forall { role: Arc<str>, body: Arc<ClauseSet> },
}

impl From<LiteralRepr> for Literal {
    fn from(r: LiteralRepr) -> Self {
        match r {
            LiteralRepr::Pos(n) => Literal::Pos(n),
            LiteralRepr::Neg(n) => Literal::Neg(n),
            LiteralRepr::Exists { role, body } => Literal::Exists(role, body),
            LiteralRepr::Forall { role, body } => Literal::Forall(role, body),
        }
    }
}

impl From<Literal> for LiteralRepr {
    fn from(l: Literal) -> Self {
        match l {
            Literal::Pos(n) => LiteralRepr::Pos(n),
            Literal::Neg(n) => LiteralRepr::Neg(n),
            Literal::Exists(role, body) => LiteralRepr::Exists { role, body },
            Literal::Forall(role, body) => LiteralRepr::Forall { role, body },
        }
    }
}

impl Literal {
    pub fn pos(name: &str) -> Literal {
        Literal::Pos(Arc::from(name))
    }

    pub fn neg(name: &str) -> Literal {
        Literal::Neg(Arc::from(name))
    }

    pub fn exists(role: &str, body: ClauseSet) -> Literal {
        Literal::Exists(Arc::from(role), Arc::new(body))
    }

    pub fn forall(role: &str, body: ClauseSet) -> Literal {
        Literal::Forall(Arc::from(role), Arc::new(body))
    }

    pub fn is_forall(&self) -> bool {
        matches!(self, Literal::Forall(..))
    }

    pub fn is_exists(&self) -> bool {
        matches!(self, Literal::Exists(..))
    }

    /// Role of a quantified literal.
    pub fn role(&self) -> Option<&Arc<str>> {
        match self {
            Literal::Exists(r, _) | Literal::Forall(r, _) => Some(r),
            _ => None,
        }
    }

    /// Quantifier nesting depth.
    pub fn depth(&self) -> usize {
        match self {
            Literal::Pos(_) | Literal::Neg(_) => 0,
            Literal::Exists(_, f) | Literal::Forall(_, f) => 1 + f.depth(),
        }
    }

    pub fn to_concept(&self) -> Concept {
        match self {
            Literal::Pos(n) => Concept::Name(n.clone()),
            Literal::Neg(n) => Concept::not(Concept::Name(n.clone())),
            Literal::Exists(r, f) => Concept::Exists(r.clone(), Box::new(f.to_concept())),
            Literal::Forall(r, f) => Concept::Forall(r.clone(), Box::new(f.to_concept())),
        }
    }

    fn canonical(&self) -> Literal {
        match self {
            Literal::Exists(r, f) => Literal::Exists(r.clone(), Arc::new(canonicalize(f))),
            Literal::Forall(r, f) => Literal::Forall(r.clone(), Arc::new(canonicalize(f))),
            other => other.clone(),
        }
    }
}

/// A disjunction of literals, stored sorted and without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Literal>", into = "Vec<Literal>")]
pub struct Clause(Vec<Literal>);

impl From<Vec<Literal>> for Clause {
    fn from(mut lits: Vec<Literal>) -> Self {
        lits.sort();
        lits.dedup();
        Clause(lits)
    }
}

impl From<Clause> for Vec<Literal> {
    fn from(c: Clause) -> Self {
        c.0
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::from(iter.into_iter().collect::<Vec<_>>())
    }
}

impl Clause {
    pub fn empty() -> Clause {
        Clause(Vec::new())
    }

    pub fn unit(l: Literal) -> Clause {
        Clause(vec![l])
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.len() == 1
    }

    /// The sole literal of a unit clause.
    pub fn as_unit(&self) -> Option<&Literal> {
        match self.0.as_slice() {
            [l] => Some(l),
            _ => None,
        }
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.0.binary_search(l).is_ok()
    }

    pub fn without(&self, l: &Literal) -> Clause {
        Clause(self.0.iter().filter(|x| *x != l).cloned().collect())
    }

    pub fn union(&self, other: &Clause) -> Clause {
        self.0.iter().chain(other.0.iter()).cloned().collect()
    }

    pub fn is_subset(&self, other: &Clause) -> bool {
        self.0.iter().all(|l| other.contains(l))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Literal> {
        self.0.iter()
    }

    pub fn to_concept(&self) -> Concept {
        let mut it = self.0.iter().map(Literal::to_concept);
        match it.next() {
            None => Concept::Bottom,
            Some(first) => it.fold(first, Concept::or),
        }
    }
}

impl<'a> IntoIterator for &'a Clause {
    type Item = &'a Literal;
    type IntoIter = std::slice::Iter<'a, Literal>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A conjunction of clauses, stored sorted and without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Clause>", into = "Vec<Clause>")]
pub struct ClauseSet(Vec<Clause>);

impl From<Vec<Clause>> for ClauseSet {
    fn from(mut clauses: Vec<Clause>) -> Self {
        clauses.sort();
        clauses.dedup();
        ClauseSet(clauses)
    }
}

impl From<ClauseSet> for Vec<Clause> {
    fn from(f: ClauseSet) -> Self {
        f.0
    }
}

impl FromIterator<Clause> for ClauseSet {
    fn from_iter<I: IntoIterator<Item = Clause>>(iter: I) -> Self {
        ClauseSet::from(iter.into_iter().collect::<Vec<_>>())
    }
}

impl<'a> IntoIterator for &'a ClauseSet {
    type Item = &'a Clause;
    type IntoIter = std::slice::Iter<'a, Clause>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl ClauseSet {
    /// The empty clause set, equivalent to `top`.
    pub fn top() -> ClauseSet {
        ClauseSet(Vec::new())
    }

    /// `{{}}`, equivalent to `bot`.
    pub fn bottom() -> ClauseSet {
        ClauseSet(vec![Clause::empty()])
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.0.iter()
    }

    pub fn contains(&self, c: &Clause) -> bool {
        self.0.binary_search(c).is_ok()
    }

    pub fn has_empty_clause(&self) -> bool {
        // the empty clause sorts first
        self.0.first().is_some_and(Clause::is_empty)
    }

    pub fn all_unit(&self) -> bool {
        self.0.iter().all(Clause::is_unit)
    }

    pub fn union(&self, other: &ClauseSet) -> ClauseSet {
        self.0.iter().chain(other.0.iter()).cloned().collect()
    }

    pub fn is_subset(&self, other: &ClauseSet) -> bool {
        self.0.iter().all(|c| other.contains(c))
    }

    /// Quantifier nesting depth; 0 when no quantified literal occurs.
    pub fn depth(&self) -> usize {
        self.0.iter().flat_map(|c| c.iter()).map(Literal::depth).max().unwrap_or(0)
    }

    /// Total number of top-level literal occurrences.
    pub fn literal_count(&self) -> usize {
        self.0.iter().map(Clause::len).sum()
    }

    pub fn to_concept(&self) -> Concept {
        let mut it = self.0.iter().map(Clause::to_concept);
        match it.next() {
            None => Concept::Top,
            Some(first) => it.fold(first, Concept::and),
        }
    }
}

/// Push negation down to names and simplify `top`/`bot` away.
///
/// The result is `Top`, `Bottom`, or a concept in which `Top` occurs only
/// as the body of an existential and `Bottom` only as the body of a
/// universal.
pub fn to_nnf(c: &Concept) -> Concept {
    nnf(c, false)
}

fn nnf(c: &Concept, negated: bool) -> Concept {
    match (c, negated) {
        (Concept::Name(_), false) => c.clone(),
        (Concept::Name(_), true) => Concept::not(c.clone()),
        (Concept::Top, false) | (Concept::Bottom, true) => Concept::Top,
        (Concept::Top, true) | (Concept::Bottom, false) => Concept::Bottom,
        (Concept::Not(inner), _) => nnf(inner, !negated),
        (Concept::And(a, b), false) | (Concept::Or(a, b), true) => mk_and(nnf(a, negated), nnf(b, negated)),
        (Concept::Or(a, b), false) | (Concept::And(a, b), true) => mk_or(nnf(a, negated), nnf(b, negated)),
        (Concept::Exists(r, inner), false) | (Concept::Forall(r, inner), true) => match nnf(inner, negated) {
            Concept::Bottom => Concept::Bottom,
            body => Concept::Exists(r.clone(), Box::new(body)),
        },
        (Concept::Forall(r, inner), false) | (Concept::Exists(r, inner), true) => match nnf(inner, negated) {
            Concept::Top => Concept::Top,
            body => Concept::Forall(r.clone(), Box::new(body)),
        },
    }
}

fn mk_and(a: Concept, b: Concept) -> Concept {
    match (a, b) {
        (Concept::Bottom, _) | (_, Concept::Bottom) => Concept::Bottom,
        (Concept::Top, x) | (x, Concept::Top) => x,
        (a, b) => Concept::and(a, b),
    }
}

fn mk_or(a: Concept, b: Concept) -> Concept {
    match (a, b) {
        (Concept::Top, _) | (_, Concept::Top) => Concept::Top,
        (Concept::Bottom, x) | (x, Concept::Bottom) => x,
        (a, b) => Concept::or(a, b),
    }
}

/// Convert a concept to an equivalent clause set.
///
/// Disjunction is distributed over conjunction naively, so the output can
/// be exponentially larger than the input.
pub fn to_cnf(c: &Concept) -> ClauseSet {
    cnf_of_nnf(&to_nnf(c))
}

fn cnf_of_nnf(c: &Concept) -> ClauseSet {
    match c {
        Concept::Name(n) => ClauseSet(vec![Clause::unit(Literal::Pos(n.clone()))]),
        Concept::Not(inner) => match inner.as_ref() {
            Concept::Name(n) => ClauseSet(vec![Clause::unit(Literal::Neg(n.clone()))]),
            other => cnf_of_nnf(&to_nnf(&Concept::not(other.clone()))),
        },
        Concept::Top => ClauseSet::top(),
        Concept::Bottom => ClauseSet::bottom(),
        Concept::And(a, b) => cnf_of_nnf(a).union(&cnf_of_nnf(b)),
        Concept::Or(a, b) => {
            let left = cnf_of_nnf(a);
            let right = cnf_of_nnf(b);
            let mut out = Vec::with_capacity(left.len() * right.len());
            for l in &left {
                for r in &right {
                    out.push(l.union(r));
                }
            }
            ClauseSet::from(out)
        }
        Concept::Exists(r, inner) => {
            let body = cnf_of_nnf(inner);
            if body.has_empty_clause() {
                ClauseSet::bottom()
            } else {
                ClauseSet(vec![Clause::unit(Literal::Exists(r.clone(), Arc::new(body)))])
            }
        }
        Concept::Forall(r, inner) => {
            let body = cnf_of_nnf(inner);
            if body.is_empty() {
                ClauseSet::top()
            } else {
                ClauseSet(vec![Clause::unit(Literal::Forall(r.clone(), Arc::new(body)))])
            }
        }
    }
}

/// The complementary literal: `!A` for `A`, and `forall R.CNF(!F)` for
/// `exists R.F` (symmetrically for universals).
pub fn complement(l: &Literal) -> Literal {
    match l {
        Literal::Pos(n) => Literal::Neg(n.clone()),
        Literal::Neg(n) => Literal::Pos(n.clone()),
        Literal::Exists(r, f) => Literal::Forall(r.clone(), Arc::new(negate(f))),
        Literal::Forall(r, f) => Literal::Exists(r.clone(), Arc::new(negate(f))),
    }
}

/// CNF of the negation of a clause set.
pub fn negate(f: &ClauseSet) -> ClauseSet {
    to_cnf(&Concept::not(f.to_concept()))
}

/// Sort and deduplicate at every nesting level. Idempotent.
pub fn canonicalize(f: &ClauseSet) -> ClauseSet {
    f.0.iter().map(|c| c.0.iter().map(Literal::canonical).collect::<Clause>()).collect()
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(n) => write!(f, "{n}"),
            Literal::Neg(n) => write!(f, "!{n}"),
            Literal::Exists(r, body) => write!(f, "exists {r}.{body}"),
            Literal::Forall(r, body) => write!(f, "forall {r}.{body}"),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}
