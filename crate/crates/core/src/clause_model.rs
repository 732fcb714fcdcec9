//! Families of clause sets, plus the `rol` and `sub` operators over clause
//! sets.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normal_form::{Clause, ClauseSet, Literal};

/// A role-labelled edge between two members of a [`Family`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyEdge {
    pub parent: usize,
    pub role: Arc<str>,
    pub child: usize,
}

/// An indexed collection of clause sets, one node of a derivation tree.
///
/// Members are append-only: index 0 is the root clause set and a member
/// keeps its index for the rest of the derivation, even when its clause set
/// is rewritten. Each member other than the root has exactly one incoming
/// edge, from a member with a smaller index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    members: Vec<Arc<ClauseSet>>,
    edges: Vec<FamilyEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("a family needs at least one member")]
    NoMembers,
    #[error("edge {0:?} does not point from an earlier member to a later one")]
    BadEdge(FamilyEdge),
    #[error("member {0} has {1} incoming edges")]
    IncomingEdges(usize, usize),
}

impl Family {
    pub fn new(root: ClauseSet) -> Family {
        Family { members: vec![Arc::new(root)], edges: Vec::new() }
    }

    /// Build from parts, checking the structural invariants.
    pub fn from_parts(members: Vec<ClauseSet>, edges: Vec<FamilyEdge>) -> Result<Family, FamilyError> {
        let fam = Family { members: members.into_iter().map(Arc::new).collect(), edges };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        if self.members.is_empty() {
            return Err(FamilyError::NoMembers);
        }
        let mut incoming = vec![0usize; self.members.len()];
        for e in &self.edges {
            if e.parent >= e.child || e.child >= self.members.len() {
                return Err(FamilyError::BadEdge(e.clone()));
            }
            incoming[e.child] += 1;
        }
        for (i, n) in incoming.iter().enumerate() {
            let want = usize::from(i != 0);
            if *n != want {
                return Err(FamilyError::IncomingEdges(i, *n));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &ClauseSet {
        &self.members[i]
    }

    pub fn members(&self) -> impl Iterator<Item = &ClauseSet> + '_ {
        self.members.iter().map(|m| m.as_ref())
    }

    pub fn edges(&self) -> &[FamilyEdge] {
        &self.edges
    }

    /// Incoming edge of member `i`, if it is not the root.
    pub fn parent_of(&self, i: usize) -> Option<&FamilyEdge> {
        self.edges.iter().find(|e| e.child == i)
    }

    /// A copy with member `i` replaced.
    pub fn with_member(&self, i: usize, f: ClauseSet) -> Family {
        let mut next = self.clone();
        next.members[i] = Arc::new(f);
        next
    }

    /// A copy with `f` appended as a child of member `parent`.
    pub fn with_child(&self, parent: usize, role: Arc<str>, f: ClauseSet) -> Family {
        let mut next = self.clone();
        let child = next.members.len();
        next.members.push(Arc::new(f));
        next.edges.push(FamilyEdge { parent, role, child });
        next
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("]")
    }
}

/// The `i`-th member of `fam`, or `None` past the end.
pub fn family_get(fam: &Family, i: usize) -> Option<&ClauseSet> {
    fam.members.get(i).map(|m| m.as_ref())
}

/// All role names occurring in `f`, at any depth.
pub fn rol(f: &ClauseSet) -> BTreeSet<Arc<str>> {
    let mut out = BTreeSet::new();
    collect_roles(f, &mut out);
    out
}

fn collect_roles(f: &ClauseSet, out: &mut BTreeSet<Arc<str>>) {
    for l in f.iter().flat_map(Clause::iter) {
        if let Literal::Exists(r, body) | Literal::Forall(r, body) = l {
            out.insert(r.clone());
            collect_roles(body, out);
        }
    }
}

/// All concept names occurring in `f`, at any depth.
pub fn names(f: &ClauseSet) -> BTreeSet<Arc<str>> {
    let mut out = BTreeSet::new();
    collect_names(f, &mut out);
    out
}

fn collect_names(f: &ClauseSet, out: &mut BTreeSet<Arc<str>>) {
    for l in f.iter().flat_map(Clause::iter) {
        match l {
            Literal::Pos(n) | Literal::Neg(n) => {
                out.insert(n.clone());
            }
            Literal::Exists(_, body) | Literal::Forall(_, body) => collect_names(body, out),
        }
    }
}

/// An element of a subexpression set: a clause set or a single clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubExpr {
    Set(ClauseSet),
    Clause(Clause),
}

impl fmt::Display for SubExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubExpr::Set(s) => write!(f, "{s}"),
            SubExpr::Clause(c) => write!(f, "{c}"),
        }
    }
}

pub type SubexpressionSet = BTreeSet<SubExpr>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sub is only defined for a non-empty clause set")]
pub struct EmptyInput;

/// The least set containing `f` and closed under:
/// clause sets contribute their clauses; clauses contribute every non-empty
/// subclause; `{!A}` contributes `{A}`; a quantified unit clause
/// contributes its body.
///
/// Subclauses are enumerated exhaustively, so this is exponential in the
/// widest clause.
pub fn sub(f: &ClauseSet) -> Result<SubexpressionSet, EmptyInput> {
    if f.is_empty() {
        return Err(EmptyInput);
    }
    let mut seen = SubexpressionSet::new();
    let mut queue = VecDeque::from([SubExpr::Set(f.clone())]);
    while let Some(x) = queue.pop_front() {
        if seen.contains(&x) {
            continue;
        }
        match &x {
            SubExpr::Set(s) => {
                queue.extend(s.iter().cloned().map(SubExpr::Clause));
            }
            SubExpr::Clause(cl) => {
                let lits = cl.literals();
                // bit patterns over the literals; 0 would be the empty clause
                for mask in 1u64..(1u64 << lits.len()) {
                    if mask.count_ones() as usize == lits.len() {
                        continue;
                    }
                    let subclause: Clause =
                        lits.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| l.clone()).collect();
                    queue.push_back(SubExpr::Clause(subclause));
                }
                match cl.as_unit() {
                    Some(Literal::Neg(a)) => queue.push_back(SubExpr::Clause(Clause::unit(Literal::Pos(a.clone())))),
                    Some(Literal::Exists(_, body) | Literal::Forall(_, body)) => {
                        queue.push_back(SubExpr::Set(body.as_ref().clone()))
                    }
                    _ => {}
                }
            }
        }
        seen.insert(x);
    }
    Ok(seen)
}
