//! CNF tableaux: extraction from a successful derivation, the condition
//! checker, and the interpretation a tableau induces.
//!
//! A label is stored as the clause-set snapshots it was built from plus a
//! set of clauses. Any non-empty subset of a snapshot counts as a member of
//! the label; subsets are tested on demand instead of being enumerated.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clause_model::{names, rol};
use crate::engine::{Rule, Verdict};
use crate::normal_form::{complement, Clause, ClauseSet, Literal};
use crate::syntax::Concept;

/// A finite interpretation. Names and roles missing from the maps have
/// empty extensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub domain: Vec<usize>,
    pub names: BTreeMap<String, BTreeSet<usize>>,
    pub roles: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

impl Interpretation {
    fn successors<'a>(&'a self, role: &str, d: usize) -> impl Iterator<Item = usize> + 'a {
        self.roles.get(role).into_iter().flat_map(move |pairs| pairs.range((d, 0)..=(d, usize::MAX)).map(|&(_, t)| t))
    }
}

/// Whether `d` belongs to the extension of `c` under `interp`.
pub fn eval_concept(c: &Concept, interp: &Interpretation, d: usize) -> bool {
    match c {
        Concept::Name(n) => interp.names.get(&**n).is_some_and(|ext| ext.contains(&d)),
        Concept::Top => true,
        Concept::Bottom => false,
        Concept::Not(x) => !eval_concept(x, interp, d),
        Concept::And(a, b) => eval_concept(a, interp, d) && eval_concept(b, interp, d),
        Concept::Or(a, b) => eval_concept(a, interp, d) || eval_concept(b, interp, d),
        Concept::Forall(r, x) => interp.successors(r, d).all(|t| eval_concept(x, interp, t)),
        Concept::Exists(r, x) => interp.successors(r, d).any(|t| eval_concept(x, interp, t)),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub snapshots: Vec<ClauseSet>,
    pub clauses: BTreeSet<Clause>,
}

impl Label {
    /// Adds `f` as a snapshot. Its clauses are not added.
    pub fn insert_set(&mut self, f: ClauseSet) {
        if !f.is_empty() && !self.snapshots.contains(&f) {
            self.snapshots.push(f);
        }
    }

    pub fn insert_clause(&mut self, c: Clause) -> bool {
        self.clauses.insert(c)
    }

    /// The empty clause set is always present: it is a subset of every
    /// snapshot and denotes top.
    pub fn has_set(&self, f: &ClauseSet) -> bool {
        f.is_empty() || self.snapshots.iter().any(|s| f.is_subset(s))
    }

    pub fn has_clause(&self, c: &Clause) -> bool {
        self.clauses.contains(c)
    }

    pub fn has_unit(&self, l: &Literal) -> bool {
        self.clauses.contains(&Clause::unit(l.clone()))
    }

    fn units(&self) -> impl Iterator<Item = &Literal> + '_ {
        self.clauses.iter().filter_map(Clause::as_unit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfTableau {
    pub formula: ClauseSet,
    /// Individuals are `0..labels.len()`.
    pub labels: Vec<Label>,
    pub role_edges: BTreeMap<Arc<str>, BTreeSet<(usize, usize)>>,
    pub root: usize,
}

impl CnfTableau {
    pub fn individuals(&self) -> std::ops::Range<usize> {
        0..self.labels.len()
    }

    fn successors<'a>(&'a self, role: &Arc<str>, s: usize) -> impl Iterator<Item = usize> + 'a {
        self.role_edges
            .get(role)
            .into_iter()
            .flat_map(move |pairs| pairs.range((s, 0)..=(s, usize::MAX)).map(|&(_, t)| t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// 1 to 6 for the tableau conditions, 0 when the formula is missing
    /// from the root label.
    pub condition: u8,
    pub individuals: Vec<usize>,
    pub expr: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} at {:?}: {}", self.condition, self.individuals, self.expr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("verdict is not satisfiable")]
pub struct NotSatisfiable;

#[derive(Default)]
struct Complements(HashMap<Literal, Literal>);

impl Complements {
    fn of(&mut self, l: &Literal) -> Literal {
        self.0.entry(l.clone()).or_insert_with(|| complement(l)).clone()
    }
}

/// Check every tableau condition for `t` as a tableau for `f`. With
/// `restricted`, clause choice must also be compatible with every other
/// clause of the label.
pub fn check_tableau(t: &CnfTableau, f: &ClauseSet, restricted: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut comp = Complements::default();
    let mut report = |condition: u8, individuals: Vec<usize>, expr: String| {
        out.push(Violation { condition, individuals, expr });
    };
    if t.root >= t.labels.len() || !t.labels[t.root].has_set(f) {
        report(0, vec![t.root], f.to_string());
    }
    for s in t.individuals() {
        let label = &t.labels[s];

        for l in label.units() {
            let c = comp.of(l);
            if l < &c && label.has_unit(&c) {
                report(1, vec![s], format!("{{{l}}} and {{{c}}}"));
            }
        }

        for snap in &label.snapshots {
            for cl in snap.iter().filter(|cl| !label.has_clause(cl)) {
                report(2, vec![s], format!("{cl} of {snap}"));
            }
        }

        for cl in &label.clauses {
            let ok = cl.iter().any(|l| {
                label.has_unit(l)
                    && (!restricted || {
                        let c = comp.of(l);
                        label.clauses.iter().all(|other| !other.contains(&c) || label.has_clause(&other.without(&c)))
                    })
            });
            if !ok {
                report(3, vec![s], cl.to_string());
            }
        }

        for l in label.units() {
            match l {
                Literal::Forall(r, body) => {
                    for t2 in t.successors(r, s) {
                        if !t.labels[t2].has_set(body) {
                            report(4, vec![s, t2], l.to_string());
                        }
                    }
                    for e in label.units() {
                        if let Literal::Exists(q, body2) = e {
                            if q == r {
                                let merged = Literal::Exists(r.clone(), Arc::new(body.union(body2)));
                                if !label.has_unit(&merged) {
                                    report(6, vec![s], format!("{l} with {e}"));
                                }
                            }
                        }
                    }
                }
                Literal::Exists(r, body) if !t.successors(r, s).any(|t2| t.labels[t2].has_set(body)) => {
                    report(5, vec![s], l.to_string());
                }
                _ => {}
            }
        }
    }
    out
}

/// Build a tableau from the witness path of a satisfiable verdict.
pub fn extract_tableau(v: &Verdict) -> Result<CnfTableau, NotSatisfiable> {
    build(v, true)
}

/// The raw label construction along the witness path, optionally closed
/// under the merges and reductions the tableau conditions demand.
fn build(v: &Verdict, saturate: bool) -> Result<CnfTableau, NotSatisfiable> {
    let witness = v.witness.filter(|_| v.satisfiable).ok_or(NotSatisfiable)?;
    let path = v.tree.path_to(witness);
    let last = &v.tree.nodes[witness].family;
    let mut labels = vec![Label::default(); last.len()];
    for &node in &path {
        for (i, snap) in v.tree.nodes[node].family.members().enumerate() {
            for cl in snap.iter() {
                labels[i].insert_clause(cl.clone());
            }
            labels[i].insert_set(snap.clone());
        }
        if let Some(edge) = v.tree.edge_into(node) {
            let app = &edge.application;
            if matches!(app.rule, Rule::A2 | Rule::A2Plus) {
                if let Some(u) = &app.chosen_literal {
                    labels[app.member_index].insert_clause(Clause::unit(u.clone()));
                }
            }
        }
    }
    if saturate {
        let mut comp = Complements::default();
        for label in &mut labels {
            close(label, &mut comp);
        }
    }
    let mut role_edges: BTreeMap<Arc<str>, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for e in last.edges() {
        role_edges.entry(e.role.clone()).or_default().insert((e.parent, e.child));
    }
    Ok(CnfTableau { formula: v.tree.nodes[0].family.member(0).clone(), labels, role_edges, root: 0 })
}

/// Adds merged existential units for every universal/existential unit pair
/// on a role, and the reduct `CL \ {~L}` for every unit `{L}` and clause `CL`
/// holding its complement, until nothing changes.
fn close(label: &mut Label, comp: &mut Complements) {
    loop {
        let units: Vec<Literal> = label.units().cloned().collect();
        let mut new = Vec::new();
        for u in &units {
            if let Literal::Forall(r, f1) = u {
                for e in &units {
                    if let Literal::Exists(q, f2) = e {
                        if q == r {
                            new.push(Clause::unit(Literal::Exists(r.clone(), Arc::new(f1.union(f2)))));
                        }
                    }
                }
            }
            let c = comp.of(u);
            for cl in label.clauses.iter().filter(|cl| cl.len() >= 2 && cl.contains(&c)) {
                new.push(cl.without(&c));
            }
        }
        let mut changed = false;
        for cl in new {
            changed |= label.insert_clause(cl);
        }
        if !changed {
            return;
        }
    }
}

/// Names hold exactly at the individuals whose label has their positive
/// unit clause.
pub fn tableau_to_interpretation(t: &CnfTableau) -> Interpretation {
    let mut interp = Interpretation {
        domain: t.individuals().collect(),
        names: names(&t.formula).iter().map(|n| (n.to_string(), BTreeSet::new())).collect(),
        roles: rol(&t.formula).iter().map(|r| (r.to_string(), BTreeSet::new())).collect(),
    };
    for s in t.individuals() {
        for l in t.labels[s].units() {
            if let Literal::Pos(n) = l {
                interp.names.entry(n.to_string()).or_default().insert(s);
            }
        }
    }
    for (r, pairs) in &t.role_edges {
        interp.roles.entry(r.to_string()).or_default().extend(pairs.iter().copied());
    }
    interp
}
