//! Reference satisfiability procedure: a textbook ALC tableau working
//! directly on concepts. It has its own negation normal form and does not
//! touch the clause-set pipeline, so the two can be checked against each
//! other.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::syntax::Concept;
use crate::tableau::Interpretation;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Nnf {
    Atom(Arc<str>, bool),
    Top,
    Bottom,
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    All(Arc<str>, Box<Nnf>),
    Some(Arc<str>, Box<Nnf>),
}

fn nnf(c: &Concept, neg: bool) -> Nnf {
    match c {
        Concept::Name(n) => Nnf::Atom(n.clone(), !neg),
        Concept::Top => {
            if neg {
                Nnf::Bottom
            } else {
                Nnf::Top
            }
        }
        Concept::Bottom => {
            if neg {
                Nnf::Top
            } else {
                Nnf::Bottom
            }
        }
        Concept::Not(inner) => nnf(inner, !neg),
        Concept::And(a, b) if !neg => Nnf::And(Box::new(nnf(a, false)), Box::new(nnf(b, false))),
        Concept::And(a, b) => Nnf::Or(Box::new(nnf(a, true)), Box::new(nnf(b, true))),
        Concept::Or(a, b) if !neg => Nnf::Or(Box::new(nnf(a, false)), Box::new(nnf(b, false))),
        Concept::Or(a, b) => Nnf::And(Box::new(nnf(a, true)), Box::new(nnf(b, true))),
        Concept::Forall(r, inner) if !neg => Nnf::All(r.clone(), Box::new(nnf(inner, false))),
        Concept::Forall(r, inner) => Nnf::Some(r.clone(), Box::new(nnf(inner, true))),
        Concept::Exists(r, inner) if !neg => Nnf::Some(r.clone(), Box::new(nnf(inner, false))),
        Concept::Exists(r, inner) => Nnf::All(r.clone(), Box::new(nnf(inner, true))),
    }
}

/// One individual of an open branch: its atoms and its successor subtrees.
#[derive(Debug, Clone, Default)]
struct Node {
    atoms: BTreeSet<Arc<str>>,
    succ: Vec<(Arc<str>, Node)>,
}

#[derive(Clone, Default)]
struct Label<'a> {
    pos: BTreeSet<&'a Arc<str>>,
    neg: BTreeSet<&'a Arc<str>>,
    all: Vec<(&'a Arc<str>, &'a Nnf)>,
    some: Vec<(&'a Arc<str>, &'a Nnf)>,
}

fn solve<'a>(mut pending: Vec<&'a Nnf>, mut label: Label<'a>) -> Option<Node> {
    while let Some(c) = pending.pop() {
        match c {
            Nnf::Top => {}
            Nnf::Bottom => return None,
            Nnf::Atom(a, true) => {
                if label.neg.contains(a) {
                    return None;
                }
                label.pos.insert(a);
            }
            Nnf::Atom(a, false) => {
                if label.pos.contains(a) {
                    return None;
                }
                label.neg.insert(a);
            }
            Nnf::And(x, y) => {
                // y below x so x is handled first
                pending.push(y);
                pending.push(x);
            }
            Nnf::All(r, body) => label.all.push((r, body)),
            Nnf::Some(r, body) => label.some.push((r, body)),
            Nnf::Or(x, y) => {
                for branch in [x, y] {
                    let mut p = pending.clone();
                    p.push(branch);
                    if let Some(node) = solve(p, label.clone()) {
                        return Some(node);
                    }
                }
                return None;
            }
        }
    }
    let mut node = Node { atoms: label.pos.iter().map(|a| (*a).clone()).collect(), succ: Vec::new() };
    for (r, body) in &label.some {
        let mut child: Vec<&Nnf> = label.all.iter().filter(|(q, _)| q == r).map(|(_, d)| *d).collect();
        child.reverse();
        child.push(body);
        node.succ.push(((*r).clone(), solve(child, Label::default())?));
    }
    Some(node)
}

fn flatten(node: &Node, interp: &mut Interpretation) -> usize {
    let me = interp.domain.len();
    interp.domain.push(me);
    for a in &node.atoms {
        interp.names.entry(a.to_string()).or_default().insert(me);
    }
    for (r, child) in &node.succ {
        let c = flatten(child, interp);
        interp.roles.entry(r.to_string()).or_default().insert((me, c));
    }
    me
}

fn collect_symbols(c: &Concept, names: &mut BTreeSet<String>, roles: &mut BTreeSet<String>) {
    match c {
        Concept::Name(n) => {
            names.insert(n.to_string());
        }
        Concept::Top | Concept::Bottom => {}
        Concept::Not(x) => collect_symbols(x, names, roles),
        Concept::And(a, b) | Concept::Or(a, b) => {
            collect_symbols(a, names, roles);
            collect_symbols(b, names, roles);
        }
        Concept::Forall(r, x) | Concept::Exists(r, x) => {
            roles.insert(r.to_string());
            collect_symbols(x, names, roles);
        }
    }
}

/// A tree model of `c` rooted at individual 0, or `None` when `c` is
/// unsatisfiable. Disjunctions are tried left branch first.
pub fn oracle_model(c: &Concept) -> Option<Interpretation> {
    let root = nnf(c, false);
    let tree = solve(vec![&root], Label::default())?;
    let mut names = BTreeSet::new();
    let mut roles = BTreeSet::new();
    collect_symbols(c, &mut names, &mut roles);
    let mut interp = Interpretation {
        domain: Vec::new(),
        names: names.into_iter().map(|n| (n, BTreeSet::new())).collect::<BTreeMap<_, _>>(),
        roles: roles.into_iter().map(|r| (r, BTreeSet::new())).collect::<BTreeMap<_, _>>(),
    };
    flatten(&tree, &mut interp);
    Some(interp)
}

/// Whether `c` has a model.
pub fn oracle_sat(c: &Concept) -> bool {
    let root = nnf(c, false);
    solve(vec![&root], Label::default()).is_some()
}

/// Whether `a` and `b` denote the same set in every interpretation.
pub fn oracle_equiv(a: &Concept, b: &Concept) -> bool {
    !oracle_sat(&Concept::and(a.clone(), Concept::not(b.clone())))
        && !oracle_sat(&Concept::and(Concept::not(a.clone()), b.clone()))
}
