//! Trace files: a derivation tree plus the settings that produced it, as
//! JSON or Graphviz DOT, and an independent replay check.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rules::{is_complete, Rule, Strategy};
use super::search::{family_clash, next_applications, DerivationTree, RuleApplication, SearchConfig, Verdict};
use crate::clause_model::{Family, FamilyError};
use crate::normal_form::{Clause, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEdge {
    pub from: usize,
    pub rule: Rule,
    pub member: usize,
    pub clause: Clause,
    pub literal: Option<Literal>,
    pub to: usize,
}

impl TraceEdge {
    fn application(&self) -> RuleApplication {
        RuleApplication {
            rule: self.rule,
            member_index: self.member,
            target_clause: self.clause.clone(),
            chosen_literal: self.literal.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceVerdict {
    Sat,
    Unsat,
    /// The node limit stopped the search.
    Unknown,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub strategy: Strategy,
    pub verdict: TraceVerdict,
    #[serde(default)]
    pub a2_anywhere: bool,
    #[serde(default = "yes")]
    pub eager_role_clash: bool,
    pub nodes: Vec<Family>,
    pub edges: Vec<TraceEdge>,
    pub clash_nodes: Vec<usize>,
    #[serde(default)]
    pub witness: Option<usize>,
}

impl Trace {
    pub fn from_verdict(v: &Verdict, cfg: &SearchConfig) -> Trace {
        let verdict = if v.satisfiable { TraceVerdict::Sat } else { TraceVerdict::Unsat };
        Trace { witness: v.witness, ..Trace::from_tree(&v.tree, cfg, verdict) }
    }

    pub fn from_tree(tree: &DerivationTree, cfg: &SearchConfig, verdict: TraceVerdict) -> Trace {
        Trace {
            strategy: cfg.strategy,
            verdict,
            a2_anywhere: cfg.a2_anywhere,
            eager_role_clash: cfg.eager_role_clash,
            nodes: tree.nodes.iter().map(|n| n.family.clone()).collect(),
            edges: tree
                .edges
                .iter()
                .map(|e| TraceEdge {
                    from: e.from,
                    rule: e.application.rule,
                    member: e.application.member_index,
                    clause: e.application.target_clause.clone(),
                    literal: e.application.chosen_literal.clone(),
                    to: e.to,
                })
                .collect(),
            clash_nodes: tree.clash_nodes(),
            witness: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Trace, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_dot(&self) -> String {
        let clashes: BTreeSet<usize> = self.clash_nodes.iter().copied().collect();
        let mut out = String::from("digraph derivation {\n  node [shape=box, fontname=\"monospace\"];\n");
        for i in 0..self.nodes.len() {
            let tip = escape(&self.nodes[i].to_string());
            if clashes.contains(&i) {
                let _ = writeln!(out, "  n{i} [label=\"S{i}\\nclash\", color=red, tooltip=\"{tip}\"];");
            } else if self.witness == Some(i) {
                let _ = writeln!(out, "  n{i} [label=\"S{i}\\nSAT\", peripheries=2, tooltip=\"{tip}\"];");
            } else {
                let _ = writeln!(out, "  n{i} [label=\"S{i}\", tooltip=\"{tip}\"];");
            }
        }
        for e in &self.edges {
            let target = match &e.literal {
                Some(l) if e.rule != Rule::A3 => l.to_string(),
                _ => e.clause.as_unit().map_or_else(|| e.clause.to_string(), ToString::to_string),
            };
            let at = if e.member > 0 { format!(" @{}", e.member) } else { String::new() };
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}{} {}\"];", e.from, e.to, e.rule, at, escape(&target));
        }
        out.push_str("}\n");
        out
    }

    /// Re-derive every node from its parent and check the trace is a
    /// faithful run of the search schedule. Returns the verdict it proves.
    pub fn replay(&self) -> Result<bool, ReplayError> {
        let n = self.nodes.len();
        let root = self.nodes.first().ok_or(ReplayError::NoNodes)?;
        if root.len() != 1 {
            return Err(ReplayError::RootMembers(root.len()));
        }
        for (i, fam) in self.nodes.iter().enumerate() {
            fam.validate().map_err(|e| ReplayError::BadFamily(i, e))?;
        }
        let cfg = SearchConfig {
            strategy: self.strategy,
            a2_anywhere: self.a2_anywhere,
            eager_role_clash: self.eager_role_clash,
            ..SearchConfig::default()
        };

        let mut incoming = vec![0usize; n];
        let mut children: Vec<Vec<&TraceEdge>> = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            if e.from >= n || e.to >= n || e.from >= e.to {
                return Err(ReplayError::BadEdge(k));
            }
            incoming[e.to] += 1;
            children[e.from].push(e);
        }
        if let Some(i) = (1..n).find(|&i| incoming[i] != 1) {
            return Err(ReplayError::Orphan(i));
        }
        for (k, e) in self.edges.iter().enumerate() {
            let derived =
                e.application().apply(&self.nodes[e.from]).map_err(|err| ReplayError::Rule(k, err.to_string()))?;
            if derived != self.nodes[e.to] {
                return Err(ReplayError::Mismatch(k));
            }
        }

        let clashes: Vec<usize> = (0..n).filter(|&i| family_clash(&self.nodes[i], cfg.eager_role_clash)).collect();
        if clashes != self.clash_nodes {
            return Err(ReplayError::ClashNodes { recorded: self.clash_nodes.clone(), actual: clashes });
        }

        let mut open_complete = Vec::new();
        for (i, kids) in children.iter_mut().enumerate() {
            kids.sort_by_key(|e| e.to);
            let clash = self.clash_nodes.binary_search(&i).is_ok();
            if clash {
                if !kids.is_empty() {
                    return Err(ReplayError::ExpandedClash(i));
                }
                continue;
            }
            let offered = next_applications(&self.nodes[i], &cfg).unwrap_or_default();
            if offered.is_empty() {
                open_complete.push(i);
            }
            if kids.len() > offered.len() || kids.iter().zip(&offered).any(|(e, a)| e.application() != *a) {
                return Err(ReplayError::OffSchedule(i));
            }
            if self.verdict == TraceVerdict::Unsat && kids.len() != offered.len() {
                return Err(ReplayError::Unexplored(i));
            }
        }

        match self.verdict {
            TraceVerdict::Sat => {
                let w = self.witness.or_else(|| open_complete.first().copied()).ok_or(ReplayError::NoWitness)?;
                if w >= n || !open_complete.contains(&w) || !is_complete(&self.nodes[w], self.strategy) {
                    return Err(ReplayError::NoWitness);
                }
                Ok(true)
            }
            TraceVerdict::Unsat => {
                if let Some(&i) = open_complete.first() {
                    return Err(ReplayError::OpenLeaf(i));
                }
                Ok(false)
            }
            TraceVerdict::Unknown => Err(ReplayError::Inconclusive),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("trace has no nodes")]
    NoNodes,
    #[error("root family has {0} members, expected 1")]
    RootMembers(usize),
    #[error("node {0}: {1}")]
    BadFamily(usize, FamilyError),
    #[error("edge {0} does not point from an existing node to a later one")]
    BadEdge(usize),
    #[error("node {0} does not have exactly one incoming edge")]
    Orphan(usize),
    #[error("edge {0} cannot be applied: {1}")]
    Rule(usize, String),
    #[error("edge {0} does not produce the recorded child family")]
    Mismatch(usize),
    #[error("recorded clash nodes {recorded:?} differ from recomputed {actual:?}")]
    ClashNodes { recorded: Vec<usize>, actual: Vec<usize> },
    #[error("clash node {0} has children")]
    ExpandedClash(usize),
    #[error("children of node {0} do not follow the search schedule")]
    OffSchedule(usize),
    #[error("node {0} has unexplored alternatives in an unsat trace")]
    Unexplored(usize),
    #[error("node {0} is complete and clash-free in an unsat trace")]
    OpenLeaf(usize),
    #[error("sat trace has no complete clash-free witness")]
    NoWitness,
    #[error("trace records an interrupted search")]
    Inconclusive,
}
