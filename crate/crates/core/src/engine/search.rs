use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::measure::Measure;
use super::rules::{
    apply_a1, apply_a1_plus, apply_a2, apply_a2_plus, apply_a3, is_clash_with, PreconditionViolation, Rule, Strategy,
};
use crate::clause_model::Family;
use crate::normal_form::{Clause, ClauseSet, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub max_nodes: usize,
    /// Let the basic system also branch on universals inside non-unit
    /// clauses. Ignored by the optimized system, whose A2+ only fires on
    /// all-unit clause sets.
    pub a2_anywhere: bool,
    /// Detect complementary quantified unit pairs as clashes.
    pub eager_role_clash: bool,
    /// Check that the termination measure drops on every step.
    pub check_measure: bool,
}

impl SearchConfig {
    pub fn new(strategy: Strategy) -> SearchConfig {
        SearchConfig { strategy, ..SearchConfig::default() }
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Plus,
            max_nodes: Limits::default().max_nodes,
            a2_anywhere: false,
            eager_role_clash: true,
            check_measure: cfg!(debug_assertions),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleApplication {
    pub rule: Rule,
    pub member_index: usize,
    pub target_clause: Clause,
    pub chosen_literal: Option<Literal>,
}

impl RuleApplication {
    /// Apply to `fam`, checking every precondition.
    pub fn apply(&self, fam: &Family) -> Result<Family, PreconditionViolation> {
        let i = self.member_index;
        if i >= fam.len() {
            return Err(PreconditionViolation::NoSuchMember(i));
        }
        let f = fam.member(i);
        let lit = || {
            self.chosen_literal
                .as_ref()
                .ok_or_else(|| PreconditionViolation::NotUniversalUnit(self.target_clause.clone()))
        };
        let next = match self.rule {
            Rule::A1 => apply_a1(f, &self.target_clause, lit()?)?,
            Rule::A1Plus => apply_a1_plus(f, &self.target_clause, lit()?)?,
            Rule::A2 => {
                let u = lit()?;
                if !self.target_clause.contains(u) || !f.contains(&self.target_clause) {
                    return Err(PreconditionViolation::ClauseNotPresent(self.target_clause.clone()));
                }
                apply_a2(f, u)?
            }
            Rule::A2Plus => {
                if self.chosen_literal.as_ref() != self.target_clause.as_unit() {
                    return Err(PreconditionViolation::NotUniversalUnit(self.target_clause.clone()));
                }
                apply_a2_plus(f, &self.target_clause)?
            }
            Rule::A3 => return apply_a3(fam, i, &self.target_clause),
        };
        Ok(fam.with_member(i, next))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub family: Family,
    pub parent: Option<usize>,
    pub depth: usize,
    pub clash: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub from: usize,
    pub application: RuleApplication,
    pub to: usize,
}

/// Every family the search created, in creation order. Node 0 is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTree {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<TreeEdge>,
}

impl DerivationTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn clash_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].clash).collect()
    }

    /// The edge that created `node`; nodes are created by exactly one edge.
    pub fn edge_into(&self, node: usize) -> Option<&TreeEdge> {
        self.edges.iter().find(|e| e.to == node)
    }

    pub fn children(&self, node: usize) -> impl Iterator<Item = &TreeEdge> + '_ {
        self.edges.iter().filter(move |e| e.from == node)
    }

    /// Node indices from the root down to `node`.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Families created, root included.
    pub nodes_expanded: usize,
    pub clashes: usize,
    pub max_depth: usize,
    pub measure_checks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub strategy: Strategy,
    pub satisfiable: bool,
    pub witness: Option<usize>,
    pub tree: DerivationTree,
    pub stats: Stats,
}

impl Verdict {
    pub fn witness_family(&self) -> Option<&Family> {
        self.witness.map(|w| &self.tree.nodes[w].family)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("node limit of {limit} reached")]
    ResourceLimit { limit: usize, partial: Box<DerivationTree>, stats: Stats },
    #[error("termination measure did not decrease at node {node} ({rule})")]
    MeasureNotDecreasing { node: usize, rule: Rule },
    #[error("rule precondition failed: {0}")]
    Precondition(#[from] PreconditionViolation),
}

/// The rule applications the schedule offers at `fam`, all on the same
/// member. More than one entry means a branch point. `None` when the family
/// is complete.
pub fn next_applications(fam: &Family, cfg: &SearchConfig) -> Option<Vec<RuleApplication>> {
    let basic = cfg.strategy == Strategy::Basic;
    for (m, f) in fam.members().enumerate() {
        if let Some(cl) = f.iter().find(|c| c.len() >= 2) {
            let rule = if basic { Rule::A1 } else { Rule::A1Plus };
            let mut alts: Vec<RuleApplication> = cl
                .iter()
                .map(|l| RuleApplication {
                    rule,
                    member_index: m,
                    target_clause: cl.clone(),
                    chosen_literal: Some(l.clone()),
                })
                .collect();
            if basic && cfg.a2_anywhere {
                let mut seen: Vec<&Literal> = Vec::new();
                for c in f.iter().filter(|c| c.len() >= 2) {
                    for l in c.iter().filter(|l| l.is_forall()) {
                        if !seen.contains(&l) {
                            seen.push(l);
                            alts.push(RuleApplication {
                                rule: Rule::A2,
                                member_index: m,
                                target_clause: c.clone(),
                                chosen_literal: Some(l.clone()),
                            });
                        }
                    }
                }
            }
            return Some(alts);
        }
        if let Some(u) = f.iter().find(|c| c.as_unit().is_some_and(Literal::is_forall)) {
            let rule = if basic { Rule::A2 } else { Rule::A2Plus };
            return Some(vec![RuleApplication {
                rule,
                member_index: m,
                target_clause: u.clone(),
                chosen_literal: u.as_unit().cloned(),
            }]);
        }
        if let Some(e) = f.iter().find(|c| c.as_unit().is_some_and(Literal::is_exists)) {
            return Some(vec![RuleApplication {
                rule: Rule::A3,
                member_index: m,
                target_clause: e.clone(),
                chosen_literal: None,
            }]);
        }
    }
    None
}

/// Whether any member of `fam` clashes.
pub fn family_clash(fam: &Family, eager_roles: bool) -> bool {
    fam.members().any(|f| is_clash_with(f, eager_roles))
}

/// Decide satisfiability of `f` with default settings for everything but
/// the strategy and node limit.
pub fn decide_sat(f: &ClauseSet, strategy: Strategy, limits: Limits) -> Result<Verdict, EngineError> {
    let cfg = SearchConfig { strategy, max_nodes: limits.max_nodes, ..SearchConfig::default() };
    decide_family(Family::new(f.clone()), &cfg)
}

pub fn decide_with(f: &ClauseSet, cfg: &SearchConfig) -> Result<Verdict, EngineError> {
    decide_family(Family::new(f.clone()), cfg)
}

struct Frame {
    node: usize,
    alts: Vec<RuleApplication>,
    next: usize,
    measure: Option<Measure>,
}

/// Depth-first search from an arbitrary starting family.
///
/// Children of a branch point are created one at a time, so the tree holds
/// exactly the families the search visited, numbered in visit order.
pub fn decide_family(root: Family, cfg: &SearchConfig) -> Result<Verdict, EngineError> {
    let mut tree = DerivationTree::default();
    let mut stats = Stats { nodes_expanded: 1, ..Stats::default() };
    let root_clash = family_clash(&root, cfg.eager_role_clash);
    tree.nodes.push(TreeNode { family: root, parent: None, depth: 0, clash: root_clash });
    let done = |tree: DerivationTree, stats: Stats, witness: Option<usize>| Verdict {
        strategy: cfg.strategy,
        satisfiable: witness.is_some(),
        witness,
        tree,
        stats,
    };
    if root_clash {
        stats.clashes = 1;
        return Ok(done(tree, stats, None));
    }
    let mut stack = Vec::new();
    match next_applications(&tree.nodes[0].family, cfg) {
        None => return Ok(done(tree, stats, Some(0))),
        Some(alts) => stack.push(frame(0, alts, &tree, cfg)),
    }

    while let Some(top) = stack.last_mut() {
        if top.next >= top.alts.len() {
            stack.pop();
            continue;
        }
        let app = top.alts[top.next].clone();
        top.next += 1;
        let parent = top.node;
        let parent_measure = top.measure.clone();

        if stats.nodes_expanded >= cfg.max_nodes {
            return Err(EngineError::ResourceLimit { limit: cfg.max_nodes, partial: Box::new(tree), stats });
        }
        let child = app.apply(&tree.nodes[parent].family)?;
        let id = tree.nodes.len();
        if let Some(before) = parent_measure {
            stats.measure_checks += 1;
            if !Measure::of(&child).less_than(&before) {
                return Err(EngineError::MeasureNotDecreasing { node: id, rule: app.rule });
            }
        }
        // only the rewritten member and a member added by A3 can be new
        let clash = is_clash_with(child.member(app.member_index), cfg.eager_role_clash)
            || (app.rule == Rule::A3 && is_clash_with(child.member(child.len() - 1), cfg.eager_role_clash));
        let depth = tree.nodes[parent].depth + 1;
        stats.nodes_expanded += 1;
        stats.max_depth = stats.max_depth.max(depth);
        tree.nodes.push(TreeNode { family: child, parent: Some(parent), depth, clash });
        tree.edges.push(TreeEdge { from: parent, application: app, to: id });
        if clash {
            stats.clashes += 1;
            continue;
        }
        match next_applications(&tree.nodes[id].family, cfg) {
            None => return Ok(done(tree, stats, Some(id))),
            Some(alts) => stack.push(frame(id, alts, &tree, cfg)),
        }
    }
    Ok(done(tree, stats, None))
}

fn frame(node: usize, alts: Vec<RuleApplication>, tree: &DerivationTree, cfg: &SearchConfig) -> Frame {
    let measure = cfg.check_measure.then(|| Measure::of(&tree.nodes[node].family));
    Frame { node, alts, next: 0, measure }
}
