//! Random concept generation and the differential driver that runs the
//! oracle and both rule systems side by side.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{decide_sat, Limits, Strategy, Verdict};
use crate::normal_form::to_cnf;
use crate::oracle::oracle_sat;
use crate::syntax::Concept;
use crate::tableau::{eval_concept, extract_tableau, tableau_to_interpretation};

/// Relative draw weights per constructor. A negated name drawn at the
/// bottom level counts as a leaf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub name: u32,
    pub top: u32,
    pub bottom: u32,
    pub not: u32,
    pub and: u32,
    pub or: u32,
    pub forall: u32,
    pub exists: u32,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { name: 1, top: 1, bottom: 1, not: 1, and: 1, or: 1, forall: 1, exists: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Constructor levels; a leaf or negated leaf is one level.
    pub max_depth: usize,
    pub num_names: usize,
    pub num_roles: usize,
    pub weights: Weights,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 3, num_names: 4, num_roles: 2, weights: Weights::default(), seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("max_depth must be at least 1")]
    ZeroDepth,
    #[error("num_names must be at least 1")]
    NoNames,
    #[error("at least one constructor weight must be positive")]
    ZeroWeights,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let w = &self.weights;
        if self.max_depth == 0 {
            Err(ConfigError::ZeroDepth)
        } else if self.num_names == 0 {
            Err(ConfigError::NoNames)
        } else if [w.name, w.top, w.bottom, w.not, w.and, w.or, w.forall, w.exists].iter().all(|&x| x == 0) {
            Err(ConfigError::ZeroWeights)
        } else {
            Ok(())
        }
    }

    /// The generator for trial `trial`: one ChaCha stream per trial under
    /// the shared seed.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

pub fn name_for(i: usize) -> String {
    match i {
        0..=7 => ((b'A' + i as u8) as char).to_string(),
        _ => format!("N{i}"),
    }
}

pub fn role_for(i: usize) -> String {
    match i {
        0..=3 => ["R", "S", "T", "U"][i].to_string(),
        _ => format!("R{i}"),
    }
}

#[derive(Clone, Copy)]
enum Ctor {
    Name,
    NegName,
    Top,
    Bottom,
    Not,
    And,
    Or,
    Forall,
    Exists,
}

/// Draw a concept within the bounds of `cfg`.
pub fn gen_concept<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Concept {
    gen(cfg, rng, cfg.max_depth.max(1))
}

fn gen<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R, depth: usize) -> Concept {
    let w = &cfg.weights;
    let mut options = vec![(Ctor::Name, w.name), (Ctor::Top, w.top), (Ctor::Bottom, w.bottom)];
    if depth == 1 {
        options.push((Ctor::NegName, w.not));
    } else {
        options.extend([(Ctor::Not, w.not), (Ctor::And, w.and), (Ctor::Or, w.or)]);
        if cfg.num_roles > 0 {
            options.extend([(Ctor::Forall, w.forall), (Ctor::Exists, w.exists)]);
        }
    }
    let ctor = match WeightedIndex::new(options.iter().map(|o| o.1)) {
        Ok(dist) => options[dist.sample(rng)].0,
        Err(_) => Ctor::Name,
    };
    let name = |rng: &mut R| Concept::name(&name_for(rng.gen_range(0..cfg.num_names.max(1))));
    match ctor {
        Ctor::Name => name(rng),
        Ctor::NegName => Concept::not(name(rng)),
        Ctor::Top => Concept::Top,
        Ctor::Bottom => Concept::Bottom,
        Ctor::Not => Concept::not(gen(cfg, rng, depth - 1)),
        Ctor::And => {
            let a = gen(cfg, rng, depth - 1);
            Concept::and(a, gen(cfg, rng, depth - 1))
        }
        Ctor::Or => {
            let a = gen(cfg, rng, depth - 1);
            Concept::or(a, gen(cfg, rng, depth - 1))
        }
        Ctor::Forall | Ctor::Exists => {
            let role = role_for(rng.gen_range(0..cfg.num_roles));
            let body = gen(cfg, rng, depth - 1);
            if matches!(ctor, Ctor::Forall) {
                Concept::forall(&role, body)
            } else {
                Concept::exists(&role, body)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    pub runs: usize,
    pub total: usize,
    pub max: usize,
    pub mean: f64,
}

impl NodeStats {
    fn add(&mut self, nodes: usize) {
        self.runs += 1;
        self.total += nodes;
        self.max = self.max.max(nodes);
        self.mean = self.total as f64 / self.runs as f64;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeSummary {
    pub basic: NodeStats,
    pub plus: NodeStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub trial: u64,
    pub concept: String,
    pub oracle: bool,
    /// `None` when the run hit the node limit.
    pub basic: Option<bool>,
    pub plus: Option<bool>,
    pub reason: String,
    pub shrunk: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub concept: String,
    pub oracle: bool,
    pub basic_nodes: Option<usize>,
    pub plus_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub trials: u64,
    pub disagreements: Vec<Disagreement>,
    pub nodes: NodeSummary,
    pub seed: u64,
    pub sat: u64,
    pub unsat: u64,
    pub log: Vec<TrialRecord>,
}

/// Everything one trial produced.
pub struct TrialOutcome {
    pub concept: Concept,
    pub oracle: bool,
    pub basic: Option<Verdict>,
    pub plus: Option<Verdict>,
}

impl TrialOutcome {
    pub fn run(concept: Concept) -> TrialOutcome {
        let f = to_cnf(&concept);
        let oracle = oracle_sat(&concept);
        let basic = decide_sat(&f, Strategy::Basic, Limits::default()).ok();
        let plus = decide_sat(&f, Strategy::Plus, Limits::default()).ok();
        TrialOutcome { concept, oracle, basic, plus }
    }

    /// The first problem with this trial, if any.
    pub fn problem(&self) -> Option<String> {
        for (label, v) in [("basic", &self.basic), ("plus", &self.plus)] {
            let Some(v) = v else {
                return Some(format!("{label} hit the node limit"));
            };
            if v.satisfiable != self.oracle {
                return Some(format!(
                    "{label} says {}, oracle says {}",
                    sat_word(v.satisfiable),
                    sat_word(self.oracle)
                ));
            }
            if v.satisfiable {
                let model = extract_tableau(v).map(|t| tableau_to_interpretation(&t));
                if !model.is_ok_and(|m| eval_concept(&self.concept, &m, 0)) {
                    return Some(format!("{label} model does not satisfy the concept"));
                }
            }
        }
        None
    }
}

fn sat_word(b: bool) -> &'static str {
    if b {
        "SAT"
    } else {
        "UNSAT"
    }
}

/// Run `trials` generated concepts through all three deciders.
pub fn run_differential(cfg: &GenConfig, trials: u64) -> Report {
    run_differential_with(cfg, trials, &[])
}

/// As [`run_differential`], with `injected[k]` used in place of the
/// generated concept for trial `k`.
pub fn run_differential_with(cfg: &GenConfig, trials: u64, injected: &[Concept]) -> Report {
    let mut report = Report {
        trials,
        disagreements: Vec::new(),
        nodes: NodeSummary::default(),
        seed: cfg.seed,
        sat: 0,
        unsat: 0,
        log: Vec::new(),
    };
    for trial in 0..trials {
        let concept = match injected.get(trial as usize) {
            Some(c) => c.clone(),
            None => gen_concept(cfg, &mut cfg.trial_rng(trial)),
        };
        let out = TrialOutcome::run(concept);
        if out.oracle {
            report.sat += 1;
        } else {
            report.unsat += 1;
        }
        let basic_nodes = out.basic.as_ref().map(|v| v.stats.nodes_expanded);
        let plus_nodes = out.plus.as_ref().map(|v| v.stats.nodes_expanded);
        if let Some(n) = basic_nodes {
            report.nodes.basic.add(n);
        }
        if let Some(n) = plus_nodes {
            report.nodes.plus.add(n);
        }
        if let Some(reason) = out.problem() {
            let shrunk = shrink(&out.concept, |c| TrialOutcome::run(c.clone()).problem().is_some());
            report.disagreements.push(Disagreement {
                trial,
                concept: out.concept.to_string(),
                oracle: out.oracle,
                basic: out.basic.as_ref().map(|v| v.satisfiable),
                plus: out.plus.as_ref().map(|v| v.satisfiable),
                reason,
                shrunk: shrunk.to_string(),
            });
        }
        report.log.push(TrialRecord {
            trial,
            concept: out.concept.to_string(),
            oracle: out.oracle,
            basic_nodes,
            plus_nodes,
        });
    }
    report
}

/// Greedily replace subterms by smaller ones (a child, top, bottom or a
/// name already in the concept) while `failing` still holds.
pub fn shrink(c: &Concept, mut failing: impl FnMut(&Concept) -> bool) -> Concept {
    let mut leaves = vec![Concept::Top, Concept::Bottom];
    collect_names(c, &mut leaves);
    let mut cur = c.clone();
    'outer: loop {
        for cand in simplifications(&cur, &leaves) {
            if failing(&cand) {
                cur = cand;
                continue 'outer;
            }
        }
        return cur;
    }
}

fn collect_names(c: &Concept, out: &mut Vec<Concept>) {
    match c {
        Concept::Name(_) => {
            if !out.contains(c) {
                out.push(c.clone());
            }
        }
        Concept::Top | Concept::Bottom => {}
        Concept::Not(x) | Concept::Forall(_, x) | Concept::Exists(_, x) => collect_names(x, out),
        Concept::And(a, b) | Concept::Or(a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
    }
}

/// One-step rewrites of `c` that are strictly smaller.
fn simplifications(c: &Concept, leaves: &[Concept]) -> Vec<Concept> {
    let mut out: Vec<Concept> = Vec::new();
    if c.size() > 1 {
        out.extend(leaves.iter().cloned());
    }
    match c {
        Concept::Name(_) | Concept::Top | Concept::Bottom => {}
        Concept::Not(x) => {
            out.push((**x).clone());
            out.extend(simplifications(x, leaves).into_iter().map(Concept::not));
        }
        Concept::Forall(r, x) | Concept::Exists(r, x) => {
            out.push((**x).clone());
            let wrap = |y: Concept| match c {
                Concept::Forall(..) => Concept::Forall(r.clone(), Box::new(y)),
                _ => Concept::Exists(r.clone(), Box::new(y)),
            };
            out.extend(simplifications(x, leaves).into_iter().map(wrap));
        }
        Concept::And(a, b) | Concept::Or(a, b) => {
            out.push((**a).clone());
            out.push((**b).clone());
            let join = |x: Concept, y: Concept| match c {
                Concept::And(..) => Concept::and(x, y),
                _ => Concept::or(x, y),
            };
            out.extend(simplifications(a, leaves).into_iter().map(|x| join(x, (**b).clone())));
            out.extend(simplifications(b, leaves).into_iter().map(|y| join((**a).clone(), y)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::tests::EXAMPLE_F;
    use crate::syntax::parse_concept;

    /// Constructor levels as the generator counts them.
    fn levels(c: &Concept) -> usize {
        match c {
            Concept::Name(_) | Concept::Top | Concept::Bottom => 1,
            Concept::Not(x) if matches!(**x, Concept::Name(_)) => 1,
            Concept::Not(x) | Concept::Forall(_, x) | Concept::Exists(_, x) => 1 + levels(x),
            Concept::And(a, b) | Concept::Or(a, b) => 1 + levels(a).max(levels(b)),
        }
    }

    #[test]
    fn depth_one_draws_leaves() {
        let cfg = GenConfig { max_depth: 1, num_names: 1, ..GenConfig::default() };
        let allowed = ["A", "!A", "top", "bot"].map(|s| parse_concept(s).unwrap());
        let mut seen = std::collections::BTreeSet::new();
        for t in 0..200 {
            let c = gen_concept(&cfg, &mut cfg.trial_rng(t));
            assert!(allowed.contains(&c), "{c}");
            seen.insert(c.to_string());
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenConfig { seed: 99, ..GenConfig::default() };
        for t in 0..20 {
            assert_eq!(gen_concept(&cfg, &mut cfg.trial_rng(t)), gen_concept(&cfg, &mut cfg.trial_rng(t)));
        }
        let a: Vec<Concept> = (0..20).map(|t| gen_concept(&cfg, &mut cfg.trial_rng(t))).collect();
        let other = GenConfig { seed: 100, ..cfg };
        let b: Vec<Concept> = (0..20).map(|t| gen_concept(&other, &mut other.trial_rng(t))).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn bounds_respected() {
        let cfg = GenConfig { max_depth: 4, num_names: 2, num_roles: 0, seed: 3, ..GenConfig::default() };
        for t in 0..300 {
            let c = gen_concept(&cfg, &mut cfg.trial_rng(t));
            assert!(!c.has_quantifier());
            assert!(levels(&c) <= 4);
            let mut names = Vec::new();
            collect_names(&c, &mut names);
            assert!(names.iter().all(|n| *n == Concept::name("A") || *n == Concept::name("B")));
        }
    }

    #[test]
    fn config_validation() {
        assert_eq!(GenConfig::default().validate(), Ok(()));
        assert_eq!(GenConfig { max_depth: 0, ..GenConfig::default() }.validate(), Err(ConfigError::ZeroDepth));
        assert_eq!(GenConfig { num_names: 0, ..GenConfig::default() }.validate(), Err(ConfigError::NoNames));
        let zero = Weights { name: 0, top: 0, bottom: 0, not: 0, and: 0, or: 0, forall: 0, exists: 0 };
        assert_eq!(GenConfig { weights: zero, ..GenConfig::default() }.validate(), Err(ConfigError::ZeroWeights));
    }

    #[test]
    fn only_quantifier_weights_without_roles_falls_back_to_names() {
        let w = Weights { name: 0, top: 0, bottom: 0, not: 0, and: 0, or: 0, forall: 1, exists: 1 };
        let cfg = GenConfig { num_roles: 0, weights: w, ..GenConfig::default() };
        let c = gen_concept(&cfg, &mut cfg.trial_rng(0));
        assert!(matches!(c, Concept::Name(_)));
    }

    #[test]
    fn names_and_roles() {
        assert_eq!(name_for(0), "A");
        assert_eq!(name_for(7), "H");
        assert_eq!(name_for(8), "N8");
        assert_eq!(role_for(1), "S");
        assert_eq!(role_for(4), "R4");
    }

    #[test]
    fn injected_example_node_counts() {
        let report = run_differential_with(&GenConfig::default(), 1, &[parse_concept(EXAMPLE_F).unwrap()]);
        assert!(report.disagreements.is_empty());
        assert_eq!(report.log[0].basic_nodes, Some(11));
        assert_eq!(report.log[0].plus_nodes, Some(8));
    }

    #[test]
    fn contradiction_trial() {
        let report = run_differential_with(&GenConfig::default(), 1, &[parse_concept("A & !A").unwrap()]);
        assert_eq!(report.unsat, 1);
        assert!(report.disagreements.is_empty());
        assert_eq!(report.nodes.basic.total, 1);
    }

    #[test]
    fn differential_batch() {
        let cfg = GenConfig { seed: 11, ..GenConfig::default() };
        let report = run_differential(&cfg, 150);
        assert_eq!(report.disagreements, vec![]);
        assert_eq!(report.sat + report.unsat, 150);
        assert!(report.nodes.plus.mean <= report.nodes.basic.mean);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["trials"], 150);
        assert_eq!(json["seed"], 11);
        assert!(json["nodes"]["basic"]["mean"].is_number());
    }

    #[test]
    fn shrinking_keeps_the_predicate() {
        let c = parse_concept("(A | exists R.(B & C)) & !(D & forall S.B)").unwrap();
        // stand-in failure: mentions B under some quantifier
        let pred = |x: &Concept| x.has_quantifier() && x.to_string().contains('B');
        let small = shrink(&c, pred);
        assert!(pred(&small));
        assert!(small.size() <= 3, "{small}");

        let unsat = parse_concept("(A | B) & !A & !B & exists R.C").unwrap();
        let small = shrink(&unsat, |x| !oracle_sat(x));
        assert_eq!(small, Concept::Bottom);
    }
}
