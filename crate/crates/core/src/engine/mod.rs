//! The decision procedure over families of clause sets.

pub mod measure;
pub mod rules;
pub mod search;
pub mod trace;

pub use measure::Measure;
pub use rules::{
    apply_a1, apply_a1_plus, apply_a2, apply_a2_plus, apply_a3, is_clash, is_clash_with, is_complete,
    PreconditionViolation, Rule, Strategy,
};
pub use search::{
    decide_family, decide_sat, decide_with, family_clash, next_applications, DerivationTree, EngineError, Limits,
    RuleApplication, SearchConfig, Stats, TreeEdge, TreeNode, Verdict,
};
pub use trace::{ReplayError, Trace, TraceEdge, TraceVerdict};
