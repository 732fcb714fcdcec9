//! Satisfiability of ALC concepts by rewriting clause sets.
//!
//! A concept is parsed ([`syntax`]), put into conjunctive normal form
//! ([`normal_form`]) and decided by a backtracking search over families of
//! clause sets ([`engine`]). A successful search yields a tableau and a
//! finite model ([`tableau`]). An independent textbook tableau
//! ([`oracle`]) and a random differential driver ([`harness`]) check the
//! whole pipeline.

pub mod clause_model;
pub mod engine;
pub mod harness;
pub mod normal_form;
pub mod oracle;
pub mod syntax;
pub mod tableau;

pub use clause_model::{Family, FamilyEdge};
pub use engine::{decide_sat, Limits, SearchConfig, Strategy, Verdict};
pub use normal_form::{to_cnf, Clause, ClauseSet, Literal};
pub use syntax::{parse_concept, parse_concept_file, Concept, SyntaxError};
pub use tableau::{eval_concept, Interpretation};
