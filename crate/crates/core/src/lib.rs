//! Infinitary term graph rewriting.
//!
//! Term graphs ([`TermGraph`]) with a canonical form, the simple partial
//! order and metric on them, graph rewriting with reduction contexts, and
//! convergence analysis of reduction prefixes under the weak and strong,
//! metric and partial-order disciplines. A small term rewriting engine in
//! [`terms`] serves as an independent reference.

pub mod canon;
pub mod converge;
pub mod cycle;
pub mod dot;
pub mod error;
pub mod graph;
pub mod metric;
pub mod order;
pub mod rewrite;
pub mod syntax;
pub mod terms;

pub use canon::{bisimilar, canonicalize, collapse, delta_hom, iso, iso_map, CanonicalTermGraph, NodeMap};
pub use converge::{
    analyze, analyze_strong_m, analyze_strong_p, analyze_weak_m, analyze_weak_p, cross_check, Certificate, Consistency,
    ConvergenceReport, Discipline, Evidence, Verdict,
};
pub use cycle::Cycle;
pub use dot::export_dot;
pub use error::{EmptyInput, GraphError, RewriteError};
pub use graph::{LabelledGraph, NodeId, Position, RawGraph, RawNode, Signature, Symbol, TermGraph};
pub use metric::{dist, metric_limit, similarity_depth, truncate, Depth, Distance, DivergenceWitness, LimitResult, LimitStatus};
pub use order::{glb2, glb_set, leq_bot, liminf, local_truncate, LiminfResult, LiminfStatus};
pub use rewrite::{
    find_redexes, match_rule, pre_reduce, reduce_step, run, unravel_rule, Grs, RawRule, Rule, RunOptions, Script, ScriptStep,
    Step, Strategy, Termination, Trace,
};
pub use syntax::{Document, NamedGraph, ParseError};
pub use terms::{Term, TermRule};
