use thiserror::Error;

use crate::graph::NodeId;

/// Errors raised while building or querying term graphs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {node}: symbol has arity {expected} but {found} successors are given")]
    ArityMismatch { node: String, expected: usize, found: usize },
    #[error("node {0} is not reachable from the root")]
    UnreachableNode(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("node {node} refers to undefined successor {successor}")]
    DanglingSuccessor { node: String, successor: String },
    #[error("root {0} is not a defined node")]
    UnknownRoot(String),
    #[error("node {0} is defined twice")]
    DuplicateNode(String),
    #[error("symbol {symbol} used with arity {first} and {second}")]
    ArityConflict { symbol: String, first: usize, second: usize },
    #[error("no such node {0}")]
    NoSuchNode(NodeId),
    #[error("graph is not a term tree")]
    NotATree,
}

/// Errors raised by rule validation and reduction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("variable {0} labels more than one node")]
    DuplicateVariableNode(String),
    #[error("the left-hand side root is a variable")]
    VariableAtLhsRoot,
    #[error("variable {0} is not reachable from the left-hand side root")]
    VariableUnreachableFromLhs(String),
    #[error("bot occurs in rule node {0}")]
    BottomInRule(String),
    #[error("node {0} is reachable from neither the lhs nor the rhs root")]
    UnreachableRuleNode(String),
    #[error("the lhs root and the rhs root are the same node")]
    LhsEqualsRhs,
    #[error("rule name {0} is used twice")]
    DuplicateRule(String),
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("rule {rule} does not match at node {node}")]
    NoMatch { rule: String, node: NodeId },
    #[error("script step {0} does not address a redex of its rule")]
    ScriptedRedexInvalid(usize),
    #[error("rule has a cycle; a depth bound is required to unravel it")]
    CyclicRuleNeedsBound,
}

/// Raised by sequence analyses given no input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("empty input sequence")]
pub struct EmptyInput;
