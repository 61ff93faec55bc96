//! Term graph rules, matching, and reduction steps.
//!
//! A rule is one graph with two distinguished nodes: the left-hand side
//! root `l` and the right-hand side root `r`. Applying a rule at node `n`
//! of a graph `g`:
//!
//! 1. match the lhs against `g` at `n` (a variable-homomorphism `φ`);
//! 2. copy the rule nodes outside the lhs into `g`, sending edges that
//!    point into the lhs to their `φ`-image;
//! 3. redirect every edge to `n` (and the root, if it is `n`) to the
//!    contractum root, which is the copy of `r` or `φ(r)`;
//! 4. drop the nodes no longer reachable from the root.
//!
//! Redirection is applied to all edges at once, so edges created in step 2
//! that point at `n` are redirected as well.

use std::collections::HashMap;

use crate::canon::{canonicalize, forced_map, CanonicalTermGraph, NodeMap};
use crate::cycle::{Cycle, RepeatDetector};
use crate::error::RewriteError;
use crate::graph::{bfs_order, resolve_table, LabelledGraph, NodeId, Position, RawNode, Signature, Symbol, TermGraph};
use crate::order::local_truncate;
use crate::terms::{Term, TermRule};

/// An unvalidated rule as read from a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRule {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub nodes: Vec<RawNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    name: String,
    labels: Vec<Symbol>,
    succs: Vec<Vec<NodeId>>,
    node_names: Vec<String>,
    lhs: NodeId,
    rhs: NodeId,
    in_lhs: Vec<bool>,
}

impl LabelledGraph for Rule {
    fn node_count(&self) -> usize {
        self.labels.len()
    }

    fn label(&self, n: NodeId) -> &Symbol {
        &self.labels[n.0]
    }

    fn successors(&self, n: NodeId) -> &[NodeId] {
        &self.succs[n.0]
    }
}

impl Rule {
    /// Validates a raw rule against `sig`.
    pub fn validate(raw: &RawRule, sig: &Signature) -> Result<Rule, RewriteError> {
        let (labels, succs, index) = resolve_table(&raw.nodes, sig)?;
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| RewriteError::Graph(crate::GraphError::UnknownRoot(name.to_string())))
        };
        let lhs = lookup(&raw.lhs)?;
        let rhs = lookup(&raw.rhs)?;
        let name_of = |n: NodeId| raw.nodes[n.0].name.clone();
        if let Some(i) = labels.iter().position(Symbol::is_bottom) {
            return Err(RewriteError::BottomInRule(name_of(NodeId(i))));
        }
        if labels[lhs.0].is_variable() {
            return Err(RewriteError::VariableAtLhsRoot);
        }
        if lhs == rhs {
            return Err(RewriteError::LhsEqualsRhs);
        }
        let mut rule = Rule {
            name: raw.name.clone(),
            labels,
            succs,
            node_names: raw.nodes.iter().map(|n| n.name.clone()).collect(),
            lhs,
            rhs,
            in_lhs: Vec::new(),
        };
        rule.in_lhs = rule.reachable_from(lhs);
        let from_rhs = rule.reachable_from(rhs);
        if let Some(i) = (0..rule.labels.len()).find(|&i| !rule.in_lhs[i] && !from_rhs[i]) {
            return Err(RewriteError::UnreachableRuleNode(name_of(NodeId(i))));
        }
        let mut vars: HashMap<&Symbol, NodeId> = HashMap::new();
        for (i, l) in rule.labels.iter().enumerate().filter(|(_, l)| l.is_variable()) {
            if vars.insert(l, NodeId(i)).is_some() {
                return Err(RewriteError::DuplicateVariableNode(l.to_string()));
            }
            if !rule.in_lhs[i] {
                return Err(RewriteError::VariableUnreachableFromLhs(l.to_string()));
            }
        }
        Ok(rule)
    }

    fn reachable_from(&self, n: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.labels.len()];
        for m in bfs_order(self, n) {
            seen[m.0] = true;
        }
        seen
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs_root(&self) -> NodeId {
        self.lhs
    }

    pub fn rhs_root(&self) -> NodeId {
        self.rhs
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, n: NodeId) -> &Symbol {
        &self.labels[n.0]
    }

    pub fn successors(&self, n: NodeId) -> &[NodeId] {
        &self.succs[n.0]
    }

    pub fn is_lhs_node(&self, n: NodeId) -> bool {
        self.in_lhs[n.0]
    }

    /// The left-hand side as a term graph.
    pub fn lhs(&self) -> TermGraph {
        TermGraph::from_parts(self.labels.clone(), self.succs.clone(), self.lhs)
    }

    /// The right-hand side as a term graph.
    pub fn rhs(&self) -> TermGraph {
        TermGraph::from_parts(self.labels.clone(), self.succs.clone(), self.rhs)
    }

    /// `true` iff no variable occurs twice in the unravelled lhs.
    pub fn is_left_linear(&self) -> bool {
        let lhs = self.lhs();
        let mut indegree = vec![0usize; lhs.node_count()];
        for n in lhs.nodes() {
            for s in lhs.successors(n) {
                indegree[s.0] += 1;
            }
        }
        let mut reaches = vec![false; lhs.node_count()];
        // a variable is duplicated iff some path to it passes a node with two
        // incoming edges, or it has two incoming edges itself
        for n in lhs.nodes() {
            if indegree[n.0] > 1 {
                for m in bfs_order(&lhs, n) {
                    reaches[m.0] = true;
                }
            }
        }
        !lhs.nodes().any(|n| lhs.label(n).is_variable() && reaches[n.0]) && !lhs.is_cyclic()
    }
}

/// A term graph rewriting system: a signature and named rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grs {
    signature: Signature,
    rules: Vec<Rule>,
}

impl Grs {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Grs, RewriteError> {
        for (i, r) in rules.iter().enumerate() {
            if rules[..i].iter().any(|q| q.name == r.name) {
                return Err(RewriteError::DuplicateRule(r.name.clone()));
            }
        }
        Ok(Grs { signature, rules })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

/// The variable-homomorphism from the rule's lhs to `g` rooted at `n`.
/// Domain: the lhs nodes of the rule.
pub fn match_rule(rule: &Rule, g: &TermGraph, n: NodeId) -> Option<NodeMap> {
    if !g.contains(n) {
        return None;
    }
    forced_map(rule, rule.lhs, g, n, Symbol::is_variable, false)
}

/// All `(rule name, node)` redex pairs, by least position of the node and
/// then rule declaration order.
pub fn find_redexes(grs: &Grs, g: &TermGraph) -> Vec<(String, NodeId)> {
    let mut out = Vec::new();
    for n in bfs_order(g, g.root()) {
        for r in &grs.rules {
            if match_rule(r, g, n).is_some() {
                out.push((r.name.clone(), n));
            }
        }
    }
    out
}

/// Applies `rule` at `n` using the match `phi` (see module docs).
pub fn pre_reduce(g: &TermGraph, rule: &Rule, n: NodeId, phi: &NodeMap) -> TermGraph {
    let mut labels: Vec<Symbol> = g.nodes().map(|m| g.label(m).clone()).collect();
    let mut succs: Vec<Vec<NodeId>> = g.nodes().map(|m| g.successors(m).to_vec()).collect();
    let mut copy: Vec<Option<NodeId>> = vec![None; rule.node_count()];
    for m in (0..rule.node_count()).map(NodeId) {
        if !rule.is_lhs_node(m) {
            copy[m.0] = Some(NodeId(labels.len()));
            labels.push(rule.label(m).clone());
            succs.push(Vec::new());
        }
    }
    let image = |m: NodeId| -> NodeId {
        if rule.is_lhs_node(m) {
            phi.get(m).expect("match covers the lhs")
        } else {
            copy[m.0].expect("copied")
        }
    };
    for m in (0..rule.node_count()).map(NodeId) {
        if let Some(c) = copy[m.0] {
            succs[c.0] = rule.successors(m).iter().map(|&t| image(t)).collect();
        }
    }
    let contractum = image(rule.rhs);
    for out in succs.iter_mut() {
        for t in out.iter_mut() {
            if *t == n {
                *t = contractum;
            }
        }
    }
    let root = if g.root() == n { contractum } else { g.root() };
    TermGraph::from_parts(labels, succs, root)
}

/// One reduction step with its metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub source: CanonicalTermGraph,
    pub target: CanonicalTermGraph,
    pub rule: String,
    pub redex_node: NodeId,
    pub redex_depth: usize,
    /// The source with the redex root locally truncated.
    pub context: CanonicalTermGraph,
}

/// A canonicalised pre-reduction step.
pub fn reduce_step(g: &CanonicalTermGraph, rule: &Rule, n: NodeId) -> Result<Step, RewriteError> {
    let phi = match_rule(rule, g, n).ok_or_else(|| RewriteError::NoMatch {
        rule: rule.name.clone(),
        node: n,
    })?;
    let target = canonicalize(&pre_reduce(g, rule, n, &phi));
    Ok(Step {
        source: g.clone(),
        target,
        rule: rule.name.clone(),
        redex_node: n,
        redex_depth: g.depth(n)?,
        context: canonicalize(&local_truncate(g, n)?),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptStep {
    pub rule: String,
    pub position: Position,
}

/// An explicit list of steps, repeated cyclically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub name: String,
    pub steps: Vec<ScriptStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Least redex position first, ties by rule declaration order.
    LeftmostOutermost,
    Scripted(Script),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub max_steps: usize,
    /// Stop as soon as a (graph, strategy state) pair repeats.
    pub stop_on_cycle: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_steps: 1000,
            stop_on_cycle: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    NormalForm,
    StepBudget,
    CycleDetected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub initial: CanonicalTermGraph,
    pub steps: Vec<Step>,
    pub termination: Termination,
    /// First repeat of a (graph, strategy state) pair, as graph indices.
    pub cycle: Option<Cycle>,
}

impl Trace {
    /// The initial graph followed by every step target.
    pub fn graphs(&self) -> Vec<CanonicalTermGraph> {
        std::iter::once(self.initial.clone())
            .chain(self.steps.iter().map(|s| s.target.clone()))
            .collect()
    }

    pub fn contexts(&self) -> Vec<CanonicalTermGraph> {
        self.steps.iter().map(|s| s.context.clone()).collect()
    }

    pub fn redex_depths(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.redex_depth).collect()
    }

    pub fn last(&self) -> &CanonicalTermGraph {
        self.steps.last().map_or(&self.initial, |s| &s.target)
    }

    /// The trace ends in a normal form.
    pub fn is_closed(&self) -> bool {
        self.termination == Termination::NormalForm
    }
}

/// Reduces `g` under `strategy`.
pub fn run(g: &CanonicalTermGraph, grs: &Grs, strategy: &Strategy, options: RunOptions) -> Result<Trace, RewriteError> {
    let phase = |steps: usize| match strategy {
        Strategy::LeftmostOutermost => 0,
        Strategy::Scripted(s) => steps % s.steps.len().max(1),
    };
    let mut detector = RepeatDetector::new();
    detector.observe((g.clone(), 0), 0);
    let mut current = g.clone();
    let mut steps = Vec::new();
    let mut cycle = None;
    let termination = loop {
        if steps.len() >= options.max_steps {
            break Termination::StepBudget;
        }
        let redexes = find_redexes(grs, &current);
        if redexes.is_empty() {
            break Termination::NormalForm;
        }
        let step = match strategy {
            Strategy::LeftmostOutermost => {
                let (name, node) = &redexes[0];
                reduce_step(&current, grs.rule(name).expect("redex rule exists"), *node)?
            }
            Strategy::Scripted(script) => {
                let index = steps.len();
                let entry = script
                    .steps
                    .get(phase(index))
                    .ok_or(RewriteError::ScriptedRedexInvalid(index))?;
                let rule = grs.rule(&entry.rule).ok_or(RewriteError::ScriptedRedexInvalid(index))?;
                let node = current
                    .node_at(&entry.position)
                    .ok_or(RewriteError::ScriptedRedexInvalid(index))?;
                reduce_step(&current, rule, node).map_err(|_| RewriteError::ScriptedRedexInvalid(index))?
            }
        };
        current = step.target.clone();
        steps.push(step);
        if let Some(c) = detector.observe((current.clone(), phase(steps.len())), steps.len()) {
            cycle.get_or_insert(c);
            if options.stop_on_cycle {
                break Termination::CycleDetected;
            }
        }
    };
    Ok(Trace {
        initial: g.clone(),
        steps,
        termination,
        cycle,
    })
}

/// The term rule `U(lhs) → U(rhs)`. Without a bound both sides must be
/// acyclic; with `Some(d)` both sides are cut at depth `d`.
pub fn unravel_rule(rule: &Rule, bound: Option<usize>) -> Result<TermRule, RewriteError> {
    let side = |root: NodeId| -> Result<Term, RewriteError> {
        let g = TermGraph::from_parts(rule.labels.clone(), rule.succs.clone(), root);
        let tree = match bound {
            Some(d) => g.unravel_to_depth(d),
            None => g.unravel().ok_or(RewriteError::CyclicRuleNeedsBound)?,
        };
        Ok(Term::from_graph(&tree).expect("unravelling is a tree"))
    };
    Ok(TermRule::new(side(rule.lhs)?, side(rule.rhs)?))
}
