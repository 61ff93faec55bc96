//! First-order terms as plain trees, with the term metric, the term partial
//! order, rewriting, and limit analyses over term sequences.
//!
//! This module shares no computation with the graph engine beyond the
//! [`Cycle`] helper and conversions; it serves as the oracle that the graph
//! constructions must agree with when restricted to term trees.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::canon::CanonicalTermGraph;
use crate::cycle::Cycle;
use crate::error::{EmptyInput, GraphError};
use crate::graph::{NodeId, Position, Symbol, TermGraph};
use crate::metric::{metric_limit, Distance, LimitStatus};
use crate::order::{liminf, LiminfStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("rule does not match at position {0}")]
    NoMatchAtPosition(Position),
    #[error("position {0} does not exist")]
    NoSuchPosition(Position),
    #[error("term syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub symbol: Symbol,
    pub args: Vec<Term>,
}

impl Term {
    pub fn new(symbol: impl Into<Symbol>, args: Vec<Term>) -> Term {
        Term {
            symbol: symbol.into(),
            args,
        }
    }

    pub fn constant(symbol: impl Into<Symbol>) -> Term {
        Term::new(symbol, Vec::new())
    }

    pub fn bottom() -> Term {
        Term::constant(Symbol::bottom())
    }

    pub fn is_bottom(&self) -> bool {
        self.symbol.is_bottom()
    }

    /// `true` iff no `⊥` occurs.
    pub fn is_total(&self) -> bool {
        !self.is_bottom() && self.args.iter().all(Term::is_total)
    }

    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.args.iter().map(|a| a.height() + 1).max().unwrap_or(0)
    }

    /// Parses `f(a, g(b))`; variables are `$x`, `⊥` is `bot`.
    pub fn parse(text: &str) -> Result<Term, TermError> {
        let mut p = TermParser { text, pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            t = t.args.get(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `pos`.
    pub fn replace(&self, pos: &Position, with: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[usize], with: Term) -> Option<Term> {
            match path.split_first() {
                None => Some(with),
                Some((&i, rest)) => {
                    let child = go(t.args.get(i)?, rest, with)?;
                    let mut out = t.clone();
                    out.args[i] = child;
                    Some(out)
                }
            }
        }
        go(self, &pos.0, with).ok_or_else(|| TermError::NoSuchPosition(pos.clone()))
    }

    /// All positions in (length, lexicographic) order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([(self, Position::root())]);
        while let Some((t, p)) = queue.pop_front() {
            for (i, a) in t.args.iter().enumerate() {
                queue.push_back((a, p.child(i)));
            }
            out.push(p);
        }
        out
    }

    /// Cuts the term at depth `d`: subterms at depth `d` become `⊥`.
    pub fn truncate(&self, d: usize) -> Term {
        if d == 0 {
            Term::bottom()
        } else {
            Term::new(self.symbol.clone(), self.args.iter().map(|a| a.truncate(d - 1)).collect())
        }
    }

    /// Reads a term tree back from a term graph.
    pub fn from_graph(g: &TermGraph) -> Result<Term, GraphError> {
        if !g.is_tree() {
            return Err(GraphError::NotATree);
        }
        fn go(g: &TermGraph, n: NodeId) -> Term {
            Term::new(g.label(n).clone(), g.successors(n).iter().map(|&s| go(g, s)).collect())
        }
        Ok(go(g, g.root()))
    }

    /// The term as a tree-shaped term graph.
    pub fn to_graph(&self) -> TermGraph {
        let mut labels = Vec::new();
        let mut succs: Vec<Vec<NodeId>> = Vec::new();
        fn go(t: &Term, labels: &mut Vec<Symbol>, succs: &mut Vec<Vec<NodeId>>) -> NodeId {
            let id = labels.len();
            labels.push(t.symbol.clone());
            succs.push(Vec::new());
            let children = t.args.iter().map(|a| go(a, labels, succs)).collect();
            succs[id] = children;
            NodeId(id)
        }
        go(self, &mut labels, &mut succs);
        TermGraph::from_parts(labels, succs, NodeId(0))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct TermParser<'a> {
    text: &'a str,
    pos: usize,
}

impl TermParser<'_> {
    fn error(&self, message: &str) -> TermError {
        TermError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn term(&mut self) -> Result<Term, TermError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.text[self.pos..].chars().next() {
            if crate::syntax::is_symbol_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.error("expected a symbol"));
        }
        let symbol = Symbol::new(&self.text[start..self.pos]);
        self.skip_ws();
        let mut args = Vec::new();
        if self.text[self.pos..].starts_with('(') {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                self.skip_ws();
                match self.text[self.pos..].chars().next() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected ',' or ')'")),
                }
            }
        }
        Ok(Term { symbol, args })
    }
}

/// Shallowest depth at which `s` and `t` differ, if they differ.
fn difference_depth(s: &Term, t: &Term) -> Option<usize> {
    if s.symbol != t.symbol || s.args.len() != t.args.len() {
        return Some(0);
    }
    s.args
        .iter()
        .zip(&t.args)
        .filter_map(|(a, b)| difference_depth(a, b))
        .min()
        .map(|d| d + 1)
}

/// The term metric: `0` for equal terms, else `2^-d` with `d` the minimal
/// depth at which the terms differ.
pub fn dd(s: &Term, t: &Term) -> Distance {
    match difference_depth(s, t) {
        None => Distance::Zero,
        Some(d) => Distance::Dyadic(d),
    }
}

/// `s ≤⊥ t`: `s` is obtained from `t` by replacing subterms with `⊥`.
pub fn leq_bot_term(s: &Term, t: &Term) -> bool {
    s.is_bottom()
        || (s.symbol == t.symbol
            && s.args.len() == t.args.len()
            && s.args.iter().zip(&t.args).all(|(a, b)| leq_bot_term(a, b)))
}

/// Positionwise greatest lower bound of two terms.
pub fn glb_term(s: &Term, t: &Term) -> Term {
    if s.symbol == t.symbol && s.args.len() == t.args.len() {
        Term::new(s.symbol.clone(), s.args.iter().zip(&t.args).map(|(a, b)| glb_term(a, b)).collect())
    } else {
        Term::bottom()
    }
}

/// A term rewrite rule `lhs → rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermRule {
    pub lhs: Term,
    pub rhs: Term,
}

impl TermRule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        TermRule { lhs, rhs }
    }

    pub fn parse(lhs: &str, rhs: &str) -> Result<Self, TermError> {
        Ok(TermRule::new(Term::parse(lhs)?, Term::parse(rhs)?))
    }
}

impl fmt::Display for TermRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// Syntactic matching; a repeated variable must bind equal subterms.
pub fn match_term(pattern: &Term, t: &Term) -> Option<BTreeMap<Symbol, Term>> {
    fn go(p: &Term, t: &Term, b: &mut BTreeMap<Symbol, Term>) -> bool {
        if p.symbol.is_variable() {
            return match b.get(&p.symbol) {
                Some(bound) => bound == t,
                None => {
                    b.insert(p.symbol.clone(), t.clone());
                    true
                }
            };
        }
        p.symbol == t.symbol && p.args.len() == t.args.len() && p.args.iter().zip(&t.args).all(|(x, y)| go(x, y, b))
    }
    let mut bindings = BTreeMap::new();
    go(pattern, t, &mut bindings).then_some(bindings)
}

fn substitute(t: &Term, b: &BTreeMap<Symbol, Term>) -> Term {
    if let Some(v) = b.get(&t.symbol) {
        return v.clone();
    }
    Term::new(t.symbol.clone(), t.args.iter().map(|a| substitute(a, b)).collect())
}

/// Contracts the redex of `rule` at `pos`.
pub fn term_rewrite_step(t: &Term, rule: &TermRule, pos: &Position) -> Result<Term, TermError> {
    let redex = t.subterm(pos).ok_or_else(|| TermError::NoSuchPosition(pos.clone()))?;
    let bindings = match_term(&rule.lhs, redex).ok_or_else(|| TermError::NoMatchAtPosition(pos.clone()))?;
    t.replace(pos, substitute(&rule.rhs, &bindings))
}

/// Redexes of `rules` in `t`, ordered by position then rule order.
pub fn term_redexes(t: &Term, rules: &[TermRule]) -> Vec<(usize, Position)> {
    let mut out = Vec::new();
    for p in t.positions() {
        let sub = t.subterm(&p).expect("own position");
        for (i, r) in rules.iter().enumerate() {
            if match_term(&r.lhs, sub).is_some() {
                out.push((i, p.clone()));
            }
        }
    }
    out
}

/// A finite term reduction prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermReduction {
    /// `terms[0]` is the start term; `terms[i + 1]` results from step `i`.
    pub terms: Vec<Term>,
    pub positions: Vec<Position>,
    /// The last term is a normal form.
    pub closed: bool,
    pub cycle: Option<Cycle>,
}

impl TermReduction {
    /// Leftmost-outermost reduction for at most `max_steps` steps, stopping
    /// on a normal form or a repeated term.
    pub fn leftmost_outermost(start: Term, rules: &[TermRule], max_steps: usize) -> TermReduction {
        let mut terms = vec![start];
        let mut positions = Vec::new();
        let mut seen = std::collections::HashMap::new();
        seen.insert(terms[0].clone(), 0usize);
        let mut closed = false;
        let mut cycle = None;
        while positions.len() < max_steps {
            let current = terms.last().expect("non-empty");
            let Some((rule, pos)) = term_redexes(current, rules).into_iter().next() else {
                closed = true;
                break;
            };
            let next = term_rewrite_step(current, &rules[rule], &pos).expect("redex matches");
            positions.push(pos);
            let idx = terms.len();
            terms.push(next.clone());
            if let Some(&first) = seen.get(&next) {
                cycle = Some(Cycle {
                    start: first,
                    period: idx - first,
                });
                break;
            }
            seen.insert(next, idx);
        }
        TermReduction {
            terms,
            positions,
            closed,
            cycle,
        }
    }

    /// Reduction contexts: each source term with its redex replaced by `⊥`.
    pub fn contexts(&self) -> Vec<Term> {
        self.positions
            .iter()
            .zip(&self.terms)
            .map(|(p, t)| t.replace(p, Term::bottom()).expect("recorded position"))
            .collect()
    }

    pub fn weak_m(&self, depth: usize, window: usize) -> Result<TermLimit, EmptyInput> {
        if self.closed {
            return Ok(TermLimit::exact(self.terms.last().expect("non-empty").clone()));
        }
        metric_limit_term_with_cycle(&self.terms, self.cycle, depth, window)
    }

    pub fn weak_p(&self, depth: usize, window: usize) -> Result<TermLimit, EmptyInput> {
        if self.closed {
            return Ok(TermLimit::exact(self.terms.last().expect("non-empty").clone()));
        }
        liminf_term_with_cycle(&self.terms, self.cycle, depth, window)
    }

    pub fn strong_m(&self, depth: usize, window: usize) -> Result<TermLimit, EmptyInput> {
        if self.closed {
            return Ok(TermLimit::exact(self.terms.last().expect("non-empty").clone()));
        }
        let weak = metric_limit_term_with_cycle(&self.terms, self.cycle, depth, window)?;
        if self.cycle.is_some() {
            // redex depths recur within the cycle and stay bounded
            return Ok(TermLimit {
                approximant: weak.approximant,
                status: TermStatus::Diverged,
            });
        }
        let deep = self.positions.len() >= window
            && self.positions[self.positions.len() - window..].iter().all(|p| p.len() >= depth);
        let status = match weak.status {
            TermStatus::StableToDepth(d) if deep => TermStatus::StableToDepth(d),
            _ => TermStatus::Inconclusive,
        };
        Ok(TermLimit {
            approximant: weak.approximant,
            status,
        })
    }

    pub fn strong_p(&self, depth: usize, window: usize) -> Result<TermLimit, EmptyInput> {
        if self.closed {
            return Ok(TermLimit::exact(self.terms.last().expect("non-empty").clone()));
        }
        liminf_term_with_cycle(&self.contexts(), self.cycle, depth, window)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermStatus {
    Exact,
    StableToDepth(usize),
    Diverged,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermLimit {
    pub approximant: Term,
    pub status: TermStatus,
}

impl TermLimit {
    fn exact(t: Term) -> Self {
        TermLimit {
            approximant: t,
            status: TermStatus::Exact,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self.status, TermStatus::Exact | TermStatus::StableToDepth(_))
    }
}

/// Metric limit of a term sequence (a repeat of the last term certifies a
/// cycle).
pub fn metric_limit_term(terms: &[Term], depth: usize, window: usize) -> Result<TermLimit, EmptyInput> {
    metric_limit_term_with_cycle(terms, Cycle::detect(terms), depth, window)
}

pub fn metric_limit_term_with_cycle(
    terms: &[Term],
    cycle: Option<Cycle>,
    depth: usize,
    window: usize,
) -> Result<TermLimit, EmptyInput> {
    let n = terms.len();
    if n == 0 {
        return Err(EmptyInput);
    }
    if let Some(c) = cycle.filter(|c| c.period > 0 && c.start + c.period <= n) {
        let period = &terms[c.indices()];
        if period.iter().all(|t| *t == period[0]) {
            return Ok(TermLimit::exact(period[0].clone()));
        }
        let common = period
            .iter()
            .flat_map(|s| period.iter().filter_map(move |t| difference_depth(s, t)))
            .min()
            .unwrap_or(0);
        return Ok(TermLimit {
            approximant: period[0].truncate(common),
            status: TermStatus::Diverged,
        });
    }
    let cut: Vec<Term> = terms.iter().map(|t| t.truncate(depth)).collect();
    Ok(stable_tail(cut, depth, window))
}

/// Limit inferior of a term sequence (a repeat of the last term certifies a
/// cycle).
pub fn liminf_term(terms: &[Term], depth: usize, window: usize) -> Result<TermLimit, EmptyInput> {
    liminf_term_with_cycle(terms, Cycle::detect(terms), depth, window)
}

pub fn liminf_term_with_cycle(
    terms: &[Term],
    cycle: Option<Cycle>,
    depth: usize,
    window: usize,
) -> Result<TermLimit, EmptyInput> {
    let n = terms.len();
    if n == 0 {
        return Err(EmptyInput);
    }
    if let Some(c) = cycle.filter(|c| c.period > 0 && c.start + c.period <= n) {
        let period = &terms[c.indices()];
        let glb = period[1..].iter().fold(period[0].clone(), |acc, t| glb_term(&acc, t));
        return Ok(TermLimit::exact(glb));
    }
    let mut suffix = vec![terms[n - 1].clone()];
    for t in terms[..n - 1].iter().rev() {
        let next = glb_term(t, suffix.last().expect("non-empty"));
        suffix.push(next);
    }
    suffix.reverse();
    let cut: Vec<Term> = suffix.iter().map(|t| t.truncate(depth)).collect();
    Ok(stable_tail(cut, depth, window))
}

fn stable_tail(cut: Vec<Term>, depth: usize, window: usize) -> TermLimit {
    let n = cut.len();
    let last = cut[n - 1].clone();
    let run = cut.iter().rev().take_while(|t| **t == last).count();
    TermLimit {
        approximant: last,
        status: if window >= 1 && run >= window {
            TermStatus::StableToDepth(depth)
        } else {
            TermStatus::Inconclusive
        },
    }
}

/// Outcome of comparing graph limits with limits of the unravellings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnravelCheck {
    pub graph_liminf: LiminfStatus,
    pub term_liminf: TermStatus,
    /// The depth-`d` unravelling of the graph liminf equals the depth-`d`
    /// term liminf of the unravellings.
    pub liminf_agrees: bool,
    /// Same for metric limits; `None` when the graph sequence is not
    /// (approximately) metric-convergent.
    pub limit_agrees: Option<bool>,
}

impl UnravelCheck {
    pub fn holds(&self) -> bool {
        self.liminf_agrees && self.limit_agrees != Some(false)
    }
}

/// Checks to depth `depth` that unravelling commutes with limit inferior and
/// (where the graphs converge) with the metric limit.
pub fn check_unravel_preservation(
    graphs: &[CanonicalTermGraph],
    depth: usize,
    window: usize,
) -> Result<UnravelCheck, EmptyInput> {
    let unravelled: Vec<Term> = graphs
        .iter()
        .map(|g| Term::from_graph(&g.unravel_to_depth(depth + 1)).expect("unravelling is a tree"))
        .collect();
    let unravel_cut = |g: &TermGraph| Term::from_graph(&g.unravel_to_depth(depth)).expect("unravelling is a tree");

    let graph_inf = liminf(graphs, depth, window)?;
    let term_inf = liminf_term(&unravelled, depth, window)?;
    let decided = graph_inf.status != LiminfStatus::Inconclusive && term_inf.status != TermStatus::Inconclusive;
    let liminf_agrees = decided && unravel_cut(&graph_inf.approximant) == term_inf.approximant.truncate(depth);

    let graph_lim = metric_limit(graphs, depth, window)?;
    let limit_agrees = match graph_lim.status {
        LimitStatus::Exact | LimitStatus::StableToDepth(_) => {
            let term_lim = metric_limit_term(&unravelled, depth, window)?;
            Some(term_lim.is_converged() && unravel_cut(&graph_lim.approximant) == term_lim.approximant.truncate(depth))
        }
        _ => None,
    };
    Ok(UnravelCheck {
        graph_liminf: graph_inf.status,
        term_liminf: term_inf.status,
        liminf_agrees,
        limit_agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    fn from_rule() -> TermRule {
        TermRule::parse("from($x)", "cons($x, from(s($x)))").unwrap()
    }

    #[test]
    fn parse_and_print() {
        let x = t("f(a, g(b))");
        assert_eq!(x.to_string(), "f(a, g(b))");
        assert_eq!(t(" bot ").to_string(), "bot");
        assert!(Term::parse("f(a,").is_err());
        assert!(Term::parse("f(a) b").is_err());
    }

    #[test]
    fn dd_examples() {
        assert_eq!(dd(&t("f(a)"), &t("f(a)")), Distance::Zero);
        assert_eq!(dd(&t("from(0)"), &t("cons(0, from(s(0)))")), Distance::Dyadic(0));
        assert_eq!(
            dd(&t("cons(0, cons(s(0), bot))"), &t("cons(0, cons(s(0), cons(s(s(0)), bot)))")),
            Distance::Dyadic(2)
        );
    }

    #[test]
    fn leq_examples() {
        assert!(leq_bot_term(&Term::bottom(), &t("f(c, c)")));
        assert!(leq_bot_term(&t("f(bot, c)"), &t("f(c, c)")));
        assert!(!leq_bot_term(&t("f(c, bot)"), &t("f(bot, c)")));
    }

    #[test]
    fn rewrite_examples() {
        let r = from_rule();
        let t1 = term_rewrite_step(&t("from(0)"), &r, &Position::root()).unwrap();
        assert_eq!(t1, t("cons(0, from(s(0)))"));
        let t2 = term_rewrite_step(&t1, &r, &Position(vec![1])).unwrap();
        assert_eq!(t2, t("cons(0, cons(s(0), from(s(s(0)))))"));
        let aa = TermRule::parse("a", "a").unwrap();
        assert_eq!(term_rewrite_step(&t("a"), &aa, &Position::root()).unwrap(), t("a"));
        assert_eq!(
            term_rewrite_step(&t("b"), &aa, &Position::root()),
            Err(TermError::NoMatchAtPosition(Position::root()))
        );
    }

    #[test]
    fn non_left_linear_matching() {
        let r = TermRule::parse("eq($x, $x)", "true").unwrap();
        assert!(term_rewrite_step(&t("eq(a, a)"), &r, &Position::root()).is_ok());
        assert!(term_rewrite_step(&t("eq(a, b)"), &r, &Position::root()).is_err());
    }

    #[test]
    fn graph_round_trip() {
        let x = t("f(a, g(b, a))");
        assert_eq!(Term::from_graph(&x.to_graph()).unwrap(), x);
    }

    #[test]
    fn a_to_a_limits() {
        let red = TermReduction::leftmost_outermost(t("a"), &[TermRule::parse("a", "a").unwrap()], 100);
        assert_eq!(red.positions.len(), 1);
        assert!(red.cycle.is_some());
        let wm = red.weak_m(8, 8).unwrap();
        assert_eq!((wm.approximant, wm.status), (t("a"), TermStatus::Exact));
        let sp = red.strong_p(8, 8).unwrap();
        assert_eq!((sp.approximant, sp.status), (Term::bottom(), TermStatus::Exact));
        assert_eq!(red.strong_m(8, 8).unwrap().status, TermStatus::Diverged);
    }

    #[test]
    fn constant_sequence_is_exact() {
        let r = liminf_term(&[t("f(a)"), t("f(a)")], 4, 8).unwrap();
        assert_eq!(r.status, TermStatus::Exact);
        let r = metric_limit_term(&[t("f(a)"), t("f(a)")], 4, 8).unwrap();
        assert_eq!(r.status, TermStatus::Exact);
        assert_eq!(liminf_term(&[], 4, 8), Err(EmptyInput));
    }
}
