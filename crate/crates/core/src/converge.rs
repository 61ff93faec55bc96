//! Classifying reduction traces under the four convergence disciplines:
//! weak and strong, metric (`m`) and partial order (`p`).
//!
//! A trace is a finite prefix, so verdicts are qualified: `ConvergedExact`
//! needs a normal form or a certified cycle, `ConvergedToDepth(d)` means
//! the depth-`d` structure was stable over the final window, and
//! `Diverged` always carries a certificate that can be replayed against
//! the trace.

use std::fmt;
use std::str::FromStr;

use crate::canon::CanonicalTermGraph;
use crate::cycle::Cycle;
use crate::graph::TermGraph;
use crate::metric::{dist, metric_limit_with_cycle, truncate, Depth, DivergenceWitness, Distance, LimitStatus};
use crate::order::{liminf_with_cycle, LiminfStatus};
use crate::rewrite::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Discipline {
    WeakM,
    WeakP,
    StrongM,
    StrongP,
}

impl Discipline {
    pub const ALL: [Discipline; 4] = [Discipline::WeakM, Discipline::WeakP, Discipline::StrongM, Discipline::StrongP];

    pub fn as_str(self) -> &'static str {
        match self {
            Discipline::WeakM => "weak-m",
            Discipline::WeakP => "weak-p",
            Discipline::StrongM => "strong-m",
            Discipline::StrongP => "strong-p",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown discipline {0}; expected weak-m, weak-p, strong-m or strong-p")]
pub struct UnknownDiscipline(pub String);

impl FromStr for Discipline {
    type Err = UnknownDiscipline;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Discipline::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| UnknownDiscipline(s.to_string()))
    }
}

/// Why a trace diverges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The graph sequence is eventually periodic with two graphs of the
    /// period at a nonzero distance.
    Periodic(DivergenceWitness),
    /// The trace is eventually periodic, so its redex depths recur and never
    /// exceed `max_depth`.
    BoundedRedexDepth { cycle: Cycle, max_depth: usize },
}

impl Certificate {
    /// Re-validates the certificate against `trace`.
    pub fn replay(&self, trace: &Trace) -> bool {
        let graphs = trace.graphs();
        match self {
            Certificate::Periodic(w) => trace.cycle == Some(w.cycle) && w.replay(&graphs),
            Certificate::BoundedRedexDepth { cycle, max_depth } => {
                let depths = trace.redex_depths();
                trace.cycle == Some(*cycle)
                    && cycle.holds_on(&graphs)
                    && cycle.start + cycle.period <= depths.len()
                    && depths[cycle.indices()].iter().max() == Some(max_depth)
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Periodic(w) => write!(
                f,
                "periodic(start={}, period={}, g{} vs g{} at distance {})",
                w.cycle.start, w.cycle.period, w.first, w.second, w.distance
            ),
            Certificate::BoundedRedexDepth { cycle, max_depth } => write!(
                f,
                "bounded-redex-depth(start={}, period={}, max-depth={})",
                cycle.start, cycle.period, max_depth
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    ConvergedExact,
    ConvergedToDepth(usize),
    Diverged(Certificate),
    Inconclusive,
}

impl Verdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::ConvergedExact | Verdict::ConvergedToDepth(_))
    }

    pub fn is_diverged(&self) -> bool {
        matches!(self, Verdict::Diverged(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Diverged(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConvergedExact => f.write_str("converged-exact"),
            Verdict::ConvergedToDepth(d) => write!(f, "converged-to-depth({d})"),
            Verdict::Diverged(_) => f.write_str("diverged"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

/// The data a verdict was read off from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// The trace ends in a normal form.
    Closed,
    /// Distances between consecutive graphs.
    Distances(Vec<Distance>),
    Liminf { status: LiminfStatus, stabilization_index: usize },
    RedexDepths { distances: Vec<Distance>, redex_depths: Vec<usize> },
    Contexts { status: LiminfStatus, stabilization_index: usize, redex_depths: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub discipline: Discipline,
    pub verdict: Verdict,
    /// Present iff the verdict is a converged one; a depth-`d` approximant
    /// for `ConvergedToDepth(d)`.
    pub limit: Option<CanonicalTermGraph>,
    pub evidence: Evidence,
}

fn closed(discipline: Discipline, trace: &Trace) -> Option<ConvergenceReport> {
    trace.is_closed().then(|| ConvergenceReport {
        discipline,
        verdict: Verdict::ConvergedExact,
        limit: Some(trace.last().clone()),
        evidence: Evidence::Closed,
    })
}

fn consecutive_distances(graphs: &[CanonicalTermGraph]) -> Vec<Distance> {
    graphs.windows(2).map(|w| dist(&w[0], &w[1])).collect()
}

fn from_limit(status: LimitStatus, approximant: CanonicalTermGraph) -> (Verdict, Option<CanonicalTermGraph>) {
    match status {
        LimitStatus::Exact => (Verdict::ConvergedExact, Some(approximant)),
        LimitStatus::StableToDepth(d) => (Verdict::ConvergedToDepth(d), Some(approximant)),
        LimitStatus::Divergent(w) => (Verdict::Diverged(Certificate::Periodic(w)), None),
        LimitStatus::Inconclusive => (Verdict::Inconclusive, None),
    }
}

fn from_liminf(status: LiminfStatus, approximant: CanonicalTermGraph) -> (Verdict, Option<CanonicalTermGraph>) {
    match status {
        LiminfStatus::Exact => (Verdict::ConvergedExact, Some(approximant)),
        LiminfStatus::StableToDepth(d) => (Verdict::ConvergedToDepth(d), Some(approximant)),
        LiminfStatus::Inconclusive => (Verdict::Inconclusive, None),
    }
}

/// Weak metric convergence: the metric limit of the graph sequence.
pub fn analyze_weak_m(trace: &Trace, depth: usize, window: usize) -> ConvergenceReport {
    if let Some(r) = closed(Discipline::WeakM, trace) {
        return r;
    }
    let graphs = trace.graphs();
    let lim = metric_limit_with_cycle(&graphs, trace.cycle, depth, window).expect("traces are non-empty");
    let (verdict, limit) = from_limit(lim.status, lim.approximant);
    ConvergenceReport {
        discipline: Discipline::WeakM,
        verdict,
        limit,
        evidence: Evidence::Distances(consecutive_distances(&graphs)),
    }
}

/// Weak partial order convergence: the limit inferior of the graphs.
pub fn analyze_weak_p(trace: &Trace, depth: usize, window: usize) -> ConvergenceReport {
    if let Some(r) = closed(Discipline::WeakP, trace) {
        return r;
    }
    let inf = liminf_with_cycle(&trace.graphs(), trace.cycle, depth, window).expect("traces are non-empty");
    let (verdict, limit) = from_liminf(inf.status, inf.approximant);
    ConvergenceReport {
        discipline: Discipline::WeakP,
        verdict,
        limit,
        evidence: Evidence::Liminf {
            status: inf.status,
            stabilization_index: inf.stabilization_index,
        },
    }
}

/// Strong metric convergence: weak metric convergence with redex depths
/// tending to infinity. A cycle bounds the redex depths, which certifies
/// divergence; otherwise the last `window` redexes must all lie at depth
/// `depth` or deeper.
pub fn analyze_strong_m(trace: &Trace, depth: usize, window: usize) -> ConvergenceReport {
    if let Some(r) = closed(Discipline::StrongM, trace) {
        return r;
    }
    let graphs = trace.graphs();
    let redex_depths = trace.redex_depths();
    let evidence = Evidence::RedexDepths {
        distances: consecutive_distances(&graphs),
        redex_depths: redex_depths.clone(),
    };
    if let Some(c) = trace.cycle.filter(|c| c.period > 0 && c.start + c.period <= redex_depths.len()) {
        let max_depth = redex_depths[c.indices()].iter().copied().max().expect("non-empty period");
        return ConvergenceReport {
            discipline: Discipline::StrongM,
            verdict: Verdict::Diverged(Certificate::BoundedRedexDepth { cycle: c, max_depth }),
            limit: None,
            evidence,
        };
    }
    let lim = metric_limit_with_cycle(&graphs, None, depth, window).expect("traces are non-empty");
    let n = redex_depths.len();
    let deep = window >= 1 && n >= window && redex_depths[n - window..].iter().all(|&e| e >= depth);
    let (verdict, limit) = match lim.status {
        LimitStatus::StableToDepth(d) if deep => (Verdict::ConvergedToDepth(d), Some(lim.approximant)),
        _ => (Verdict::Inconclusive, None),
    };
    ConvergenceReport {
        discipline: Discipline::StrongM,
        verdict,
        limit,
        evidence,
    }
}

/// Strong partial order convergence: the limit inferior of the reduction
/// contexts.
pub fn analyze_strong_p(trace: &Trace, depth: usize, window: usize) -> ConvergenceReport {
    if let Some(r) = closed(Discipline::StrongP, trace) {
        return r;
    }
    let contexts = trace.contexts();
    let redex_depths = trace.redex_depths();
    if contexts.is_empty() {
        // only reachable with a zero step budget
        return ConvergenceReport {
            discipline: Discipline::StrongP,
            verdict: Verdict::Inconclusive,
            limit: None,
            evidence: Evidence::Contexts {
                status: LiminfStatus::Inconclusive,
                stabilization_index: 0,
                redex_depths,
            },
        };
    }
    let inf = liminf_with_cycle(&contexts, trace.cycle, depth, window).expect("non-empty");
    let (verdict, limit) = from_liminf(inf.status, inf.approximant);
    ConvergenceReport {
        discipline: Discipline::StrongP,
        verdict,
        limit,
        evidence: Evidence::Contexts {
            status: inf.status,
            stabilization_index: inf.stabilization_index,
            redex_depths,
        },
    }
}

pub fn analyze(discipline: Discipline, trace: &Trace, depth: usize, window: usize) -> ConvergenceReport {
    match discipline {
        Discipline::WeakM => analyze_weak_m(trace, depth, window),
        Discipline::WeakP => analyze_weak_p(trace, depth, window),
        Discipline::StrongM => analyze_strong_m(trace, depth, window),
        Discipline::StrongP => analyze_strong_p(trace, depth, window),
    }
}

/// `true` iff every `⊥` of `g` lies at depth `depth` or deeper, i.e. the
/// depth-`depth` truncation is as total as a truncation can be.
pub fn total_to_depth(g: &TermGraph, depth: usize) -> bool {
    let depths = g.depths();
    g.nodes().all(|n| !g.label(n).is_bottom() || depths[n.0] >= depth)
}

/// Result of checking the relations that must hold between disciplines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Consistency {
    pub violations: Vec<String>,
    /// Relations that could not be checked because a verdict was
    /// inconclusive.
    pub undecided: Vec<String>,
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Limits compared at the coarser of the two precisions.
fn limits_agree(a: &ConvergenceReport, b: &ConvergenceReport, depth: usize) -> bool {
    let (Some(x), Some(y)) = (&a.limit, &b.limit) else {
        return false;
    };
    if a.verdict == Verdict::ConvergedExact && b.verdict == Verdict::ConvergedExact {
        x == y
    } else {
        truncate(x, Depth::Finite(depth)) == truncate(y, Depth::Finite(depth))
    }
}

fn limit_is_total(r: &ConvergenceReport) -> bool {
    match (&r.verdict, &r.limit) {
        (Verdict::ConvergedExact, Some(g)) => g.is_total(),
        (Verdict::ConvergedToDepth(d), Some(g)) => total_to_depth(g, *d),
        _ => false,
    }
}

/// Runs all four analyses and checks:
///
/// * weak-m exact ⇒ weak-p exact with the same limit;
/// * weak-m converged ⇒ weak-p converged with the same limit (to depth);
/// * strong-m converged ⇒ strong-p converged with the same, total limit;
/// * strong-p converged with a total limit ⇒ strong-m not diverged.
///
/// Every diverged verdict's certificate must also replay.
pub fn cross_check(trace: &Trace, depth: usize, window: usize) -> (Vec<ConvergenceReport>, Consistency) {
    let reports: Vec<ConvergenceReport> = Discipline::ALL.iter().map(|&d| analyze(d, trace, depth, window)).collect();
    let [wm, wp, sm, sp] = [&reports[0], &reports[1], &reports[2], &reports[3]];
    let mut c = Consistency::default();
    for r in &reports {
        if let Some(cert) = r.verdict.certificate() {
            if !cert.replay(trace) {
                c.violations.push(format!("{}: certificate does not replay", r.discipline));
            }
        }
        if r.verdict.is_converged() != r.limit.is_some() {
            c.violations.push(format!("{}: limit present iff converged", r.discipline));
        }
    }
    if wm.verdict == Verdict::ConvergedExact && (wp.verdict != Verdict::ConvergedExact || !limits_agree(wm, wp, depth)) {
        c.violations.push("weak-m exact but weak-p not exact with the same limit".into());
    }
    if wm.verdict.is_converged() {
        if wp.verdict == Verdict::Inconclusive {
            c.undecided.push("weak-m converged, weak-p inconclusive".into());
        } else if !wp.verdict.is_converged() || !limits_agree(wm, wp, depth) {
            c.violations.push("weak-m converged but weak-p does not converge to the same limit".into());
        }
    }
    if sm.verdict.is_converged() {
        if sp.verdict == Verdict::Inconclusive {
            c.undecided.push("strong-m converged, strong-p inconclusive".into());
        } else if !sp.verdict.is_converged() || !limits_agree(sm, sp, depth) || !limit_is_total(sp) {
            c.violations.push("strong-m converged but strong-p does not converge to the same total limit".into());
        }
    }
    if limit_is_total(sp) {
        if sm.verdict.is_diverged() {
            c.violations.push("strong-p converged to a total limit but strong-m diverged".into());
        } else if sm.verdict == Verdict::Inconclusive {
            c.undecided.push("strong-p total, strong-m inconclusive".into());
        }
    }
    (reports, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonicalize;
    use crate::rewrite::{run, Grs, RawRule, Rule, RunOptions, Strategy};
    use crate::graph::{RawGraph, Signature};

    fn a_to_a() -> Trace {
        let sig = Signature::from_pairs([("a", 0)]).unwrap();
        let raw = RawRule {
            name: "aa".into(),
            lhs: "l".into(),
            rhs: "r".into(),
            nodes: RawGraph::from_table("l", &[("l", "a", &[]), ("r", "a", &[])]).nodes,
        };
        let grs = Grs::new(sig.clone(), vec![Rule::validate(&raw, &sig).unwrap()]).unwrap();
        let a = canonicalize(&TermGraph::constant("a".into()));
        run(&a, &grs, &Strategy::LeftmostOutermost, RunOptions::default()).unwrap()
    }

    #[test]
    fn a_to_a_verdicts() {
        let trace = a_to_a();
        let a = canonicalize(&TermGraph::constant("a".into()));
        let wm = analyze_weak_m(&trace, 16, 8);
        assert_eq!(wm.verdict, Verdict::ConvergedExact);
        assert_eq!(wm.limit, Some(a.clone()));
        let wp = analyze_weak_p(&trace, 16, 8);
        assert_eq!(wp.limit, Some(a));
        let sm = analyze_strong_m(&trace, 16, 8);
        assert!(sm.verdict.is_diverged());
        assert!(sm.verdict.certificate().unwrap().replay(&trace));
        assert_eq!(sm.limit, None);
        let sp = analyze_strong_p(&trace, 16, 8);
        assert_eq!(sp.verdict, Verdict::ConvergedExact);
        assert_eq!(sp.limit, Some(CanonicalTermGraph::bottom()));
        let (_, c) = cross_check(&trace, 16, 8);
        assert!(c.is_consistent(), "{c:?}");
    }

    #[test]
    fn closed_trace_reports_final_graph() {
        let sig = Signature::from_pairs([("a", 0), ("b", 0)]).unwrap();
        let raw = RawRule {
            name: "ab".into(),
            lhs: "l".into(),
            rhs: "r".into(),
            nodes: RawGraph::from_table("l", &[("l", "a", &[]), ("r", "b", &[])]).nodes,
        };
        let grs = Grs::new(sig.clone(), vec![Rule::validate(&raw, &sig).unwrap()]).unwrap();
        let a = canonicalize(&TermGraph::constant("a".into()));
        let trace = run(&a, &grs, &Strategy::LeftmostOutermost, RunOptions::default()).unwrap();
        let b = canonicalize(&TermGraph::constant("b".into()));
        for d in Discipline::ALL {
            let r = analyze(d, &trace, 4, 2);
            assert_eq!(r.verdict, Verdict::ConvergedExact);
            assert_eq!(r.limit.as_ref(), Some(&b));
            assert_eq!(r.evidence, Evidence::Closed);
        }
    }

    #[test]
    fn discipline_names_round_trip() {
        for d in Discipline::ALL {
            assert_eq!(d.as_str().parse::<Discipline>(), Ok(d));
        }
        assert!("weak".parse::<Discipline>().is_err());
    }

    #[test]
    fn totality_to_depth() {
        let raw = RawGraph::from_table("n", &[("n", "f", &["m", "b"]), ("m", "f", &["b", "b"]), ("b", "bot", &[])]);
        let sig = Signature::from_pairs([("f", 2)]).unwrap();
        let g = TermGraph::validate(&raw, &sig).unwrap();
        // least depth of the shared bot node is 1
        assert!(total_to_depth(&g, 1));
        assert!(!total_to_depth(&g, 2));
    }
}
