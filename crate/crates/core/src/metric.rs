//! Simple truncation and the simple ultrametric on term graphs.
//!
//! Truncating at depth `d` keeps the nodes of depth at most `d` and turns
//! those at depth exactly `d` into `⊥`. Two graphs are at distance `2^-d`
//! when `d` is the largest depth at which their truncations are isomorphic.

use std::cmp::Ordering;
use std::fmt;

use crate::canon::{canonicalize, CanonicalTermGraph};
use crate::cycle::Cycle;
use crate::error::EmptyInput;
use crate::graph::TermGraph;

/// A truncation depth: a natural number or `ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Depth {
    Finite(usize),
    Omega,
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Omega => f.write_str("omega"),
        }
    }
}

impl PartialOrd for Depth {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Depth {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Depth::Finite(a), Depth::Finite(b)) => a.cmp(b),
            (Depth::Finite(_), Depth::Omega) => Ordering::Less,
            (Depth::Omega, Depth::Finite(_)) => Ordering::Greater,
            (Depth::Omega, Depth::Omega) => Ordering::Equal,
        }
    }
}

/// A distance `0` or `2^-d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distance {
    Zero,
    /// `2^-d`
    Dyadic(usize),
}

impl Distance {
    pub fn is_zero(self) -> bool {
        self == Distance::Zero
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::Dyadic(d) => 2f64.powi(-(d.min(i32::MAX as usize) as i32)),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, _) => Ordering::Less,
            (_, Distance::Zero) => Ordering::Greater,
            // larger exponent, smaller distance
            (Distance::Dyadic(a), Distance::Dyadic(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => f.write_str("0"),
            Distance::Dyadic(d) => write!(f, "2^-{d}"),
        }
    }
}

/// The simple truncation of `g` at `depth`, canonicalized.
pub fn truncate(g: &TermGraph, depth: Depth) -> CanonicalTermGraph {
    match depth {
        Depth::Omega => canonicalize(g),
        Depth::Finite(d) => {
            let depths = g.depths();
            // every path to a node deeper than d passes a node of depth d,
            // so cutting those drops all deeper nodes
            canonicalize(&g.with_node_cut(|n| depths[n.0] == d))
        }
    }
}

/// Largest `e` with `truncate(g, e) ≅ truncate(h, e)`, or `ω` when `g ≅ h`.
pub fn similarity_depth(g: &TermGraph, h: &TermGraph) -> Depth {
    let (cg, ch) = (canonicalize(g), canonicalize(h));
    if cg == ch {
        return Depth::Omega;
    }
    // beyond both maximal depths the truncations are the graphs themselves,
    // which differ, so the loop terminates
    let bound = cg.max_depth().max(ch.max_depth()) + 1;
    for e in 1..=bound {
        if truncate(&cg, Depth::Finite(e)) != truncate(&ch, Depth::Finite(e)) {
            return Depth::Finite(e - 1);
        }
    }
    unreachable!("non-isomorphic graphs must differ at some truncation depth")
}

pub fn dist(g: &TermGraph, h: &TermGraph) -> Distance {
    match similarity_depth(g, h) {
        Depth::Omega => Distance::Zero,
        Depth::Finite(d) => Distance::Dyadic(d),
    }
}

/// A non-Cauchy witness: two graphs of a certified cycle at a nonzero
/// distance, which therefore recurs forever.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivergenceWitness {
    pub cycle: Cycle,
    pub first: usize,
    pub second: usize,
    pub distance: Distance,
}

impl DivergenceWitness {
    /// Re-validates the witness against a sequence.
    pub fn replay(&self, graphs: &[CanonicalTermGraph]) -> bool {
        self.cycle.holds_on(graphs)
            && self.cycle.indices().contains(&self.first)
            && self.cycle.indices().contains(&self.second)
            && !self.distance.is_zero()
            && dist(&graphs[self.first], &graphs[self.second]) == self.distance
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitStatus {
    Exact,
    StableToDepth(usize),
    Divergent(DivergenceWitness),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitResult {
    pub approximant: CanonicalTermGraph,
    pub status: LimitStatus,
}

/// Metric limit of a sequence, treating a repeat of the last element as a
/// certified cycle.
pub fn metric_limit(graphs: &[CanonicalTermGraph], depth: usize, window: usize) -> Result<LimitResult, EmptyInput> {
    metric_limit_with_cycle(graphs, Cycle::detect(graphs), depth, window)
}

pub fn metric_limit_with_cycle(
    graphs: &[CanonicalTermGraph],
    cycle: Option<Cycle>,
    depth: usize,
    window: usize,
) -> Result<LimitResult, EmptyInput> {
    let n = graphs.len();
    if n == 0 {
        return Err(EmptyInput);
    }
    if let Some(c) = cycle.filter(|c| c.period > 0 && c.start + c.period <= n) {
        let period = &graphs[c.indices()];
        if period.iter().all(|g| *g == period[0]) {
            return Ok(LimitResult {
                approximant: period[0].clone(),
                status: LimitStatus::Exact,
            });
        }
        let mut witness = None;
        let mut common = Depth::Omega;
        for i in c.indices() {
            for j in i + 1..c.start + c.period {
                let sim = similarity_depth(&graphs[i], &graphs[j]);
                common = common.min(sim);
                if let Depth::Finite(e) = sim {
                    let candidate = DivergenceWitness {
                        cycle: c,
                        first: i,
                        second: j,
                        distance: Distance::Dyadic(e),
                    };
                    // keep the largest recurring distance
                    if witness.is_none_or(|w: DivergenceWitness| candidate.distance > w.distance) {
                        witness = Some(candidate);
                    }
                }
            }
        }
        let witness = witness.expect("a non-constant cycle has two distinct graphs");
        return Ok(LimitResult {
            approximant: truncate(&graphs[c.start], common),
            status: LimitStatus::Divergent(witness),
        });
    }
    let cut: Vec<CanonicalTermGraph> = graphs.iter().map(|g| truncate(g, Depth::Finite(depth))).collect();
    let last = &cut[n - 1];
    let beta = (0..n).rev().take_while(|&i| cut[i] == *last).last().unwrap_or(n - 1);
    let status = if window >= 1 && n - beta >= window {
        LimitStatus::StableToDepth(depth)
    } else {
        LimitStatus::Inconclusive
    };
    Ok(LimitResult {
        approximant: last.clone(),
        status,
    })
}
