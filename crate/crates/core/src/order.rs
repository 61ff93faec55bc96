//! The simple partial order on partial term graphs.
//!
//! `g ≤ h` iff there is a ⊥-homomorphism from `g` to `h`: `⊥`-nodes of `g`
//! are holes that may be filled by arbitrary nodes of `h`. Greatest lower
//! bounds are computed as the synchronized product of the two graphs.

use std::collections::{HashMap, VecDeque};

use crate::canon::{canonicalize, delta_hom, CanonicalTermGraph};
use crate::cycle::Cycle;
use crate::error::{EmptyInput, GraphError};
use crate::graph::{NodeId, Symbol, TermGraph};
use crate::metric::{truncate, Depth};

/// `true` iff a ⊥-homomorphism from `g` to `h` exists.
pub fn leq_bot(g: &TermGraph, h: &TermGraph) -> bool {
    delta_hom(g, h, &[Symbol::bottom()]).is_some()
}

/// Greatest lower bound of two partial term graphs.
///
/// Nodes of the result are the pairs `(m, n)` reachable from the pair of
/// roots. A pair whose labels agree keeps the label and pairs up the
/// successors; any other pair becomes `⊥`.
pub fn glb2(g: &TermGraph, h: &TermGraph) -> CanonicalTermGraph {
    let mut ids: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut succs: Vec<Vec<NodeId>> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert((g.root(), h.root()), 0);
    labels.push(Symbol::bottom());
    succs.push(Vec::new());
    queue.push_back((g.root(), h.root()));
    while let Some((m, n)) = queue.pop_front() {
        let id = ids[&(m, n)];
        if g.label(m) != h.label(n) || g.successors(m).len() != h.successors(n).len() {
            continue;
        }
        labels[id] = g.label(m).clone();
        let mut out = Vec::with_capacity(g.successors(m).len());
        for (&a, &b) in g.successors(m).iter().zip(h.successors(n)) {
            let next = ids.len();
            let child = *ids.entry((a, b)).or_insert_with(|| {
                labels.push(Symbol::bottom());
                succs.push(Vec::new());
                queue.push_back((a, b));
                next
            });
            out.push(NodeId(child));
        }
        succs[id] = out;
    }
    canonicalize(&TermGraph::from_parts(labels, succs, NodeId(0)))
}

/// Left fold of [`glb2`] over a non-empty list.
pub fn glb_set<'a, I>(graphs: I) -> Result<CanonicalTermGraph, EmptyInput>
where
    I: IntoIterator<Item = &'a TermGraph>,
{
    let mut it = graphs.into_iter();
    let first = canonicalize(it.next().ok_or(EmptyInput)?);
    Ok(it.fold(first, |acc, g| glb2(&acc, g)))
}

/// Relabels `n` with `⊥`, drops its outgoing edges and garbage-collects.
pub fn local_truncate(g: &TermGraph, n: NodeId) -> Result<TermGraph, GraphError> {
    if !g.contains(n) {
        return Err(GraphError::NoSuchNode(n));
    }
    Ok(g.with_node_cut(|m| m == n))
}

/// Epistemic status of a limit inferior computed from a finite prefix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiminfStatus {
    /// The prefix ends in a certified cycle; the result is the limit
    /// inferior of its infinite periodic continuation.
    Exact,
    /// The depth-`d` truncation of the suffix glbs was constant over the
    /// final window.
    StableToDepth(usize),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiminfResult {
    pub approximant: CanonicalTermGraph,
    pub status: LiminfStatus,
    /// First index of the suffix from which the result was read off.
    pub stabilization_index: usize,
}

/// Limit inferior of a sequence of partial term graphs. The sequence is
/// taken to be eventually periodic when its last element re-occurs.
pub fn liminf(graphs: &[CanonicalTermGraph], depth: usize, window: usize) -> Result<LiminfResult, EmptyInput> {
    liminf_with_cycle(graphs, Cycle::detect(graphs), depth, window)
}

/// Limit inferior with an externally certified cycle (or none).
pub fn liminf_with_cycle(
    graphs: &[CanonicalTermGraph],
    cycle: Option<Cycle>,
    depth: usize,
    window: usize,
) -> Result<LiminfResult, EmptyInput> {
    if graphs.is_empty() {
        return Err(EmptyInput);
    }
    if let Some(c) = cycle.filter(|c| c.period > 0 && c.start + c.period <= graphs.len()) {
        let approximant = glb_set(graphs[c.indices()].iter().map(|g| g.as_graph()))?;
        return Ok(LiminfResult {
            approximant,
            status: LiminfStatus::Exact,
            stabilization_index: c.start,
        });
    }
    let n = graphs.len();
    // suffix glbs, computed backwards from the last element
    let mut suffix: Vec<CanonicalTermGraph> = Vec::with_capacity(n);
    let mut acc = graphs[n - 1].clone();
    suffix.push(acc.clone());
    for g in graphs[..n - 1].iter().rev() {
        acc = glb2(g, &acc);
        suffix.push(acc.clone());
    }
    suffix.reverse();
    let cut: Vec<CanonicalTermGraph> = suffix.iter().map(|g| truncate(g, Depth::Finite(depth))).collect();
    let last = &cut[n - 1];
    let beta = (0..n).rev().take_while(|&i| cut[i] == *last).last().unwrap_or(n - 1);
    if window >= 1 && n - beta >= window {
        Ok(LiminfResult {
            approximant: last.clone(),
            status: LiminfStatus::StableToDepth(depth),
            stabilization_index: beta,
        })
    } else {
        Ok(LiminfResult {
            approximant: last.clone(),
            status: LiminfStatus::Inconclusive,
            stabilization_index: beta,
        })
    }
}
