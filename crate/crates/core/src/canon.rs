//! Canonical forms, homomorphisms, isomorphism and bisimilarity.
//!
//! Rooted graphs with ordered successors admit at most one candidate map
//! between them: the root goes to the root and each successor edge forces
//! the image of its target. Every check here is a single worklist pass
//! that propagates and validates those forced images.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::ops::Deref;

use crate::graph::{LabelledGraph, NodeId, Symbol, TermGraph};

/// A term graph whose nodes are numbered by least position (shortest, then
/// lexicographic). Two canonical graphs are equal iff their sources are
/// isomorphic.
#[derive(Clone)]
pub struct CanonicalTermGraph {
    graph: TermGraph,
    hash: u64,
}

impl CanonicalTermGraph {
    pub fn as_graph(&self) -> &TermGraph {
        &self.graph
    }

    pub fn into_graph(self) -> TermGraph {
        self.graph
    }

    pub fn structural_hash(&self) -> u64 {
        self.hash
    }

    pub fn bottom() -> Self {
        canonicalize(&TermGraph::bottom())
    }
}

impl Deref for CanonicalTermGraph {
    type Target = TermGraph;

    fn deref(&self) -> &TermGraph {
        &self.graph
    }
}

impl PartialEq for CanonicalTermGraph {
    fn eq(&self, other: &Self) -> bool {
        self.hash == other.hash && self.graph == other.graph
    }
}

impl Eq for CanonicalTermGraph {}

impl Hash for CanonicalTermGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl fmt::Debug for CanonicalTermGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for n in self.graph.nodes() {
            if n.0 > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{n}: {}", self.graph.label(n))?;
            let succ = self.graph.successors(n);
            if !succ.is_empty() {
                write!(f, "(")?;
                for (i, s) in succ.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, ")")?;
            }
        }
        write!(f, "}}")
    }
}

impl From<TermGraph> for CanonicalTermGraph {
    fn from(g: TermGraph) -> Self {
        canonicalize(&g)
    }
}

/// Renames the nodes of `g` in least-position order.
pub fn canonicalize(g: &TermGraph) -> CanonicalTermGraph {
    let graph = g.reachable_in_bfs_order();
    let mut h = DefaultHasher::new();
    graph.hash(&mut h);
    CanonicalTermGraph {
        graph,
        hash: h.finish(),
    }
}

/// A node map between two graphs, total on its domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMap(BTreeMap<NodeId, NodeId>);

impl NodeMap {
    pub fn get(&self, n: NodeId) -> Option<NodeId> {
        self.0.get(&n).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.0.iter().map(|(a, b)| (*a, *b))
    }
}

impl FromIterator<(NodeId, NodeId)> for NodeMap {
    fn from_iter<I: IntoIterator<Item = (NodeId, NodeId)>>(iter: I) -> Self {
        NodeMap(iter.into_iter().collect())
    }
}

/// Propagates the forced map from `src_start ↦ dst_start`. Labelling and
/// successor conditions are suspended at source nodes whose label satisfies
/// `suspended`. With `injective`, two source nodes may not share an image.
/// Only nodes reachable from `src_start` are mapped.
pub(crate) fn forced_map<S, D>(
    src: &S,
    src_start: NodeId,
    dst: &D,
    dst_start: NodeId,
    suspended: impl Fn(&Symbol) -> bool,
    injective: bool,
) -> Option<NodeMap>
where
    S: LabelledGraph + ?Sized,
    D: LabelledGraph + ?Sized,
{
    let mut image: Vec<Option<NodeId>> = vec![None; src.node_count()];
    let mut preimage: Vec<Option<NodeId>> = if injective { vec![None; dst.node_count()] } else { Vec::new() };
    let mut work = VecDeque::new();
    work.push_back((src_start, dst_start));
    while let Some((s, d)) = work.pop_front() {
        if let Some(existing) = image[s.0] {
            if existing != d {
                return None;
            }
            continue;
        }
        if injective {
            match preimage[d.0] {
                Some(other) if other != s => return None,
                _ => preimage[d.0] = Some(s),
            }
        }
        image[s.0] = Some(d);
        let label = src.label(s);
        if suspended(label) {
            continue;
        }
        if label != dst.label(d) {
            return None;
        }
        let (ss, ds) = (src.successors(s), dst.successors(d));
        if ss.len() != ds.len() {
            return None;
        }
        work.extend(ss.iter().copied().zip(ds.iter().copied()));
    }
    Some(
        image
            .into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (NodeId(i), d)))
            .collect(),
    )
}

/// The Δ-homomorphism from `g` to `h`, if one exists. Nodes of `g` labelled
/// with a symbol in `delta` are holes: their label and successors are not
/// checked. `delta` must contain only nullary symbols.
pub fn delta_hom(g: &TermGraph, h: &TermGraph, delta: &[Symbol]) -> Option<NodeMap> {
    forced_map(g, g.root(), h, h.root(), |s| delta.contains(s), false)
}

/// Isomorphism of term graphs (root-preserving).
pub fn iso(g: &TermGraph, h: &TermGraph) -> bool {
    g.node_count() == h.node_count()
        && forced_map(g, g.root(), h, h.root(), |_| false, true).is_some_and(|m| m.len() == h.node_count())
}

/// The witnessing isomorphism, when `g` and `h` are isomorphic.
pub fn iso_map(g: &TermGraph, h: &TermGraph) -> Option<NodeMap> {
    if g.node_count() != h.node_count() {
        return None;
    }
    forced_map(g, g.root(), h, h.root(), |_| false, true).filter(|m| m.len() == h.node_count())
}

/// The maximally shared graph bisimilar to `g`: nodes that unravel to the
/// same term are merged by partition refinement.
pub fn collapse(g: &TermGraph) -> CanonicalTermGraph {
    let n = g.node_count();
    let mut label_ids: HashMap<&Symbol, usize> = HashMap::new();
    let mut class: Vec<usize> = g
        .nodes()
        .map(|v| {
            let next = label_ids.len();
            *label_ids.entry(g.label(v)).or_insert(next)
        })
        .collect();
    let mut count = label_ids.len();
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let refined: Vec<usize> = g
            .nodes()
            .map(|v| {
                let key = (class[v.0], g.successors(v).iter().map(|s| class[s.0]).collect());
                let next = ids.len();
                *ids.entry(key).or_insert(next)
            })
            .collect();
        let refined_count = ids.len();
        class = refined;
        if refined_count == count {
            break;
        }
        count = refined_count;
    }
    let mut rep = vec![None; count];
    for v in 0..n {
        rep[class[v]].get_or_insert(v);
    }
    let labels = rep.iter().map(|r| g.label(NodeId(r.expect("class non-empty"))).clone()).collect();
    let succs = rep
        .iter()
        .map(|r| {
            g.successors(NodeId(r.expect("class non-empty")))
                .iter()
                .map(|s| NodeId(class[s.0]))
                .collect()
        })
        .collect();
    canonicalize(&TermGraph::from_parts(labels, succs, NodeId(class[g.root().0])))
}

/// `true` iff `g` and `h` unravel to the same term.
pub fn bisimilar(g: &TermGraph, h: &TermGraph) -> bool {
    collapse(g) == collapse(h)
}
