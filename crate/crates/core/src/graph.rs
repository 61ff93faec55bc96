//! Term graphs: rooted, ordered, labelled graphs in which every node is
//! reachable from the root and a node labelled with a `k`-ary symbol has
//! exactly `k` successors.
//!
//! `⊥` (spelled `bot`) and variables (`$`-prefixed names) are ordinary
//! nullary symbols here. Only the operations parametrised by a symbol set
//! (homomorphisms, matching, the partial order) give them special meaning.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::GraphError;

/// Name of the symbol denoting `⊥`.
pub const BOTTOM: &str = "bot";

/// A function symbol, `bot`, or a `$`-prefixed variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: impl AsRef<str>) -> Self {
        Symbol(Arc::from(name.as_ref()))
    }

    pub fn bottom() -> Self {
        Symbol::new(BOTTOM)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_bottom(&self) -> bool {
        &*self.0 == BOTTOM
    }

    pub fn is_variable(&self) -> bool {
        self.0.starts_with('$')
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Symbol arities. `bot` and variables are always nullary and need not be
/// declared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<Symbol, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a signature from `(name, arity)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Self, GraphError> {
        let mut sig = Signature::new();
        for (name, arity) in pairs {
            sig.declare(Symbol::new(name), arity)?;
        }
        Ok(sig)
    }

    /// Records `symbol` with `arity`; re-declaring with a different arity
    /// is an error.
    pub fn declare(&mut self, symbol: Symbol, arity: usize) -> Result<(), GraphError> {
        if (symbol.is_bottom() || symbol.is_variable()) && arity != 0 {
            return Err(GraphError::ArityConflict {
                symbol: symbol.to_string(),
                first: 0,
                second: arity,
            });
        }
        match self.arities.get(&symbol) {
            Some(&a) if a != arity => Err(GraphError::ArityConflict {
                symbol: symbol.to_string(),
                first: a,
                second: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(symbol, arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, symbol: &Symbol) -> Option<usize> {
        if symbol.is_bottom() || symbol.is_variable() {
            return Some(0);
        }
        self.arities.get(symbol).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.arities.iter().map(|(s, &a)| (s, a))
    }

    /// Merges `other` into `self`, failing on conflicting arities.
    pub fn extend(&mut self, other: &Signature) -> Result<(), GraphError> {
        for (s, a) in other.symbols() {
            self.declare(s.clone(), a)?;
        }
        Ok(())
    }
}

/// Index of a node within one graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// A path from the root given as successor indices. The empty position
/// addresses the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

/// Read access to a labelled graph with ordered successors. Implemented by
/// term graphs and by rule bodies (which have two roots).
pub trait LabelledGraph {
    fn node_count(&self) -> usize;
    fn label(&self, n: NodeId) -> &Symbol;
    fn successors(&self, n: NodeId) -> &[NodeId];
}

/// One line of an unvalidated node table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawNode {
    pub name: String,
    pub symbol: Symbol,
    pub successors: Vec<String>,
}

/// An unvalidated node table with named nodes, as read from a document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawGraph {
    pub root: String,
    pub nodes: Vec<RawNode>,
}

impl RawGraph {
    /// Convenience constructor: `(name, symbol, successors)` triples.
    pub fn from_table(root: &str, table: &[(&str, &str, &[&str])]) -> Self {
        RawGraph {
            root: root.to_string(),
            nodes: table
                .iter()
                .map(|(name, sym, succ)| RawNode {
                    name: name.to_string(),
                    symbol: Symbol::new(sym),
                    successors: succ.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        }
    }

    /// Signature of all symbols used, with arities taken from successor counts.
    pub fn infer_signature(&self) -> Result<Signature, GraphError> {
        let mut sig = Signature::new();
        for node in &self.nodes {
            sig.declare(node.symbol.clone(), node.successors.len())
                .map_err(|_| GraphError::ArityMismatch {
                    node: node.name.clone(),
                    expected: sig.arity(&node.symbol).unwrap_or(0),
                    found: node.successors.len(),
                })?;
        }
        Ok(sig)
    }
}

/// Resolves node names to indices and checks the per-node arity and
/// dangling-successor conditions. Shared by graph and rule validation.
pub(crate) fn resolve_table(
    nodes: &[RawNode],
    sig: &Signature,
) -> Result<(Vec<Symbol>, Vec<Vec<NodeId>>, HashMap<String, NodeId>), GraphError> {
    let mut index = HashMap::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        if index.insert(node.name.clone(), NodeId(i)).is_some() {
            return Err(GraphError::DuplicateNode(node.name.clone()));
        }
    }
    let mut labels = Vec::with_capacity(nodes.len());
    let mut succs = Vec::with_capacity(nodes.len());
    for node in nodes {
        let arity = sig
            .arity(&node.symbol)
            .ok_or_else(|| GraphError::UnknownSymbol(node.symbol.to_string()))?;
        if arity != node.successors.len() {
            return Err(GraphError::ArityMismatch {
                node: node.name.clone(),
                expected: arity,
                found: node.successors.len(),
            });
        }
        let mut out = Vec::with_capacity(arity);
        for s in &node.successors {
            let id = index.get(s).ok_or_else(|| GraphError::DanglingSuccessor {
                node: node.name.clone(),
                successor: s.clone(),
            })?;
            out.push(*id);
        }
        labels.push(node.symbol.clone());
        succs.push(out);
    }
    Ok((labels, succs, index))
}

/// Breadth-first order from `root`, visiting successors in index order.
/// The visit order is the order of least positions (shortest first, then
/// lexicographic).
pub(crate) fn bfs_order<G: LabelledGraph + ?Sized>(g: &G, root: NodeId) -> Vec<NodeId> {
    let mut seen = vec![false; g.node_count()];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen[root.0] = true;
    queue.push_back(root);
    while let Some(n) = queue.pop_front() {
        order.push(n);
        for &s in g.successors(n) {
            if !seen[s.0] {
                seen[s.0] = true;
                queue.push_back(s);
            }
        }
    }
    order
}

/// A term graph. Nodes are `NodeId(0)..NodeId(node_count)`.
///
/// `PartialEq` is structural equality of the representation, not
/// isomorphism; compare [`crate::CanonicalTermGraph`]s or use
/// [`crate::iso`] for the latter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermGraph {
    labels: Vec<Symbol>,
    succs: Vec<Vec<NodeId>>,
    root: NodeId,
}

impl LabelledGraph for TermGraph {
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

impl TermGraph {
    /// Validates a raw node table against `sig`. Node `i` of the result is
    /// the `i`-th entry of the table. Unreachable nodes are rejected.
    pub fn validate(raw: &RawGraph, sig: &Signature) -> Result<TermGraph, GraphError> {
        let (labels, succs, index) = resolve_table(&raw.nodes, sig)?;
        let root = *index
            .get(&raw.root)
            .ok_or_else(|| GraphError::UnknownRoot(raw.root.clone()))?;
        let g = TermGraph { labels, succs, root };
        let reach = bfs_order(&g, root);
        if reach.len() != g.node_count() {
            let mut seen = vec![false; g.node_count()];
            for n in reach {
                seen[n.0] = true;
            }
            let first = seen.iter().position(|s| !s).expect("some node unreachable");
            return Err(GraphError::UnreachableNode(raw.nodes[first].name.clone()));
        }
        Ok(g)
    }

    /// Builds a graph from parallel label/successor vectors, keeping only the
    /// nodes reachable from `root`, renumbered in least-position order.
    /// Successor counts must be consistent per symbol; that is not
    /// re-checked here.
    pub fn from_parts(labels: Vec<Symbol>, succs: Vec<Vec<NodeId>>, root: NodeId) -> TermGraph {
        assert_eq!(labels.len(), succs.len(), "labels and successors disagree in length");
        let raw = TermGraph { labels, succs, root };
        raw.reachable_in_bfs_order()
    }

    /// The single-node graph labelled `symbol` (which must be nullary).
    pub fn constant(symbol: Symbol) -> TermGraph {
        TermGraph {
            labels: vec![symbol],
            succs: vec![Vec::new()],
            root: NodeId(0),
        }
    }

    /// The single-node graph `⊥`.
    pub fn bottom() -> TermGraph {
        TermGraph::constant(Symbol::bottom())
    }

    pub(crate) fn reachable_in_bfs_order(&self) -> TermGraph {
        let order = bfs_order(self, self.root);
        let mut rename = vec![usize::MAX; self.labels.len()];
        for (i, n) in order.iter().enumerate() {
            rename[n.0] = i;
        }
        let labels = order.iter().map(|n| self.labels[n.0].clone()).collect();
        let succs = order
            .iter()
            .map(|n| self.succs[n.0].iter().map(|s| NodeId(rename[s.0])).collect())
            .collect();
        TermGraph {
            labels,
            succs,
            root: NodeId(0),
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len()).map(NodeId)
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n.0 < self.labels.len()
    }

    pub fn label(&self, n: NodeId) -> &Symbol {
        &self.labels[n.0]
    }

    pub fn successors(&self, n: NodeId) -> &[NodeId] {
        &self.succs[n.0]
    }

    /// `true` iff no node is labelled `⊥`.
    pub fn is_total(&self) -> bool {
        !self.labels.iter().any(Symbol::is_bottom)
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (l, s) in self.labels.iter().zip(&self.succs) {
            // successor counts are consistent per symbol in every graph we build
            let _ = sig.declare(l.clone(), s.len());
        }
        sig
    }

    fn check(&self, n: NodeId) -> Result<(), GraphError> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(GraphError::NoSuchNode(n))
        }
    }

    /// Depth of every node (length of a shortest root path).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![usize::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        depth[self.root.0] = 0;
        queue.push_back(self.root);
        while let Some(n) = queue.pop_front() {
            for &s in &self.succs[n.0] {
                if depth[s.0] == usize::MAX {
                    depth[s.0] = depth[n.0] + 1;
                    queue.push_back(s);
                }
            }
        }
        depth
    }

    pub fn depth(&self, n: NodeId) -> Result<usize, GraphError> {
        self.check(n)?;
        Ok(self.depths()[n.0])
    }

    /// Largest node depth.
    pub fn max_depth(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// All positions of `n` of length at most `maxlen`, in (length,
    /// lexicographic) order.
    pub fn positions_up_to(&self, n: NodeId, maxlen: usize) -> Result<Vec<Position>, GraphError> {
        self.check(n)?;
        let mut out = Vec::new();
        let mut layer = vec![(self.root, Vec::<usize>::new())];
        for len in 0..=maxlen {
            for (m, path) in &layer {
                if *m == n {
                    out.push(Position(path.clone()));
                }
            }
            if len == maxlen {
                break;
            }
            let mut next = Vec::new();
            for (m, path) in &layer {
                for (i, &s) in self.succs[m.0].iter().enumerate() {
                    let mut p = path.clone();
                    p.push(i);
                    next.push((s, p));
                }
            }
            layer = next;
        }
        Ok(out)
    }

    /// The least position of every node.
    pub fn least_positions(&self) -> Vec<Position> {
        let mut pos: Vec<Option<Position>> = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        pos[self.root.0] = Some(Position::root());
        queue.push_back(self.root);
        while let Some(n) = queue.pop_front() {
            let here = pos[n.0].clone().expect("visited");
            for (i, &s) in self.succs[n.0].iter().enumerate() {
                if pos[s.0].is_none() {
                    pos[s.0] = Some(here.child(i));
                    queue.push_back(s);
                }
            }
        }
        pos.into_iter().map(|p| p.expect("all nodes reachable")).collect()
    }

    /// The node addressed by `pos`, if the path exists.
    pub fn node_at(&self, pos: &Position) -> Option<NodeId> {
        let mut n = self.root;
        for &i in &pos.0 {
            n = *self.succs[n.0].get(i)?;
        }
        Some(n)
    }

    /// The sub-term graph rooted in `n`.
    pub fn subgraph(&self, n: NodeId) -> Result<TermGraph, GraphError> {
        self.check(n)?;
        Ok(TermGraph {
            labels: self.labels.clone(),
            succs: self.succs.clone(),
            root: n,
        }
        .reachable_in_bfs_order())
    }

    /// `true` iff every node has exactly one position.
    pub fn is_tree(&self) -> bool {
        let mut indegree = vec![0usize; self.node_count()];
        for s in &self.succs {
            for t in s {
                indegree[t.0] += 1;
            }
        }
        indegree[self.root.0] == 0 && indegree.iter().enumerate().all(|(i, &d)| i == self.root.0 || d == 1)
    }

    /// `true` iff the graph has a directed cycle.
    pub fn is_cyclic(&self) -> bool {
        has_cycle(self, self.root)
    }

    /// The unravelling of `self` cut at depth `d`: a term tree whose nodes at
    /// depth `d` are `⊥`. Nodes above the cut keep their labels.
    pub fn unravel_to_depth(&self, d: usize) -> TermGraph {
        let mut labels = Vec::new();
        let mut succs: Vec<Vec<NodeId>> = Vec::new();
        // (source node, depth, parent tree node, successor slot)
        let mut queue = VecDeque::new();
        queue.push_back((self.root, 0usize, None::<(usize, usize)>));
        while let Some((n, depth, parent)) = queue.pop_front() {
            let id = labels.len();
            if depth >= d {
                labels.push(Symbol::bottom());
                succs.push(Vec::new());
            } else {
                labels.push(self.labels[n.0].clone());
                succs.push(vec![NodeId(usize::MAX); self.succs[n.0].len()]);
                for (i, &s) in self.succs[n.0].iter().enumerate() {
                    queue.push_back((s, depth + 1, Some((id, i))));
                }
            }
            if let Some((p, slot)) = parent {
                succs[p][slot] = NodeId(id);
            }
        }
        TermGraph {
            labels,
            succs,
            root: NodeId(0),
        }
    }

    /// The full unravelling of an acyclic graph; `None` for cyclic graphs.
    pub fn unravel(&self) -> Option<TermGraph> {
        if self.is_cyclic() {
            None
        } else {
            Some(self.unravel_to_depth(self.longest_path() + 1))
        }
    }

    fn longest_path(&self) -> usize {
        // acyclic only
        fn go(g: &TermGraph, n: NodeId, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(v) = memo[n.0] {
                return v;
            }
            let v = g.succs[n.0].iter().map(|&s| go(g, s, memo) + 1).max().unwrap_or(0);
            memo[n.0] = Some(v);
            v
        }
        let mut memo = vec![None; self.node_count()];
        go(self, self.root, &mut memo)
    }

    /// Relabels every node selected by `cut` with `⊥`, removes its outgoing
    /// edges, then drops nodes no longer reachable.
    pub(crate) fn with_node_cut(&self, cut: impl Fn(NodeId) -> bool) -> TermGraph {
        let mut labels = self.labels.clone();
        let mut succs = self.succs.clone();
        for n in self.nodes() {
            if cut(n) {
                labels[n.0] = Symbol::bottom();
                succs[n.0].clear();
            }
        }
        TermGraph::from_parts(labels, succs, self.root)
    }
}

pub(crate) fn has_cycle<G: LabelledGraph + ?Sized>(g: &G, root: NodeId) -> bool {
    // iterative three-colour DFS
    let mut colour = vec![0u8; g.node_count()];
    let mut stack = vec![(root, 0usize)];
    colour[root.0] = 1;
    while let Some(&mut (n, ref mut i)) = stack.last_mut() {
        if let Some(&s) = g.successors(n).get(*i) {
            *i += 1;
            match colour[s.0] {
                0 => {
                    colour[s.0] = 1;
                    stack.push((s, 0));
                }
                1 => return true,
                _ => {}
            }
        } else {
            colour[n.0] = 2;
            stack.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::from_pairs([("f", 2), ("c", 0), ("app", 2), ("Y", 0), ("g", 1)]).unwrap()
    }

    fn shared_fcc() -> TermGraph {
        TermGraph::validate(&RawGraph::from_table("n0", &[("n0", "f", &["n1", "n1"]), ("n1", "c", &[])]), &sig()).unwrap()
    }

    fn h0() -> TermGraph {
        TermGraph::validate(
            &RawGraph::from_table("a", &[("a", "app", &["x", "a"]), ("x", "f0", &[])]),
            &Signature::from_pairs([("app", 2), ("f0", 0)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn validate_minimal_shared_graph() {
        let g = shared_fcc();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.successors(NodeId(0)), &[NodeId(1), NodeId(1)]);
    }

    #[test]
    fn validate_rejects_arity_mismatch() {
        let raw = RawGraph::from_table("n0", &[("n0", "f", &["n1"]), ("n1", "c", &[])]);
        match TermGraph::validate(&raw, &sig()) {
            Err(GraphError::ArityMismatch { node, expected: 2, found: 1 }) => assert_eq!(node, "n0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_unreachable() {
        let raw = RawGraph::from_table("n0", &[("n0", "c", &[]), ("n1", "c", &[])]);
        assert_eq!(TermGraph::validate(&raw, &sig()), Err(GraphError::UnreachableNode("n1".into())));
    }

    #[test]
    fn validate_rejects_unknown_and_dangling() {
        let raw = RawGraph::from_table("n0", &[("n0", "h", &[])]);
        assert_eq!(TermGraph::validate(&raw, &sig()), Err(GraphError::UnknownSymbol("h".into())));
        let raw = RawGraph::from_table("n0", &[("n0", "g", &["zz"])]);
        assert!(matches!(TermGraph::validate(&raw, &sig()), Err(GraphError::DanglingSuccessor { .. })));
    }

    #[test]
    fn depth_examples() {
        let g = shared_fcc();
        assert_eq!(g.depth(g.root()).unwrap(), 0);
        assert_eq!(g.depth(NodeId(1)).unwrap(), 1);
        let h = h0();
        assert_eq!(h.depth(NodeId(1)).unwrap(), 1);
        assert_eq!(h.depth(NodeId(7)), Err(GraphError::NoSuchNode(NodeId(7))));
    }

    #[test]
    fn positions_examples() {
        let g = shared_fcc();
        assert_eq!(g.positions_up_to(g.root(), 0).unwrap(), vec![Position::root()]);
        assert_eq!(
            g.positions_up_to(NodeId(1), 1).unwrap(),
            vec![Position(vec![0]), Position(vec![1])]
        );
        let h = h0();
        assert_eq!(
            h.positions_up_to(NodeId(1), 2).unwrap(),
            vec![Position(vec![0]), Position(vec![1, 0])]
        );
    }

    #[test]
    fn subgraph_examples() {
        let g = shared_fcc();
        assert_eq!(g.subgraph(g.root()).unwrap(), g);
        let h = h0();
        assert_eq!(h.subgraph(h.root()).unwrap(), h);
        let c = g.subgraph(NodeId(1)).unwrap();
        assert_eq!(c.node_count(), 1);
        assert_eq!(c.label(c.root()).as_str(), "c");
    }

    #[test]
    fn unravel_examples() {
        let g = shared_fcc();
        let t = g.unravel_to_depth(2);
        assert_eq!(t.node_count(), 3);
        assert!(t.is_tree());
        let h = h0();
        let u = h.unravel_to_depth(2);
        // app(f0, app(bot, bot))
        let labels: Vec<_> = u.nodes().map(|n| u.label(n).to_string()).collect();
        assert_eq!(labels, ["app", "f0", "app", "bot", "bot"]);
        assert_eq!(g.unravel_to_depth(0), TermGraph::bottom());
        assert!(h.unravel().is_none());
        assert_eq!(g.unravel().unwrap(), t);
    }

    #[test]
    fn tree_and_cycle_predicates() {
        assert!(!shared_fcc().is_tree());
        assert!(!shared_fcc().is_cyclic());
        assert!(h0().is_cyclic());
        assert!(TermGraph::bottom().is_tree());
    }

    #[test]
    fn signature_rejects_conflicts() {
        let mut s = Signature::new();
        s.declare("f".into(), 2).unwrap();
        assert!(s.declare("f".into(), 1).is_err());
        assert!(s.declare("bot".into(), 1).is_err());
        assert_eq!(s.arity(&"$x".into()), Some(0));
    }
}
