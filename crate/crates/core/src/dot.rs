//! Graphviz export.

use std::fmt::Write as _;

use crate::canon::canonicalize;
use crate::graph::TermGraph;

/// A DOT digraph of the canonical form of `g`. Nodes are named `n0, n1, ...`
/// in least-position order and edges carry their successor index, so equal
/// canonical graphs export byte-identically.
pub fn export_dot(g: &TermGraph) -> String {
    let g = canonicalize(g);
    let mut out = String::from("digraph termgraph {\n  node [shape=plaintext];\n");
    let _ = writeln!(out, "  root [shape=point];\n  root -> {};", g.root());
    for n in g.nodes() {
        let _ = writeln!(out, "  {n} [label=\"{}\"];", escape(g.label(n).as_str()));
    }
    for n in g.nodes() {
        for (i, s) in g.successors(n).iter().enumerate() {
            let _ = writeln!(out, "  {n} -> {s} [label=\"{i}\"];");
        }
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{RawGraph, Signature};

    fn g(root: &str, table: &[(&str, &str, &[&str])]) -> TermGraph {
        let sig = Signature::from_pairs([("f", 2), ("c", 0), ("app", 2)]).unwrap();
        TermGraph::validate(&RawGraph::from_table(root, table), &sig).unwrap()
    }

    #[test]
    fn shared_pair() {
        let dot = export_dot(&g("a", &[("a", "f", &["b", "b"]), ("b", "c", &[])]));
        assert_eq!(
            dot,
            "digraph termgraph {\n  node [shape=plaintext];\n  root [shape=point];\n  root -> n0;\n  \
             n0 [label=\"f\"];\n  n1 [label=\"c\"];\n  n0 -> n1 [label=\"0\"];\n  n0 -> n1 [label=\"1\"];\n}\n"
        );
    }

    #[test]
    fn self_loop_and_stability() {
        let h0 = g("r", &[("r", "app", &["x", "r"]), ("x", "c", &[])]);
        let dot = export_dot(&h0);
        assert!(dot.contains("n0 -> n0 [label=\"1\"];"));
        let renamed = g("x", &[("y", "c", &[]), ("x", "app", &["y", "x"])]);
        assert_eq!(dot, export_dot(&renamed));
    }
}
