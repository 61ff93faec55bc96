//! Shared generators and fixtures for the integration tests.
#![allow(dead_code)]

use itgr::canon::canonicalize;
use itgr::terms::Term;
use itgr::{
    find_redexes, run, CanonicalTermGraph, Document, Grs, NodeId, RawGraph, RawNode, RunOptions, Script, ScriptStep,
    Signature, Strategy as Reduction, Symbol, TermGraph, Trace,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Symbols of the random graphs: `(name, arity)`.
pub const SYMBOLS: [(&str, usize); 6] = [("f", 2), ("g", 1), ("a", 0), ("b", 0), ("c", 0), ("bot", 0)];

pub fn sig() -> Signature {
    Signature::from_pairs(SYMBOLS.iter().copied().filter(|(s, _)| *s != "bot")).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random graph with at most `max_nodes` nodes (before garbage
/// collection). Successors may point anywhere, so cycles and sharing occur.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, allow_bot: bool) -> TermGraph {
    let n = rng.gen_range(1..=max_nodes);
    let mut labels = Vec::with_capacity(n);
    let mut succs = Vec::with_capacity(n);
    for i in 0..n {
        let choices: Vec<(&str, usize)> = SYMBOLS
            .iter()
            .copied()
            .filter(|(s, _)| allow_bot || *s != "bot")
            .collect();
        let (s, arity) = choices[rng.gen_range(0..choices.len())];
        labels.push(Symbol::new(s));
        // prefer forward edges so that deeper graphs are common
        succs.push(
            (0..arity)
                .map(|_| {
                    if i + 1 < n && rng.gen_bool(0.8) {
                        NodeId(rng.gen_range(i + 1..n))
                    } else {
                        NodeId(rng.gen_range(0..n))
                    }
                })
                .collect(),
        );
    }
    TermGraph::from_parts(labels, succs, NodeId(0))
}

/// A random variation of `g`: some nodes cut to `⊥`, some leaves
/// relabelled, and possibly a successor redirected to a copy-equivalent
/// node.
pub fn vary(rng: &mut impl Rng, g: &TermGraph) -> TermGraph {
    let mut labels: Vec<Symbol> = g.nodes().map(|n| g.label(n).clone()).collect();
    let mut succs: Vec<Vec<NodeId>> = g.nodes().map(|n| g.successors(n).to_vec()).collect();
    for i in 0..labels.len() {
        match rng.gen_range(0..10) {
            0 => {
                labels[i] = Symbol::bottom();
                succs[i].clear();
            }
            1 if succs[i].is_empty() => {
                labels[i] = Symbol::new(["a", "b", "c"][rng.gen_range(0..3)]);
            }
            2 if !succs[i].is_empty() => {
                let slot = rng.gen_range(0..succs[i].len());
                let target = rng.gen_range(0..labels.len());
                succs[i][slot] = NodeId(target);
            }
            _ => {}
        }
    }
    TermGraph::from_parts(labels, succs, g.root())
}

/// A random pair: independent, or a graph and one of its variations.
pub fn random_pair(rng: &mut impl Rng, max_nodes: usize) -> (TermGraph, TermGraph) {
    let g = random_graph(rng, max_nodes, true);
    let h = if rng.gen_bool(0.3) { random_graph(rng, max_nodes, true) } else { vary(rng, &g) };
    if rng.gen_bool(0.5) {
        (g, h)
    } else {
        (h, g)
    }
}

/// `g` re-encoded as a raw table with shuffled rows and fresh names, then
/// validated again: an isomorphic graph with a different representation.
pub fn shuffled(rng: &mut impl Rng, g: &TermGraph) -> TermGraph {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.shuffle(rng);
    let name = |i: usize| format!("v{}", order.iter().position(|&o| o == i).unwrap() * 7 + 3);
    let nodes = order
        .iter()
        .map(|&i| RawNode {
            name: name(i),
            symbol: g.label(NodeId(i)).clone(),
            successors: g.successors(NodeId(i)).iter().map(|s| name(s.0)).collect(),
        })
        .collect();
    let raw = RawGraph {
        root: name(g.root().0),
        nodes,
    };
    TermGraph::validate(&raw, &sig()).unwrap()
}

/// A random finite term with at most `max_size` symbols.
pub fn random_term(rng: &mut impl Rng, max_size: usize, allow_bot: bool) -> Term {
    fn go(rng: &mut impl Rng, budget: &mut usize, allow_bot: bool) -> Term {
        let choices: Vec<(&str, usize)> = SYMBOLS
            .iter()
            .copied()
            .filter(|(s, a)| (allow_bot || *s != "bot") && (*budget > *a + 1 || *a == 0))
            .collect();
        let (s, arity) = choices[rng.gen_range(0..choices.len())];
        *budget = budget.saturating_sub(1);
        Term::new(s, (0..arity).map(|_| go(rng, budget, allow_bot)).collect())
    }
    let mut budget = rng.gen_range(1..=max_size);
    go(rng, &mut budget, allow_bot)
}

/// A random variation of a term: some subterms replaced by `⊥` or by a
/// constant.
pub fn vary_term(rng: &mut impl Rng, t: &Term) -> Term {
    match rng.gen_range(0..12) {
        0 => Term::bottom(),
        1 => Term::constant(["a", "b", "c"][rng.gen_range(0..3)]),
        _ => Term::new(t.symbol.clone(), t.args.iter().map(|a| vary_term(rng, a)).collect()),
    }
}

pub fn arb_graph(max_nodes: usize) -> impl Strategy<Value = TermGraph> {
    any::<u64>().prop_map(move |seed| random_graph(&mut rng(seed), max_nodes, true))
}

pub fn arb_pair(max_nodes: usize) -> impl Strategy<Value = (TermGraph, TermGraph)> {
    any::<u64>().prop_map(move |seed| random_pair(&mut rng(seed), max_nodes))
}

// ---- documents used throughout -------------------------------------------

pub const FIG1: &str = include_str!("../../../cli/tests/data/fig1.tgr");
pub const WEIRD: &str = include_str!("../../../cli/tests/data/weird.tgr");
pub const FIXPOINT: &str = include_str!("../../../cli/tests/data/fixpoint.tgr");
pub const FROM: &str = include_str!("../../../cli/tests/data/from.tgr");
pub const LOOP: &str = include_str!("../../../cli/tests/data/loop.tgr");

pub fn doc(text: &str) -> Document {
    Document::parse(text).unwrap()
}

pub fn start(doc: &Document, name: &str) -> CanonicalTermGraph {
    canonicalize(doc.graph(name).unwrap())
}

pub fn graph(root: &str, table: &[(&str, &str, &[&str])]) -> TermGraph {
    let raw = RawGraph::from_table(root, table);
    TermGraph::validate(&raw, &raw.infer_signature().unwrap()).unwrap()
}

/// The alternating trace of the weird rules, recorded past its cycle.
pub fn weird_trace(steps: usize) -> Trace {
    let d = doc(WEIRD);
    let script = d.scripts["alternate"].clone();
    let options = RunOptions {
        max_steps: steps,
        stop_on_cycle: false,
    };
    run(&start(&d, "g0"), &d.systems["weird"], &Reduction::Scripted(script), options).unwrap()
}

/// The unfolding trace of the fixed point rule.
pub fn unfold_trace(steps: usize) -> Trace {
    let d = doc(FIXPOINT);
    let options = RunOptions {
        max_steps: steps,
        stop_on_cycle: true,
    };
    run(&start(&d, "g0"), &d.systems["unfold"], &Reduction::LeftmostOutermost, options).unwrap()
}

pub fn knot_trace() -> Trace {
    let d = doc(FIXPOINT);
    run(&start(&d, "g0"), &d.systems["knot"], &Reduction::LeftmostOutermost, RunOptions::default()).unwrap()
}

pub fn loop_trace() -> Trace {
    let d = doc(LOOP);
    run(&start(&d, "a"), &d.all_rules(), &Reduction::LeftmostOutermost, RunOptions::default()).unwrap()
}

pub fn from_trace(steps: usize) -> Trace {
    let d = doc(FROM);
    let options = RunOptions {
        max_steps: steps,
        stop_on_cycle: true,
    };
    run(&start(&d, "start"), &d.all_rules(), &Reduction::LeftmostOutermost, options).unwrap()
}

/// `app_0 .. app_{k-1}`, each `app(f, app_{i+1})` with one shared `f`, and
/// `⊥` in place of `app_k`: the depth-`k` approximant of the infinite
/// unfolding, built by hand.
pub fn unfolding_cut(k: usize) -> TermGraph {
    let names: Vec<String> = (0..=k).map(|i| format!("a{i}")).collect();
    let mut nodes: Vec<RawNode> = (0..k)
        .map(|i| RawNode {
            name: names[i].clone(),
            symbol: Symbol::new("app"),
            successors: vec!["f".into(), names[i + 1].clone()],
        })
        .collect();
    nodes.push(RawNode {
        name: names[k].clone(),
        symbol: Symbol::bottom(),
        successors: vec![],
    });
    nodes.push(RawNode {
        name: "f".into(),
        symbol: Symbol::new("f"),
        successors: vec![],
    });
    let raw = RawGraph {
        root: names[0].clone(),
        nodes,
    };
    TermGraph::validate(&raw, &raw.infer_signature().unwrap()).unwrap()
}

/// Rules for random single steps over the random-graph signature.
pub const RULE_BANK: &str = "
rule swap { lhs l; rhs r; l: f(x,y); x: $x; y: $y; r: f(y,x); }
rule drop { lhs l; rhs r; l: f(x,a); x: $x; a: a; r: g(x); }
rule collapse { lhs l; rhs x; l: g(x); x: $x; }
rule dup { lhs l; rhs r; l: g(x); x: $x; r: f(x,x); }
rule grow { lhs l; rhs r; l: a; r: g(b); b: b; }
rule knot { lhs l; rhs r; l: f(x,b); x: $x; b: b; r: f(r,x); }
rule back { lhs l; rhs r; l: g(m); m: g(x); x: $x; r: f(l,m); }
";

pub fn rule_bank() -> Grs {
    // declare the shared symbols so that arities agree with `sig()`
    let text = format!("{RULE_BANK}\ntermgraph decl {{ root n; n: f(m, m); m: g(k); k: c; }}");
    doc(&text).all_rules()
}

/// A random single step: a random graph with at least one redex and a
/// uniformly chosen redex.
pub fn random_step(rng: &mut impl Rng, grs: &Grs) -> itgr::Step {
    loop {
        let g = canonicalize(&random_graph(rng, 8, true));
        let redexes = find_redexes(grs, &g);
        if redexes.is_empty() {
            continue;
        }
        let (rule, node) = &redexes[rng.gen_range(0..redexes.len())];
        return itgr::reduce_step(&g, grs.rule(rule).unwrap(), *node).unwrap();
    }
}

/// A script that applies `rule` at each of `positions` in turn.
pub fn script(rule: &str, positions: &[&[usize]]) -> Script {
    Script {
        name: "s".into(),
        steps: positions
            .iter()
            .map(|p| ScriptStep {
                rule: rule.into(),
                position: itgr::Position(p.to_vec()),
            })
            .collect(),
    }
}
