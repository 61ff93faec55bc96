//! The `.tgr` text format.
//!
//! ```text
//! # the two graphs of the alternating example
//! termgraph g0 { root n0; n0: f(n1,n2); n1: c; n2: c; }
//! termgraph g1 { root n0; n0: f(n1,n1); n1: c; }
//! rule r { lhs l; rhs r; l: app(y,x); y: Y; x: $x; r: app(x,l); }
//! grs fix { use r; }
//! script s { step r at []; step r at [1]; }
//! ```
//!
//! Node lines may refer to nodes defined later in the same block. Symbol
//! arities are inferred over the whole document and must agree.

use std::fmt::{self, Write as _};

use indexmap::IndexMap;
use thiserror::Error;

use crate::canon::canonicalize;
use crate::error::{GraphError, RewriteError};
use crate::graph::{NodeId, Position, RawGraph, RawNode, Signature, Symbol, TermGraph};
use crate::rewrite::{Grs, RawRule, Rule, Script, ScriptStep};

/// Characters allowed in names and symbols.
pub fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || "_$@'.+*-<>=!?/|&^~".contains(c)
}

/// A line/column location, both 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{at}: syntax error: {message}")]
    Syntax { at: Location, message: String },
    #[error("{at}: {source}")]
    Graph { at: Location, source: GraphError },
    #[error("{at}: {source}")]
    Rule { at: Location, source: RewriteError },
    #[error("{at}: {name} is defined twice")]
    DuplicateDefinition { at: Location, name: String },
    #[error("{at}: {name} does not name a rule")]
    UnknownRule { at: Location, name: String },
}

impl ParseError {
    pub fn location(&self) -> Location {
        match self {
            ParseError::Syntax { at, .. }
            | ParseError::Graph { at, .. }
            | ParseError::Rule { at, .. }
            | ParseError::DuplicateDefinition { at, .. }
            | ParseError::UnknownRule { at, .. } => *at,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    at: Location,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut chars = line.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            let at = Location {
                line: ln + 1,
                col: line[..i].chars().count() + 1,
            };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                continue;
            } else if "{}();:,[]".contains(c) {
                out.push(Token { tok: Tok::Punct(c), at });
            } else if is_symbol_char(c) {
                let mut word = String::from(c);
                while let Some(&(_, d)) = chars.peek() {
                    if !is_symbol_char(d) {
                        break;
                    }
                    word.push(d);
                    chars.next();
                }
                out.push(Token { tok: Tok::Word(word), at });
            } else {
                return Err(ParseError::Syntax {
                    at,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    Ok(out)
}

/// A node line with the location of its name.
#[derive(Clone, Debug)]
struct NodeLine {
    node: RawNode,
    at: Location,
}

#[derive(Clone, Debug)]
enum Item {
    Graph { name: String, root: String, lines: Vec<NodeLine> },
    Rule { name: String, lhs: String, rhs: String, lines: Vec<NodeLine> },
    Grs { name: String, uses: Vec<(String, Location)> },
    Script { name: String, steps: Vec<(String, Position, Location)> },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: Location,
}

impl Parser {
    fn here(&self) -> Location {
        self.toks.get(self.pos).map_or(self.end, |t| t.at)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            at: self.here(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(format!("expected '{kw}'")),
        }
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected '{c}'"))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn item(&mut self) -> Result<(Item, Location), ParseError> {
        let at = self.here();
        let kind = self.word("'termgraph', 'rule', 'grs' or 'script'")?;
        let item = match kind.as_str() {
            "termgraph" => {
                let name = self.word("a graph name")?;
                self.punct('{')?;
                self.keyword("root")?;
                let root = self.word("a node name")?;
                self.punct(';')?;
                let lines = self.node_lines()?;
                Item::Graph { name, root, lines }
            }
            "rule" => {
                let name = self.word("a rule name")?;
                self.punct('{')?;
                self.keyword("lhs")?;
                let lhs = self.word("a node name")?;
                self.punct(';')?;
                self.keyword("rhs")?;
                let rhs = self.word("a node name")?;
                self.punct(';')?;
                let lines = self.node_lines()?;
                Item::Rule { name, lhs, rhs, lines }
            }
            "grs" => {
                let name = self.word("a system name")?;
                self.punct('{')?;
                let mut uses = Vec::new();
                while !self.eat('}') {
                    self.keyword("use")?;
                    let at = self.here();
                    uses.push((self.word("a rule name")?, at));
                    self.punct(';')?;
                }
                Item::Grs { name, uses }
            }
            "script" => {
                let name = self.word("a script name")?;
                self.punct('{')?;
                let mut steps = Vec::new();
                while !self.eat('}') {
                    self.keyword("step")?;
                    let at = self.here();
                    let rule = self.word("a rule name")?;
                    self.keyword("at")?;
                    let pos = self.position()?;
                    self.punct(';')?;
                    steps.push((rule, pos, at));
                }
                Item::Script { name, steps }
            }
            _ => {
                self.pos -= 1;
                return self.fail(format!("unknown item kind '{kind}'"));
            }
        };
        Ok((item, at))
    }

    /// Node lines up to and including the closing brace.
    fn node_lines(&mut self) -> Result<Vec<NodeLine>, ParseError> {
        let mut lines = Vec::new();
        while !self.eat('}') {
            let at = self.here();
            let name = self.word("a node name or '}'")?;
            self.punct(':')?;
            let symbol = Symbol::new(self.word("a symbol")?);
            let mut successors = Vec::new();
            if self.eat('(') {
                loop {
                    successors.push(self.word("a node name")?);
                    if self.eat(')') {
                        break;
                    }
                    self.punct(',')?;
                }
            }
            self.punct(';')?;
            lines.push(NodeLine {
                node: RawNode { name, symbol, successors },
                at,
            });
        }
        Ok(lines)
    }

    fn position(&mut self) -> Result<Position, ParseError> {
        self.punct('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(Position(out));
        }
        loop {
            let n = self.word("a natural number")?;
            match n.parse::<usize>() {
                Ok(i) => out.push(i),
                Err(_) => {
                    self.pos -= 1;
                    return self.fail("expected a natural number");
                }
            }
            if self.eat(']') {
                return Ok(Position(out));
            }
            self.punct(',')?;
        }
    }
}

/// A validated graph together with the names its nodes had in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedGraph {
    pub graph: TermGraph,
    /// `names[i]` is the source name of `NodeId(i)`.
    pub names: Vec<String>,
}

impl NamedGraph {
    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(NodeId)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub signature: Signature,
    pub graphs: IndexMap<String, NamedGraph>,
    pub rules: IndexMap<String, Rule>,
    pub systems: IndexMap<String, Grs>,
    pub scripts: IndexMap<String, Script>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, ParseError> {
        let toks = lex(text)?;
        let end = Location {
            line: text.lines().count().max(1),
            col: text.lines().last().map_or(1, |l| l.chars().count() + 1),
        };
        let mut p = Parser { toks, pos: 0, end };
        let mut items = Vec::new();
        while p.peek().is_some() {
            items.push(p.item()?);
        }
        build(items)
    }

    pub fn graph(&self, name: &str) -> Option<&TermGraph> {
        self.graphs.get(name).map(|g| &g.graph)
    }

    /// All rules as one system, in declaration order.
    pub fn all_rules(&self) -> Grs {
        Grs::new(self.signature.clone(), self.rules.values().cloned().collect()).expect("rule names are unique")
    }
}

fn build(items: Vec<(Item, Location)>) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    // signature first, since node lines anywhere fix the arities
    for (item, _) in &items {
        let lines = match item {
            Item::Graph { lines, .. } | Item::Rule { lines, .. } => lines,
            _ => continue,
        };
        for line in lines {
            let (sym, found) = (&line.node.symbol, line.node.successors.len());
            if let Err(GraphError::ArityConflict { first, .. }) = doc.signature.declare(sym.clone(), found) {
                return Err(ParseError::Graph {
                    at: line.at,
                    source: GraphError::ArityMismatch {
                        node: line.node.name.clone(),
                        expected: first,
                        found,
                    },
                });
            }
        }
    }
    let mut seen: IndexMap<String, ()> = IndexMap::new();
    for (item, at) in items {
        let name = match &item {
            Item::Graph { name, .. } | Item::Rule { name, .. } | Item::Grs { name, .. } | Item::Script { name, .. } => name,
        };
        if seen.insert(name.clone(), ()).is_some() {
            return Err(ParseError::DuplicateDefinition { at, name: name.clone() });
        }
        match item {
            Item::Graph { name, root, lines } => {
                let raw = RawGraph {
                    root,
                    nodes: lines.iter().map(|l| l.node.clone()).collect(),
                };
                let graph = TermGraph::validate(&raw, &doc.signature).map_err(|source| ParseError::Graph {
                    at: locate(&lines, &source).unwrap_or(at),
                    source,
                })?;
                let names = raw.nodes.into_iter().map(|n| n.name).collect();
                doc.graphs.insert(name, NamedGraph { graph, names });
            }
            Item::Rule { name, lhs, rhs, lines } => {
                let raw = RawRule {
                    name: name.clone(),
                    lhs,
                    rhs,
                    nodes: lines.iter().map(|l| l.node.clone()).collect(),
                };
                let rule = Rule::validate(&raw, &doc.signature).map_err(|source| ParseError::Rule {
                    at: match &source {
                        RewriteError::Graph(g) => locate(&lines, g),
                        _ => None,
                    }
                    .unwrap_or(at),
                    source,
                })?;
                doc.rules.insert(name, rule);
            }
            Item::Grs { name, uses } => {
                let mut rules = Vec::new();
                for (rule, at) in uses {
                    let r = doc.rules.get(&rule).ok_or(ParseError::UnknownRule { at, name: rule })?;
                    rules.push(r.clone());
                }
                let grs = Grs::new(doc.signature.clone(), rules).map_err(|source| ParseError::Rule { at, source })?;
                doc.systems.insert(name, grs);
            }
            Item::Script { name, steps } => {
                let mut out = Vec::new();
                for (rule, position, at) in steps {
                    if !doc.rules.contains_key(&rule) {
                        return Err(ParseError::UnknownRule { at, name: rule });
                    }
                    out.push(ScriptStep { rule, position });
                }
                doc.scripts.insert(name.clone(), Script { name, steps: out });
            }
        }
    }
    // systems are built before all arities may be known in declaration
    // order, so refresh their signature
    for grs in doc.systems.values_mut() {
        *grs = Grs::new(doc.signature.clone(), grs.rules().to_vec()).expect("already checked");
    }
    Ok(doc)
}

/// The line of the node an error refers to.
fn locate(lines: &[NodeLine], err: &GraphError) -> Option<Location> {
    let node = match err {
        GraphError::ArityMismatch { node, .. }
        | GraphError::UnreachableNode(node)
        | GraphError::DanglingSuccessor { node, .. }
        | GraphError::DuplicateNode(node) => node,
        _ => return None,
    };
    lines.iter().rev().find(|l| &l.node.name == node).map(|l| l.at)
}

fn write_node(out: &mut String, name: &str, symbol: &Symbol, succs: impl Iterator<Item = String>) {
    let succs: Vec<String> = succs.collect();
    if succs.is_empty() {
        let _ = writeln!(out, "  {name}: {symbol};");
    } else {
        let _ = writeln!(out, "  {name}: {symbol}({});", succs.join(", "));
    }
}

/// Prints `g` with nodes named `n0, n1, ...` in node order.
pub fn print_graph(name: &str, g: &TermGraph) -> String {
    let mut out = format!("termgraph {name} {{\n  root {};\n", g.root());
    for n in g.nodes() {
        write_node(&mut out, &n.to_string(), g.label(n), g.successors(n).iter().map(NodeId::to_string));
    }
    out.push_str("}\n");
    out
}

/// Prints the canonical form of `g`; equal canonical graphs print identically.
pub fn print_canonical(name: &str, g: &TermGraph) -> String {
    print_graph(name, &canonicalize(g))
}

pub fn print_rule(rule: &Rule) -> String {
    let names = rule.node_names();
    let mut out = format!(
        "rule {} {{\n  lhs {};\n  rhs {};\n",
        rule.name(),
        names[rule.lhs_root().0],
        names[rule.rhs_root().0]
    );
    for i in 0..rule.node_count() {
        let n = NodeId(i);
        write_node(&mut out, &names[i], rule.label(n), rule.successors(n).iter().map(|s| names[s.0].clone()));
    }
    out.push_str("}\n");
    out
}

pub fn print_script(script: &Script) -> String {
    let mut out = format!("script {} {{\n", script.name);
    for s in &script.steps {
        let _ = writeln!(out, "  step {} at {};", s.rule, s.position);
    }
    out.push_str("}\n");
    out
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, g) in &self.graphs {
            f.write_str(&print_graph(name, &g.graph))?;
        }
        for rule in self.rules.values() {
            f.write_str(&print_rule(rule))?;
        }
        for (name, grs) in &self.systems {
            writeln!(f, "grs {name} {{")?;
            for r in grs.rules() {
                writeln!(f, "  use {};", r.name())?;
            }
            writeln!(f, "}}")?;
        }
        for script in self.scripts.values() {
            f.write_str(&print_script(script))?;
        }
        Ok(())
    }
}
