//! `itgr`: command-line driver for term graph analysis and rewriting.
//!
//! Exit codes: 0 success or a true/converged answer, 1 a false or
//! diverged answer, 2 inconclusive, 64 usage errors, 65 parse or
//! validation errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use itgr::syntax::{print_canonical, print_graph};
use itgr::{
    bisimilar, canonicalize, cross_check, dist, export_dot, glb_set, iso, leq_bot, local_truncate, run, truncate,
    CanonicalTermGraph, Certificate, ConvergenceReport, Depth, Discipline, Document, Evidence, Grs, RunOptions,
    Strategy, TermGraph, Termination, Trace, Verdict,
};
use serde_json::{json, Value};

const EXIT_FALSE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "itgr", version, about = "Infinitary term graph rewriting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct One {
    /// Document (.tgr) file
    file: PathBuf,
    /// Term graph name
    graph: String,
}

#[derive(Args, Debug)]
struct Two {
    file: PathBuf,
    first: String,
    second: String,
}

#[derive(Args, Debug)]
struct Reduction {
    file: PathBuf,
    graph: String,
    /// Rewriting system to use (default: the only one, else all rules)
    #[arg(long)]
    grs: Option<String>,
    /// `lo` or `script:NAME` (default: the only script, else lo)
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, default_value_t = 1000)]
    max_steps: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical form of a graph
    Canon(One),
    /// Are two graphs isomorphic?
    Iso(Two),
    /// Are two graphs bisimilar (same unravelling)?
    Bisim(Two),
    /// Distance between two graphs in the simple metric
    Dist(Two),
    /// Is the first graph below the second in the simple order?
    Leq(Two),
    /// Greatest lower bound of one or more graphs
    Glb {
        file: PathBuf,
        #[arg(required = true)]
        graphs: Vec<String>,
    },
    /// Simple truncation at a depth (a number or `omega`)
    Truncate {
        #[command(flatten)]
        target: One,
        #[arg(short)]
        d: String,
    },
    /// Replace one node by bot
    LocalTruncate {
        #[command(flatten)]
        target: One,
        /// Node name as written in the document
        #[arg(short)]
        n: String,
    },
    /// Unravel to a tree, cut at a depth
    Unravel {
        #[command(flatten)]
        target: One,
        #[arg(short)]
        d: usize,
    },
    /// Reduce a graph and print the last graph reached
    Reduce {
        #[command(flatten)]
        reduction: Reduction,
        /// Write every graph of the reduction to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Classify a reduction under the convergence disciplines
    Converge {
        #[command(flatten)]
        reduction: Reduction,
        /// weak-m, weak-p, strong-m, strong-p or all
        #[arg(long, default_value = "all")]
        mode: String,
        #[arg(short, default_value_t = 16)]
        d: usize,
        #[arg(short, default_value_t = 8)]
        w: usize,
        #[arg(long)]
        json: bool,
    },
    /// Graphviz export of the canonical form
    ExportDot(One),
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn data(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: message.to_string(),
    }
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Document::parse(&text).map_err(|e| data(format!("{}:{e}", path.display())))
}

fn graph<'a>(doc: &'a Document, name: &str) -> Result<&'a TermGraph, Failure> {
    doc.graph(name).ok_or_else(|| usage(format!("no term graph named {name}")))
}

fn answer(b: bool) -> (String, u8) {
    (format!("{b}\n"), if b { 0 } else { EXIT_FALSE })
}

fn select_grs(doc: &Document, name: Option<&str>) -> Result<Grs, Failure> {
    match name {
        Some(n) => doc.systems.get(n).cloned().ok_or_else(|| usage(format!("no grs named {n}"))),
        None if doc.systems.len() == 1 => Ok(doc.systems[0].clone()),
        None => Ok(doc.all_rules()),
    }
}

fn select_strategy(doc: &Document, choice: Option<&str>) -> Result<Strategy, Failure> {
    match choice {
        Some("lo") => Ok(Strategy::LeftmostOutermost),
        Some(s) => {
            let name = s
                .strip_prefix("script:")
                .ok_or_else(|| usage(format!("unknown strategy {s}; expected lo or script:NAME")))?;
            let script = doc.scripts.get(name).ok_or_else(|| usage(format!("no script named {name}")))?;
            Ok(Strategy::Scripted(script.clone()))
        }
        None if doc.scripts.len() == 1 => Ok(Strategy::Scripted(doc.scripts[0].clone())),
        None => Ok(Strategy::LeftmostOutermost),
    }
}

fn reduce(r: &Reduction, stop_on_cycle: bool) -> Result<Trace, Failure> {
    let doc = load(&r.file)?;
    let g = canonicalize(graph(&doc, &r.graph)?);
    let grs = select_grs(&doc, r.grs.as_deref())?;
    let strategy = select_strategy(&doc, r.strategy.as_deref())?;
    let options = RunOptions {
        max_steps: r.max_steps,
        stop_on_cycle,
    };
    run(&g, &grs, &strategy, options).map_err(data)
}

fn termination(t: Termination) -> &'static str {
    match t {
        Termination::NormalForm => "normal-form",
        Termination::StepBudget => "step-budget",
        Termination::CycleDetected => "cycle-detected",
    }
}

fn trace_document(trace: &Trace) -> String {
    let mut out = format!(
        "# steps: {}\n# termination: {}\n",
        trace.steps.len(),
        termination(trace.termination)
    );
    if let Some(c) = trace.cycle {
        let _ = writeln!(out, "# cycle: start {} period {}", c.start, c.period);
    }
    out.push_str(&print_graph("g0", &trace.initial));
    for (i, s) in trace.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "# step {i}: {} at {} (depth {})",
            s.rule, s.redex_node, s.redex_depth
        );
        out.push_str(&print_graph(&format!("g{}", i + 1), &s.target));
    }
    out
}

fn one_line(g: &CanonicalTermGraph) -> String {
    print_graph("limit", g).split_whitespace().collect::<Vec<_>>().join(" ")
}

fn certificate_json(c: &Certificate) -> Value {
    match c {
        Certificate::Periodic(w) => json!({
            "kind": "periodic",
            "start": w.cycle.start,
            "period": w.cycle.period,
            "first": w.first,
            "second": w.second,
            "distance": w.distance.to_string(),
        }),
        Certificate::BoundedRedexDepth { cycle, max_depth } => json!({
            "kind": "bounded-redex-depth",
            "start": cycle.start,
            "period": cycle.period,
            "max_depth": max_depth,
        }),
    }
}

fn report_json(r: &ConvergenceReport, depth: usize) -> Value {
    let mut v = json!({
        "discipline": r.discipline.as_str(),
        "verdict": r.verdict.to_string(),
        "depth": depth,
        "limit": r.limit.as_ref().map(|g| print_graph("limit", g)),
    });
    if let Some(c) = r.verdict.certificate() {
        v["certificate"] = certificate_json(c);
    }
    v
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn report_text(r: &ConvergenceReport, depth: usize) -> String {
    let mut out = format!("discipline: {}\nverdict: {}\ndepth: {depth}\n", r.discipline, r.verdict);
    match &r.limit {
        Some(g) => {
            let _ = writeln!(out, "limit: {}", one_line(g));
        }
        None => out.push_str("limit: none\n"),
    }
    if let Some(c) = r.verdict.certificate() {
        let _ = writeln!(out, "certificate: {c}");
    }
    match &r.evidence {
        Evidence::Closed => out.push_str("evidence: normal form reached\n"),
        Evidence::Distances(d) => {
            let _ = writeln!(out, "distances: {}", join(d));
        }
        Evidence::Liminf {
            status,
            stabilization_index,
        } => {
            let _ = writeln!(out, "liminf: {status:?} from {stabilization_index}");
        }
        Evidence::RedexDepths {
            distances,
            redex_depths,
        } => {
            let _ = writeln!(out, "distances: {}\nredex-depths: {}", join(distances), join(redex_depths));
        }
        Evidence::Contexts {
            status,
            stabilization_index,
            redex_depths,
        } => {
            let _ = writeln!(
                out,
                "context-liminf: {status:?} from {stabilization_index}\nredex-depths: {}",
                join(redex_depths)
            );
        }
    }
    out
}

fn verdict_code(reports: &[ConvergenceReport]) -> u8 {
    if reports.iter().any(|r| r.verdict.is_diverged()) {
        EXIT_FALSE
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        0
    }
}

fn execute(cmd: Command) -> Result<(String, u8), Failure> {
    Ok(match cmd {
        Command::Canon(a) => {
            let doc = load(&a.file)?;
            (print_canonical(&a.graph, graph(&doc, &a.graph)?), 0)
        }
        Command::Iso(a) => {
            let doc = load(&a.file)?;
            answer(iso(graph(&doc, &a.first)?, graph(&doc, &a.second)?))
        }
        Command::Bisim(a) => {
            let doc = load(&a.file)?;
            answer(bisimilar(graph(&doc, &a.first)?, graph(&doc, &a.second)?))
        }
        Command::Dist(a) => {
            let doc = load(&a.file)?;
            (format!("{}\n", dist(graph(&doc, &a.first)?, graph(&doc, &a.second)?)), 0)
        }
        Command::Leq(a) => {
            let doc = load(&a.file)?;
            answer(leq_bot(graph(&doc, &a.first)?, graph(&doc, &a.second)?))
        }
        Command::Glb { file, graphs } => {
            let doc = load(&file)?;
            let gs = graphs.iter().map(|n| graph(&doc, n)).collect::<Result<Vec<_>, _>>()?;
            let g = glb_set(gs).map_err(|e| usage(e.to_string()))?;
            (print_graph("glb", &g), 0)
        }
        Command::Truncate { target, d } => {
            let depth = match d.as_str() {
                "omega" => Depth::Omega,
                n => Depth::Finite(n.parse().map_err(|_| usage(format!("invalid depth {n}")))?),
            };
            let doc = load(&target.file)?;
            (print_graph(&target.graph, &truncate(graph(&doc, &target.graph)?, depth)), 0)
        }
        Command::LocalTruncate { target, n } => {
            let doc = load(&target.file)?;
            let named = doc
                .graphs
                .get(&target.graph)
                .ok_or_else(|| usage(format!("no term graph named {}", target.graph)))?;
            let node = named
                .node(&n)
                .ok_or_else(|| usage(format!("no node {n} in {}", target.graph)))?;
            let g = local_truncate(&named.graph, node).map_err(data)?;
            (print_canonical(&target.graph, &g), 0)
        }
        Command::Unravel { target, d } => {
            let doc = load(&target.file)?;
            (print_canonical(&target.graph, &graph(&doc, &target.graph)?.unravel_to_depth(d)), 0)
        }
        Command::Reduce { reduction, trace } => {
            let t = reduce(&reduction, true)?;
            if let Some(path) = trace {
                fs::write(&path, trace_document(&t)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            let mut out = format!("# steps: {}\n# termination: {}\n", t.steps.len(), termination(t.termination));
            out.push_str(&print_graph(&reduction.graph, t.last()));
            (out, 0)
        }
        Command::Converge {
            reduction,
            mode,
            d,
            w,
            json,
        } => {
            let disciplines: Vec<Discipline> = if mode == "all" {
                Discipline::ALL.to_vec()
            } else {
                vec![mode.parse().map_err(|e: itgr::converge::UnknownDiscipline| usage(e.to_string()))?]
            };
            let t = reduce(&reduction, true)?;
            let (all, _) = cross_check(&t, d, w);
            let reports: Vec<ConvergenceReport> =
                all.into_iter().filter(|r| disciplines.contains(&r.discipline)).collect();
            let out = if json {
                let values: Vec<Value> = reports.iter().map(|r| report_json(r, d)).collect();
                let v = if mode == "all" { Value::Array(values) } else { values[0].clone() };
                serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
            } else {
                let mut out = format!("steps: {}\ntermination: {}\n", t.steps.len(), termination(t.termination));
                for r in &reports {
                    out.push('\n');
                    out.push_str(&report_text(r, d));
                }
                out
            };
            (out, verdict_code(&reports))
        }
        Command::ExportDot(a) => {
            let doc = load(&a.file)?;
            (export_dot(graph(&doc, &a.graph)?), 0)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("itgr: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
