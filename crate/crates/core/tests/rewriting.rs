mod common;

use common::*;
use itgr::canon::{canonicalize, iso};
use itgr::terms::term_rewrite_step;
use itgr::{
    analyze, cross_check, find_redexes, reduce_step, run, unravel_rule, Certificate, Depth, Discipline, Document,
    RewriteError, RunOptions, Strategy as Reduction, Term, Termination, Verdict,
};
use rand::Rng;

#[test]
fn alternation_repeats_with_period_two() {
    let trace = weird_trace(9);
    let gs = trace.graphs();
    assert_eq!(gs.len(), 10);
    for i in 0..8 {
        assert_eq!(gs[i], gs[i + 2], "g{i} vs g{}", i + 2);
        assert_ne!(gs[i], gs[i + 1]);
    }
    // shared and unshared variants agree as trees
    assert!(itgr::bisimilar(&gs[0], &gs[1]));
}

#[test]
fn cycle_stops_a_scripted_run() {
    let d = doc(WEIRD);
    let trace = run(
        &start(&d, "g0"),
        &d.systems["weird"],
        &Reduction::Scripted(d.scripts["alternate"].clone()),
        RunOptions::default(),
    )
    .unwrap();
    assert_eq!(trace.termination, Termination::CycleDetected);
    let cycle = trace.cycle.unwrap();
    assert_eq!(cycle.period, 2);
}

#[test]
fn collapsing_rule_at_the_root_reroots() {
    let grs = rule_bank();
    let g = canonicalize(&graph("r", &[("r", "g", &["x"]), ("x", "f", &["y", "y"]), ("y", "a", &[])]));
    let step = reduce_step(&g, grs.rule("collapse").unwrap(), g.root()).unwrap();
    let expected = graph("x", &[("x", "f", &["y", "y"]), ("y", "a", &[])]);
    assert!(iso(&step.target, &expected));
    assert_eq!(step.redex_depth, 0);
    assert_eq!(*step.context, *canonicalize(&itgr::TermGraph::bottom()));
}

#[test]
fn redirect_keeps_sharing_of_the_redex() {
    // both parents of the shared `g` node see the contractum
    let grs = rule_bank();
    let g = canonicalize(&graph("r", &[("r", "f", &["s", "s"]), ("s", "g", &["k"]), ("k", "c", &[])]));
    let s = g.successors(g.root())[0];
    let step = reduce_step(&g, grs.rule("dup").unwrap(), s).unwrap();
    let expected = graph("r", &[("r", "f", &["s", "s"]), ("s", "f", &["k", "k"]), ("k", "c", &[])]);
    assert!(iso(&step.target, &expected));
    assert_eq!(step.redex_depth, 1);
}

#[test]
fn wrong_script_step_is_reported() {
    let d = doc(WEIRD);
    let bad = script("rho1", &[&[0]]);
    let err = run(&start(&d, "g0"), &d.systems["weird"], &Reduction::Scripted(bad), RunOptions::default()).unwrap_err();
    assert!(matches!(err, RewriteError::ScriptedRedexInvalid(0)));
    let unknown = script("nope", &[&[]]);
    assert!(run(&start(&d, "g0"), &d.systems["weird"], &Reduction::Scripted(unknown), RunOptions::default()).is_err());
}

#[test]
fn no_match_is_an_error() {
    let d = doc(LOOP);
    let grs = doc(WEIRD).all_rules();
    let g = start(&d, "a");
    assert!(matches!(
        reduce_step(&g, grs.rule("rho1").unwrap(), g.root()),
        Err(RewriteError::NoMatch { .. })
    ));
}

#[test]
fn step_budget_and_normal_form() {
    let t = from_trace(5);
    assert_eq!(t.termination, Termination::StepBudget);
    assert_eq!(t.steps.len(), 5);
    let grs = rule_bank();
    let g = canonicalize(&graph("r", &[("r", "b", &[])]));
    let t = run(&g, &grs, &Reduction::LeftmostOutermost, RunOptions::default()).unwrap();
    assert_eq!(t.termination, Termination::NormalForm);
    assert!(t.is_closed());
    for r in cross_check(&t, 8, 4).0 {
        assert_eq!(r.verdict, Verdict::ConvergedExact, "{:?}", r.discipline);
        assert_eq!(r.limit.as_ref(), Some(&g));
    }
}

#[test]
fn certificates_replay_and_reject_other_traces() {
    let weird = weird_trace(12);
    let report = analyze(Discipline::WeakM, &weird, 16, 8);
    let cert = report.verdict.certificate().copied().expect("weak-m diverges");
    assert!(matches!(cert, Certificate::Periodic(_)));
    assert!(cert.replay(&weird));
    assert!(!cert.replay(&loop_trace()));

    let looping = loop_trace();
    let report = analyze(Discipline::StrongM, &looping, 16, 8);
    let cert = report.verdict.certificate().copied().expect("strong-m diverges");
    assert!(matches!(cert, Certificate::BoundedRedexDepth { max_depth: 0, .. }));
    assert!(cert.replay(&looping));
    assert!(!cert.replay(&weird));
}

#[test]
fn strong_p_limit_grows_with_depth() {
    let trace = unfold_trace(14);
    let mut previous: Option<itgr::CanonicalTermGraph> = None;
    for d in [2, 4, 8] {
        let r = analyze(Discipline::StrongP, &trace, d, 4);
        assert!(r.verdict.is_converged(), "d={d}: {}", r.verdict);
        let limit = r.limit.unwrap();
        if let Some(p) = &previous {
            assert!(itgr::leq_bot(p, &limit));
        }
        previous = Some(limit);
    }
}

#[test]
fn random_runs_are_consistent() {
    let grs = rule_bank();
    let mut r = rng(11);
    for _ in 0..60 {
        let g = canonicalize(&random_graph(&mut r, 7, false));
        let options = RunOptions {
            max_steps: r.gen_range(1..25),
            stop_on_cycle: true,
        };
        let trace = run(&g, &grs, &Reduction::LeftmostOutermost, options).unwrap();
        let (reports, consistency) = cross_check(&trace, 6, 3);
        assert!(consistency.violations.is_empty(), "{:?}", consistency.violations);
        for rep in &reports {
            if let Some(c) = rep.verdict.certificate() {
                assert!(c.replay(&trace));
            }
            assert_eq!(rep.limit.is_some(), rep.verdict.is_converged());
        }
        // every step goes from a graph to its successor in the trace
        for w in trace.steps.windows(2) {
            assert_eq!(w[0].target, w[1].source);
        }
    }
}

/// On acyclic graphs a graph step is a parallel term step at every position
/// of the redex node.
#[test]
fn acyclic_steps_are_parallel_term_steps() {
    let grs = rule_bank();
    let mut r = rng(5);
    let mut checked = 0;
    while checked < 200 {
        let step = random_step(&mut r, &grs);
        let (Some(src), Some(tgt)) = (step.source.unravel(), step.target.unravel()) else {
            continue;
        };
        let Ok(rule) = unravel_rule(grs.rule(&step.rule).unwrap(), None) else {
            continue;
        };
        let mut t = Term::from_graph(&src).unwrap();
        let positions = step.source.positions_up_to(step.redex_node, step.source.node_count()).unwrap();
        assert!(!positions.is_empty());
        for p in &positions {
            t = term_rewrite_step(&t, &rule, p).unwrap();
        }
        assert_eq!(t, Term::from_graph(&tgt).unwrap(), "rule {}", step.rule);
        checked += 1;
    }
}

#[test]
fn step_context_is_below_source_and_target() {
    let grs = rule_bank();
    let mut r = rng(8);
    for _ in 0..200 {
        let step = random_step(&mut r, &grs);
        assert!(itgr::leq_bot(&step.context, &step.source));
        assert!(itgr::leq_bot(&step.context, &step.target), "rule {}", step.rule);
        assert!(itgr::similarity_depth(&step.source, &step.target) >= Depth::Finite(step.redex_depth));
    }
}

#[test]
fn redexes_are_listed_outermost_first() {
    let grs = rule_bank();
    let g = canonicalize(&graph("r", &[("r", "g", &["s"]), ("s", "g", &["k"]), ("k", "a", &[])]));
    let redexes = find_redexes(&grs, &g);
    let depths: Vec<usize> = redexes.iter().map(|(_, n)| g.depth(*n).unwrap()).collect();
    assert!(depths.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(redexes[0].1, g.root());
}

#[test]
fn data_files_round_trip() {
    for text in [FIG1, WEIRD, FIXPOINT, FROM, LOOP, RULE_BANK] {
        let d = Document::parse(text).unwrap();
        let again = Document::parse(&d.to_string()).unwrap();
        assert_eq!(d.to_string(), again.to_string());
        for (name, g) in &d.graphs {
            assert!(iso(&g.graph, &again.graphs[name].graph));
        }
        assert_eq!(d.rules.len(), again.rules.len());
        assert_eq!(d.scripts, again.scripts);
    }
}
