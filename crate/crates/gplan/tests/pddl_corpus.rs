//! File corpus for the PDDL-subset reader: well-formed domains and
//! problems must parse cleanly and survive a print/parse round trip;
//! malformed files must produce error diagnostics, never a panic.

use gplan::bench::{make_blocks_clear, make_delivery, make_gripper, make_hanoi};
use gplan::graph::{expand, Limits};
use gplan::pddl::{parse_domain, parse_problem, print_domain, print_problem};
use gplan::strips::{ground, Domain, Instance};
use std::sync::Arc;

fn corpus(name: &str) -> String {
    let path = format!("{}/tests/corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn parse_ok(name: &str) -> Domain {
    let out = parse_domain(&corpus(name));
    let errs: Vec<_> = out.errors().map(|d| d.render(name)).collect();
    assert!(errs.is_empty(), "{name}: {errs:?}");
    out.value.unwrap()
}

fn round_trip(domain: &Domain) -> Domain {
    let text = print_domain(domain);
    let back = parse_domain(&text);
    assert_eq!(back.errors().count(), 0, "printed domain reparses: {text}");
    back.value.unwrap()
}

#[test]
fn delivery3_parses_with_ternary_at() {
    let d = parse_ok("delivery3.pddl");
    assert_eq!(d.schemas.len(), 3);
    let at = d.predicates.iter().find(|p| p.name == "at").unwrap();
    assert_eq!(at.arity, 3);
    assert!(!at.is_static);
    for name in ["agent", "pkg", "adj"] {
        assert!(
            d.predicates.iter().find(|p| p.name == name).unwrap().is_static,
            "{name} should be detected as static"
        );
    }
    assert_eq!(round_trip(&d), d);
}

#[test]
fn delivery3_problem_grounds_and_solves() {
    let domain = Arc::new(parse_ok("delivery3.pddl"));
    let out = parse_problem(&corpus("delivery3_2x2.pddl"), domain);
    assert_eq!(out.errors().count(), 0);
    let inst = out.value.unwrap();
    let task = ground(Arc::new(inst)).unwrap();
    let ssg = expand(&task, &Limits::default()).unwrap();
    assert!(!ssg.goals.is_empty(), "goal is reachable");
}

#[test]
fn switch_corpus_round_trips() {
    let d = parse_ok("switch.pddl");
    assert_eq!(round_trip(&d), d);
    let domain = Arc::new(d);
    let out = parse_problem(&corpus("switch_chain.pddl"), domain.clone());
    assert_eq!(out.errors().count(), 0);
    let inst = out.value.unwrap();
    // problem print/parse round trip preserves the instance
    let text = print_problem(&inst);
    let back = parse_problem(&text, domain).value.unwrap();
    assert_eq!(back.objects, inst.objects);
    assert_eq!(back.init, inst.init);
    assert_eq!(back.goal, inst.goal);
}

#[test]
fn malformed_files_yield_diagnostics() {
    for name in ["bad_typed.pddl", "bad_unbalanced.pddl"] {
        let out = parse_domain(&corpus(name));
        assert!(out.value.is_none(), "{name} must not parse");
        assert!(out.errors().count() > 0, "{name} must carry errors");
    }
}

#[test]
fn generated_instances_round_trip() {
    let instances: Vec<Instance> = vec![
        make_delivery(3, 2, 1, 4).unwrap(),
        make_blocks_clear(3, 1).unwrap(),
        make_hanoi(3, 3).unwrap(),
        make_gripper(2).unwrap(),
    ];
    for inst in instances {
        let domain = Arc::new(round_trip(&inst.domain));
        assert_eq!(*domain, *inst.domain);
        let text = print_problem(&inst);
        let out = parse_problem(&text, domain);
        assert_eq!(out.errors().count(), 0, "{}: {text}", inst.name);
        let back = out.value.unwrap();
        assert_eq!(back.objects, inst.objects);
        assert_eq!(back.init, inst.init);
        assert_eq!(back.goal, inst.goal);
    }
}
