use std::path::PathBuf;

use ggd_core::lang::{parse_ggds, GgdSet};
use ggd_core::reasoner::{
    build_canonical_graph, build_closure_graph, check_implication, check_satisfiability, interacts, intersect_patterns,
    is_weakly_acyclic, ImplVerdict, SatVerdict, Side,
};
use ggd_core::validator::{validate_set, PlanKind};

fn fixture(name: &str) -> GgdSet {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/ggds")
        .join(name);
    parse_ggds(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn split_last(set: GgdSet) -> (GgdSet, ggd_core::lang::Ggd) {
    let mut ggds = set.ggds;
    let last = ggds.pop().unwrap();
    (GgdSet::new(ggds).unwrap(), last)
}

#[test]
fn example5_is_unsatisfiable() {
    let r = check_satisfiability(&fixture("example5.ggd"), 10_000);
    assert_eq!(r.verdict, SatVerdict::Unsatisfiable, "{:?}", r.reason);
    assert!(r.reason.unwrap().contains("inconsistent"));
}

#[test]
fn single_ggd_is_satisfiable_with_valid_witness() {
    let sigma = fixture("single.ggd");
    let r = check_satisfiability(&sigma, 10_000);
    assert_eq!(r.verdict, SatVerdict::Satisfiable, "{:?}", r.reason);
    let w = r.witness.unwrap();
    assert!(validate_set(&w, &sigma, PlanKind::Anti, 1).iter().all(|r| r.is_valid()));
    assert!(validate_set(&w, &sigma, PlanKind::Outer, 1)
        .iter()
        .all(|r| r.source_matches > 0));
}

#[test]
fn self_generating_sat_is_unknown() {
    let r = check_satisfiability(&fixture("self_knows.ggd"), 100);
    assert_eq!(r.verdict, SatVerdict::Unknown);
}

#[test]
fn example7_implied_and_tightened_not() {
    let (sigma, q) = split_last(fixture("example7.ggd"));
    let r = check_implication(&sigma, &q, 10_000);
    assert_eq!(r.verdict, ImplVerdict::Implied, "{:?}", r.reason);
    assert!(r.branches >= 2);
    let (sigma, q) = split_last(fixture("example7_tight.ggd"));
    assert_eq!(check_implication(&sigma, &q, 10_000).verdict, ImplVerdict::NotImplied);
}

#[test]
fn one_case_alone_does_not_imply() {
    let (sigma, q) = split_last(fixture("example7.ggd"));
    let only4 = GgdSet::new(vec![sigma.ggds[0].clone()]).unwrap();
    assert_eq!(check_implication(&only4, &q, 10_000).verdict, ImplVerdict::NotImplied);
}

#[test]
fn example8_is_implied() {
    let (sigma, q) = split_last(fixture("example8.ggd"));
    let r = check_implication(&sigma, &q, 10_000);
    assert_eq!(r.verdict, ImplVerdict::Implied, "{:?}", r.reason);
}

#[test]
fn empty_sigma_implies_nothing_generating() {
    let (_, q) = split_last(fixture("example8.ggd"));
    let r = check_implication(&GgdSet::new(vec![]).unwrap(), &q, 10_000);
    assert_eq!(r.verdict, ImplVerdict::NotImplied);
}

#[test]
fn interaction_examples() {
    let s = fixture("example8.ggd");
    let (a, b) = (&s.ggds[0], &s.ggds[1]);
    assert!(interacts(a, b, Side::Source).unwrap());
    assert!(interacts(b, a, Side::Source).unwrap());
    assert!(interacts(a, b, Side::TargetSource).unwrap());
    assert!(interacts(a, a, Side::Target).unwrap());
    let other = fixture("located.ggd");
    assert!(!interacts(a, &other.ggds[0], Side::Source).unwrap());
}

#[test]
fn infeasible_vertex_pairs_are_excluded() {
    let s = parse_ggds(
        "ggd a { source { (x:Assignment) } where { absdiff(x.hours, 20) <= 4; } target { (x) } having { } }
         ggd b { source { (x:Assignment) } where { absdiff(x.hours, 20) > 8; } target { (x) } having { } }",
    )
    .unwrap();
    let (a, b) = (&s.ggds[0], &s.ggds[1]);
    let i = intersect_patterns(&a.source, &a.source_constraints, &b.source, &b.source_constraints).unwrap();
    assert!(i.is_empty());
}

#[test]
fn canonical_graph_shares_interacting_vertices() {
    let s = fixture("example8.ggd");
    let sub = GgdSet::new(s.ggds[..2].to_vec()).unwrap();
    let g = build_canonical_graph(&sub, true).unwrap();
    assert_eq!(g.graph.vertex_count(), 2);
    assert_eq!(g.images["sigma3p"]["p"], "sigma2p.p");
    let d = build_canonical_graph(&sub, false).unwrap();
    assert_eq!(d.graph.vertex_count(), 3);
}

#[test]
fn closure_graph_of_sigma6_has_empty_classes() {
    let (_, q) = split_last(fixture("example7.ggd"));
    let c = build_closure_graph(&q).unwrap();
    assert_eq!(c.graph.vertex_count(), 1);
    assert!(c.seeds.is_empty());
}

#[test]
fn weak_acyclicity() {
    let (ok, _) = is_weakly_acyclic(&fixture("example8.ggd"));
    assert!(ok);
    let (ok, dg) = is_weakly_acyclic(&fixture("self_knows.ggd"));
    assert!(!ok);
    assert!(!dg.cyclic_special_edges().is_empty());
    assert!(dg.to_dot().starts_with("digraph dependencies {"));
    assert!(is_weakly_acyclic(&GgdSet::new(vec![]).unwrap()).0);
}
