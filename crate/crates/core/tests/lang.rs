use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ggd_core::graph::{labels, props, GraphBuilder, PropertyGraph, Value};
use ggd_core::lang::{
    distance, eval_constraint, feasible, parse_ggds, satisfies, satisfies_all, subjugates, CmpOp, Constraint,
    DistanceFn, EvalError, GraphPattern, TOLERANCE,
};
use ggd_core::random::{random_constraints, random_ggd, random_graph};

fn one_ggd(where_: &str, having: &str) -> String {
    format!(
        "ggd g {{ source {{ (x:Person), (y:Job) }} where {{ {where_} }} target {{ (x)-[e:holds]->(y) }} having {{ {having} }} }}"
    )
}

#[test]
fn empty_blocks_give_empty_constraint_sets() {
    let s = parse_ggds(&one_ggd("", "")).unwrap();
    assert!(s.ggds[0].source_constraints.is_empty());
    assert!(s.ggds[0].target_constraints.is_empty());
}

#[test]
fn edit_constraint_parses_to_const_vs_attr() {
    let s = parse_ggds(&one_ggd(r#"edit(y.type, "full-time") = 0;"#, "")).unwrap();
    assert_eq!(
        s.ggds[0].source_constraints,
        vec![Constraint::const_attr(
            DistanceFn::Edit,
            "y",
            "type",
            Value::text("full-time"),
            CmpOp::Eq,
            0.0
        )]
    );
}

#[test]
fn undeclared_variable_is_named() {
    let err = parse_ggds(&one_ggd("absdiff(q.a, 1) <= 2;", "")).unwrap_err();
    assert!(err.message.contains("`q`"), "{err}");
    assert!(err.line >= 1 && err.col >= 1);
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_ggds("ggd g {\n  source { (x:A) }\n  where { absdiff(x.a 1) <= 2; }\n}").unwrap_err();
    assert_eq!(err.line, 3, "{err}");
}

#[test]
fn shared_variable_label_clash_is_rejected() {
    let text = "ggd g { source { (x:Person) } where { } target { (x:City) } having { } }";
    assert!(parse_ggds(text).is_err());
    let text = "ggd g { source { (x:Person) } where { } target { (x:-) } having { } }";
    assert!(parse_ggds(text).is_ok());
}

#[test]
fn duplicate_names_are_rejected() {
    let text = "ggd g { source { (x:A) } where { } target { (x) } having { } }";
    assert!(parse_ggds(&format!("{text}\n{text}")).is_err());
}

fn tiny() -> PropertyGraph {
    let mut b = GraphBuilder::new();
    b.vertex("s", labels(["Shift"]), props([("hours", Value::Integer(10))]));
    b.vertex("a", labels(["T"]), props([("name", Value::text("a b"))]));
    b.vertex("b", labels(["T"]), props([("name", Value::text("b c"))]));
    b.build().unwrap()
}

fn bind(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(v, id)| (v.to_string(), id.to_string())).collect()
}

#[test]
fn evaluation_examples() {
    let g = tiny();
    let c = Constraint::const_attr(DistanceFn::AbsDiff, "s", "hours", Value::Integer(10), CmpOp::Gt, 5.0);
    assert_eq!(eval_constraint(&c, &bind(&[("s", "s")]), &g), Ok(false));
    let c = Constraint::IdentEq("x".into(), "y".into());
    assert_eq!(eval_constraint(&c, &bind(&[("x", "a"), ("y", "a")]), &g), Ok(true));
    let c = Constraint::attr_attr(DistanceFn::Jaccard, ("x", "name"), ("y", "name"), CmpOp::Le, 0.5);
    assert_eq!(eval_constraint(&c, &bind(&[("x", "a"), ("y", "b")]), &g), Ok(false));
    let d = distance(DistanceFn::Jaccard, &Value::text("a b"), &Value::text("b c")).unwrap();
    assert!((d - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn missing_property_fails_the_match() {
    let g = tiny();
    let c = Constraint::const_attr(DistanceFn::AbsDiff, "x", "hours", Value::Integer(1), CmpOp::Ge, 0.0);
    let h = bind(&[("x", "a")]);
    assert!(matches!(
        eval_constraint(&c, &h, &g),
        Err(EvalError::MissingProperty { .. })
    ));
    assert!(!satisfies(&c, &h, &g));
}

#[test]
fn kind_mismatch_is_an_error_and_unsatisfied() {
    let g = tiny();
    let c = Constraint::const_attr(DistanceFn::Edit, "s", "hours", Value::text("10"), CmpOp::Le, 5.0);
    let h = bind(&[("s", "s")]);
    assert!(matches!(eval_constraint(&c, &h, &g), Err(EvalError::KindMismatch(_))));
    assert!(!satisfies(&c, &h, &g));
}

fn abs9(op: CmpOp, t: f64) -> Constraint {
    Constraint::const_attr(DistanceFn::AbsDiff, "u", "A", Value::Integer(9), op, t)
}

#[test]
fn subjugation_examples() {
    assert!(subjugates(&[abs9(CmpOp::Le, 7.0)], &[abs9(CmpOp::Le, 5.0)]));
    assert!(!subjugates(&[abs9(CmpOp::Le, 5.0)], &[abs9(CmpOp::Le, 7.0)]));
    assert!(subjugates(&[], &[abs9(CmpOp::Le, 5.0)]));
    assert!(subjugates(&[], &[]));
}

#[test]
fn feasibility_examples() {
    let h = |op, t| Constraint::const_attr(DistanceFn::AbsDiff, "s", "hours", Value::Integer(10), op, t);
    assert!(!feasible(&[h(CmpOp::Gt, 5.0), h(CmpOp::Lt, 5.0)]));
    let ty = |op, t| Constraint::const_attr(DistanceFn::Edit, "b", "type", Value::text("full-time"), op, t);
    assert!(!feasible(&[ty(CmpOp::Eq, 0.0), ty(CmpOp::Gt, 1.0)]));
    assert!(feasible(&[]));
    assert!(!feasible(&[
        Constraint::IdentEq("x".into(), "y".into()),
        Constraint::IdentNeq("y".into(), "x".into())
    ]));
}

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<i32>().prop_map(|i| Value::Integer(i as i64)),
        (-1e6f64..1e6).prop_map(Value::Number),
        "[a-c ]{0,8}".prop_map(Value::text),
        any::<bool>().prop_map(Value::Boolean),
    ]
}

fn op() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(CmpOp::ALL.to_vec())
}

proptest! {
    #[test]
    fn distances_are_symmetric_and_zero_on_equal(a in value(), b in value()) {
        for d in [DistanceFn::AbsDiff, DistanceFn::Edit, DistanceFn::Jaccard, DistanceFn::Eq] {
            let ab = distance(d, &a, &b).ok();
            let ba = distance(d, &b, &a).ok();
            prop_assert_eq!(ab, ba);
            if let Some(x) = ab {
                prop_assert!(x >= 0.0);
            }
            if let Ok(x) = distance(d, &a, &a) {
                prop_assert_eq!(x, 0.0);
            }
        }
    }
}

fn num_constraint() -> impl Strategy<Value = Constraint> {
    (0i64..6, op(), 0u8..4, any::<bool>()).prop_map(|(c, op, t, eq)| {
        let d = if eq { DistanceFn::Eq } else { DistanceFn::AbsDiff };
        let t = if eq { (t % 2) as f64 } else { t as f64 };
        Constraint::const_attr(d, "s", "v", Value::Integer(c), op, t)
    })
}

const TEXTS: [&str; 5] = ["", "a", "ab", "ba", "abc"];

fn text_constraint() -> impl Strategy<Value = Constraint> {
    (0usize..TEXTS.len(), op(), 0u8..4, any::<bool>()).prop_map(|(c, op, t, eq)| {
        let d = if eq { DistanceFn::Eq } else { DistanceFn::Edit };
        let t = if eq { (t % 2) as f64 } else { t as f64 };
        Constraint::const_attr(d, "s", "v", Value::text(TEXTS[c]), op, t)
    })
}

fn single(v: Value) -> PropertyGraph {
    let mut b = GraphBuilder::new();
    b.vertex("o", labels(["T"]), props([("v", v)]));
    b.build().unwrap()
}

fn lattice_satisfies(cs: &[Constraint], lattice: &[Value]) -> bool {
    let h = bind(&[("s", "o")]);
    lattice.iter().any(|v| satisfies_all(cs, &h, &single(v.clone())))
}

fn number_lattice() -> Vec<Value> {
    let quarters = (-40..=100).map(|q| q as f64 / 4.0);
    let near = quarters.flat_map(|x| [x, x - TOLERANCE / 2.0, x + TOLERANCE / 2.0]);
    near.map(Value::Number).chain((-10..=25).map(Value::Integer)).collect()
}

fn text_lattice() -> Vec<Value> {
    let mut words = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..5 {
        frontier = frontier
            .iter()
            .flat_map(|w| ["a", "b", "c", "d"].iter().map(move |ch| format!("{w}{ch}")))
            .collect();
        words.extend(frontier.iter().cloned());
    }
    let mut out: Vec<Value> = words.into_iter().map(Value::text).collect();
    out.push(Value::Integer(0));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn numeric_feasibility_agrees_with_lattice(cs in prop::collection::vec(num_constraint(), 1..=4)) {
        prop_assert_eq!(feasible(&cs), lattice_satisfies(&cs, &number_lattice()), "{:?}", cs);
    }

    #[test]
    fn text_feasibility_agrees_with_lattice(cs in prop::collection::vec(text_constraint(), 1..=4)) {
        prop_assert_eq!(feasible(&cs), lattice_satisfies(&cs, &text_lattice()), "{:?}", cs);
    }
}

fn two_vars() -> GraphPattern {
    let mut p = GraphPattern::default();
    p.vertex("x0", "-").vertex("x1", "-");
    p
}

/// Every binding of `x0, x1` into `g` satisfying `omega` satisfies `tau`.
fn semantically_subjugates(tau: &[Constraint], omega: &[Constraint], g: &PropertyGraph) -> bool {
    let ids: Vec<&str> = g.objects().map(|o| o.id.as_str()).collect();
    ids.iter().all(|a| {
        ids.iter().all(|b| {
            let h = bind(&[("x0", a), ("x1", b)]);
            !satisfies_all(omega, &h, g) || satisfies_all(tau, &h, g)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn subjugation_is_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = two_vars();
        let tau = random_constraints(&mut rng, &p, 2);
        let omega = random_constraints(&mut rng, &p, 3);
        if subjugates(&tau, &omega) {
            for _ in 0..4 {
                let g = random_graph(&mut rng, 12, 0);
                prop_assert!(semantically_subjugates(&tau, &omega, &g), "tau {:?} omega {:?}", tau, omega);
            }
        }
    }

    #[test]
    fn subjugation_is_reflexive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let omega = random_constraints(&mut rng, &two_vars(), 3);
        prop_assert!(subjugates(&omega, &omega), "{:?}", omega);
    }

    #[test]
    fn subjugation_is_transitive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = two_vars();
        let tau = random_constraints(&mut rng, &p, 1);
        let psi = random_constraints(&mut rng, &p, 2);
        let omega = random_constraints(&mut rng, &p, 3);
        if subjugates(&tau, &psi) && subjugates(&psi, &omega) {
            prop_assert!(subjugates(&tau, &omega));
        }
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ggds: Vec<_> = (0..3).map(|i| random_ggd(&mut rng, &format!("g{i}"))).collect();
        let set = ggd_core::lang::GgdSet::new(ggds).unwrap();
        let text = set.to_string();
        let back = parse_ggds(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, set);
    }
}

#[test]
fn absdiff_subjugation_hits_are_common_enough() {
    let mut hits = 0;
    for t1 in 0..4 {
        for t2 in 0..4 {
            if subjugates(&[abs9(CmpOp::Le, t1 as f64)], &[abs9(CmpOp::Le, t2 as f64)]) {
                hits += 1;
                assert!(t1 >= t2);
            }
        }
    }
    assert_eq!(hits, 10);
}
