use std::collections::BTreeMap;

use ggd_core::gen::{generate_suite, threshold_ggd, threshold_graph, truth_json, write_generated, GenSpec, SUITE_GGDS};
use ggd_core::graph::{graph_to_csv, load_graph, ObjectKind};
use ggd_core::lang::parse_ggds;
use ggd_core::matcher::match_pattern;
use ggd_core::validator::{validate_set, PlanKind};

#[test]
fn truth_equals_found_violations() {
    let sigma = parse_ggds(SUITE_GGDS).unwrap();
    for (seed, rate) in [(1, 0.01), (2, 0.05), (3, 0.2), (4, 0.0)] {
        let generated = generate_suite(&GenSpec::with_rate(rate), seed, 0.05).unwrap();
        for plan in [PlanKind::Anti, PlanKind::Outer] {
            let found: BTreeMap<_, _> = validate_set(&generated.graph, &sigma, plan, 2)
                .into_iter()
                .map(|r| (r.ggd, r.violated))
                .collect();
            assert_eq!(found, generated.truth, "seed {seed} rate {rate}");
        }
        if rate >= 0.05 {
            assert!(generated.truth.values().all(|v| !v.is_empty()), "rate {rate}");
        } else if rate == 0.0 {
            assert!(generated.truth.values().all(Vec::is_empty));
        }
    }
}

#[test]
fn same_seed_same_bytes() {
    let spec = GenSpec::base();
    let a = generate_suite(&spec, 7, 0.02).unwrap();
    let b = generate_suite(&spec, 7, 0.02).unwrap();
    assert_eq!(graph_to_csv(&a.graph), graph_to_csv(&b.graph));
    assert_eq!(truth_json(&a.truth), truth_json(&b.truth));
    let c = generate_suite(&spec, 8, 0.02).unwrap();
    assert_ne!(graph_to_csv(&a.graph), graph_to_csv(&c.graph));
}

#[test]
fn written_files_reload() {
    let generated = generate_suite(&GenSpec::base(), 3, 0.01).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_generated(&generated, dir.path()).unwrap();
    let back = load_graph(dir.path()).unwrap();
    assert_eq!(graph_to_csv(&back), graph_to_csv(&generated.graph));
    let truth: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth.as_object().unwrap().len(), 6);
    parse_ggds(&std::fs::read_to_string(dir.path().join("suite.ggd")).unwrap()).unwrap();
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(generate_suite(&GenSpec::with_rate(1.5), 1, 1.0).is_err());
    assert!(generate_suite(&GenSpec::base(), 1, 0.0).is_err());
    assert!(generate_suite(&GenSpec::base(), 1, f64::NAN).is_err());
}

#[test]
fn base_scale_is_about_a_hundred_thousand_objects() {
    let counts = GenSpec::base().scaled(1.0);
    let vertices: usize = counts.values().sum();
    assert_eq!(vertices, 29_240);
    let g = generate_suite(&GenSpec::base(), 1, 0.1).unwrap().graph;
    let objects = g.object_count() as f64 * 10.0;
    assert!((80_000.0..=120_000.0).contains(&objects), "{objects}");
}

#[test]
fn threshold_sweep_is_monotone() {
    let g = threshold_graph(600, 5);
    assert_eq!(g.objects_with_label(ObjectKind::Vertex, "Person").len(), 600);
    let counts: Vec<usize> = [0, 2, 4, 6, 8, 10]
        .into_iter()
        .map(|t| {
            let sigma = parse_ggds(&threshold_ggd(t)).unwrap();
            let ggd = &sigma.ggds[0];
            match_pattern(&g, &ggd.source, &ggd.source_constraints).len()
        })
        .collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert!(counts.windows(2).filter(|w| w[0] < w[1]).count() >= 2, "{counts:?}");
    assert_eq!(graph_to_csv(&g), graph_to_csv(&threshold_graph(600, 5)));
}
