//! Small random graphs, patterns and GGDs for differential testing.
//!
//! Values are drawn from tiny domains so that constraints are neither
//! always true nor always false and label filters actually bite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{labels, props, GraphBuilder, PropertyGraph, Value};
use crate::lang::{CmpOp, Constraint, DistanceFn, Ggd, GraphPattern, VarKind};

const VERTEX_LABELS: [&str; 3] = ["A", "B", "C"];
const EDGE_LABELS: [&str; 2] = ["r", "s"];
const NAMES: [&str; 6] = ["ab", "abc", "b", "ba", "a b", "b c"];

/// A graph with up to `max_vertices` vertices `v0..` and `max_edges` edges
/// `e0..`. Vertices may carry `x` (integer) and `name` (text); edges may
/// carry `w` (integer). Self loops and parallel edges occur.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize) -> PropertyGraph {
    let n = rng.gen_range(0..=max_vertices);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        let mut ls = vec![*VERTEX_LABELS.choose(rng).unwrap()];
        if rng.gen_bool(0.15) {
            ls.push(VERTEX_LABELS.choose(rng).unwrap());
        }
        let mut ps: Vec<(&str, Value)> = Vec::new();
        if rng.gen_bool(0.85) {
            ps.push(("x", Value::Integer(rng.gen_range(0..6))));
        }
        if rng.gen_bool(0.75) {
            ps.push(("name", Value::text(*NAMES.choose(rng).unwrap())));
        }
        b.vertex(format!("v{i}"), labels(ls), props(ps));
    }
    if n > 0 {
        for i in 0..rng.gen_range(0..=max_edges) {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let mut ps: Vec<(&str, Value)> = Vec::new();
            if rng.gen_bool(0.5) {
                ps.push(("w", Value::Integer(rng.gen_range(0..3))));
            }
            let l = EDGE_LABELS.choose(rng).unwrap();
            b.edge(
                format!("e{i}"),
                format!("v{s}"),
                format!("v{t}"),
                labels([*l]),
                props(ps),
            );
        }
    }
    b.build().expect("random graphs are well formed")
}

fn vertex_label<R: Rng>(rng: &mut R) -> &'static str {
    if rng.gen_bool(0.25) {
        "-"
    } else {
        VERTEX_LABELS.choose(rng).unwrap()
    }
}

fn edge_label<R: Rng>(rng: &mut R) -> &'static str {
    if rng.gen_bool(0.25) {
        "-"
    } else {
        EDGE_LABELS.choose(rng).unwrap()
    }
}

/// A pattern with at most `max_vars` variables, at least one of them a
/// vertex. Vertex variables are `x0..`, edge variables `y0..`.
pub fn random_pattern<R: Rng>(rng: &mut R, max_vars: usize) -> GraphPattern {
    let max_vars = max_vars.max(1);
    let vertices = rng.gen_range(1..=max_vars.min(3));
    let mut p = GraphPattern::default();
    for i in 0..vertices {
        p.vertex(&format!("x{i}"), vertex_label(rng));
    }
    for i in 0..rng.gen_range(0..=max_vars - vertices) {
        let from = format!("x{}", rng.gen_range(0..vertices));
        let to = format!("x{}", rng.gen_range(0..vertices));
        p.edge(&format!("y{i}"), edge_label(rng), &from, &to);
    }
    p
}

/// One constraint over variables of `pattern`.
pub fn random_constraint<R: Rng>(rng: &mut R, pattern: &GraphPattern) -> Constraint {
    let vars: Vec<&str> = pattern.variables();
    let vertex_vars: Vec<&str> = vars
        .iter()
        .copied()
        .filter(|v| pattern.var_kind(v) == Some(VarKind::Vertex))
        .collect();
    let edge_vars: Vec<&str> = vars
        .iter()
        .copied()
        .filter(|v| pattern.var_kind(v) == Some(VarKind::Edge))
        .collect();
    let op = *CmpOp::ALL.choose(rng).unwrap();
    let t = rng.gen_range(0..4) as f64;
    let v = *vertex_vars.choose(rng).unwrap();
    match rng.gen_range(0..8) {
        0 | 1 => Constraint::const_attr(DistanceFn::AbsDiff, v, "x", Value::Integer(rng.gen_range(0..6)), op, t),
        2 => Constraint::const_attr(
            DistanceFn::Edit,
            v,
            "name",
            Value::text(*NAMES.choose(rng).unwrap()),
            op,
            t,
        ),
        3 => {
            let u = *vertex_vars.choose(rng).unwrap();
            Constraint::attr_attr(DistanceFn::AbsDiff, (v, "x"), (u, "x"), op, t)
        }
        4 => {
            let u = *vertex_vars.choose(rng).unwrap();
            let half = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
            Constraint::attr_attr(DistanceFn::Jaccard, (v, "name"), (u, "name"), op, half)
        }
        5 => Constraint::const_attr(
            DistanceFn::Eq,
            v,
            "name",
            Value::text(*NAMES.choose(rng).unwrap()),
            op,
            rng.gen_range(0..2) as f64,
        ),
        6 => match edge_vars.choose(rng) {
            Some(e) => Constraint::const_attr(
                DistanceFn::AbsDiff,
                e,
                "w",
                Value::Integer(rng.gen_range(0..3)),
                op,
                t.min(2.0),
            ),
            None => Constraint::const_attr(DistanceFn::AbsDiff, v, "x", Value::Integer(2), op, t),
        },
        _ => {
            let u = vertex_vars.choose(rng).unwrap().to_string();
            if rng.gen_bool(0.5) {
                Constraint::IdentEq(v.to_string(), u)
            } else {
                Constraint::IdentNeq(v.to_string(), u)
            }
        }
    }
}

/// Up to `max` constraints over `pattern`.
pub fn random_constraints<R: Rng>(rng: &mut R, pattern: &GraphPattern, max: usize) -> Vec<Constraint> {
    (0..rng.gen_range(0..=max))
        .map(|_| random_constraint(rng, pattern))
        .collect()
}

/// A GGD whose target keeps one or two source vertices and may add an edge
/// to a source vertex or to a fresh vertex `z0`.
pub fn random_ggd<R: Rng>(rng: &mut R, name: &str) -> Ggd {
    let source = random_pattern(rng, 4);
    let source_constraints = random_constraints(rng, &source, 2);
    let sv: Vec<(String, String)> = source
        .vertices
        .iter()
        .map(|v| (v.var.clone(), v.label.as_str().to_string()))
        .collect();
    let mut target = GraphPattern::default();
    let (a, la) = sv.choose(rng).unwrap().clone();
    target.vertex(&a, &la);
    let mut to = a.clone();
    match rng.gen_range(0..3) {
        0 => {}
        1 => {
            let (b, lb) = sv.choose(rng).unwrap().clone();
            if b != a {
                target.vertex(&b, &lb);
            }
            to = b;
        }
        _ => {
            target.vertex("z0", vertex_label(rng));
            to = "z0".to_string();
        }
    }
    if to != a || rng.gen_bool(0.5) {
        let (from, to) = if rng.gen_bool(0.5) { (a, to) } else { (to, a) };
        target.edge("w0", edge_label(rng), &from, &to);
    }
    let target_constraints = random_constraints(rng, &target, 2);
    let ggd = Ggd {
        name: name.to_string(),
        source,
        source_constraints,
        target,
        target_constraints,
    };
    debug_assert!(ggd.check().is_ok(), "{:?}", ggd.check());
    ggd
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_ggds_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..500 {
            let g = random_ggd(&mut rng, &format!("g{i}"));
            g.check().unwrap();
            assert!(random_graph(&mut rng, 12, 24).audit().is_ok());
        }
    }
}
