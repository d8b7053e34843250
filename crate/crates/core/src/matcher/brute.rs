use crate::graph::{ObjRef, ObjectKind, PropertyGraph};
use crate::lang::{satisfies_all, Binding, Constraint, GraphPattern};

use super::{Match, MatchSet};

/// Largest assignment space the oracle will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

/// Reference matcher: tries every assignment of vertex variables to
/// vertices and edge variables to edges, then checks labels, endpoints
/// and constraints.
pub fn brute_force_match(g: &PropertyGraph, pattern: &GraphPattern, phi: &[Constraint]) -> Result<MatchSet, String> {
    let mut domains: Vec<(&str, &[ObjRef])> = Vec::new();
    for v in &pattern.vertices {
        domains.push((&v.var, g.refs_of_kind(ObjectKind::Vertex)));
    }
    for e in &pattern.edges {
        domains.push((&e.var, g.refs_of_kind(ObjectKind::Edge)));
    }
    let space = domains
        .iter()
        .fold(1u128, |acc, (_, d)| acc.saturating_mul(d.len() as u128));
    if space > BRUTE_FORCE_LIMIT {
        return Err(format!("assignment space {space} exceeds {BRUTE_FORCE_LIMIT}"));
    }
    let vars: Vec<String> = domains.iter().map(|(v, _)| v.to_string()).collect();
    let mut matches: Vec<Match> = Vec::new();
    if domains.iter().any(|(_, d)| d.is_empty()) {
        return Ok(MatchSet::new(vars, matches));
    }
    let mut odometer = vec![0usize; domains.len()];
    loop {
        let pick = |var: &str| -> ObjRef {
            let i = domains.iter().position(|(v, _)| *v == var).unwrap();
            domains[i].1[odometer[i]]
        };
        let labels_ok = pattern
            .vertices
            .iter()
            .map(|v| (&v.var, &v.label))
            .chain(pattern.edges.iter().map(|e| (&e.var, &e.label)))
            .all(|(var, label)| label.is_wildcard() || g.obj(pick(var)).has_label(label.as_str()));
        let ends_ok = pattern
            .edges
            .iter()
            .all(|e| g.ends(pick(&e.var)) == Some((pick(&e.from), pick(&e.to))));
        if labels_ok && ends_ok {
            let b: Binding = domains
                .iter()
                .zip(&odometer)
                .map(|((v, d), &i)| (v.to_string(), g.id(d[i]).to_string()))
                .collect();
            if satisfies_all(phi, &b, g) {
                matches.push(b);
            }
        }
        let mut k = 0;
        loop {
            if k == odometer.len() {
                return Ok(MatchSet::new(vars, matches));
            }
            odometer[k] += 1;
            if odometer[k] < domains[k].1.len() {
                break;
            }
            odometer[k] = 0;
            k += 1;
        }
    }
}
