use std::collections::BTreeMap;

use thiserror::Error;

use crate::lang::{feasible, Constraint, Ggd, GraphPattern, Label};

/// Search nodes allowed before an intersection is refused.
pub const INTERSECT_NODE_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pattern too large for exact intersection: {0}")]
pub struct IntersectError(pub String);

/// A common sub-pattern of two patterns, named and labelled after the first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Intersection {
    pub pattern: GraphPattern,
    /// First-pattern variable to second-pattern variable, vertices and edges.
    pub map: BTreeMap<String, String>,
}

impl Intersection {
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Which sides of two GGDs to intersect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
    /// The first GGD's target against the second GGD's source.
    TargetSource,
}

/// Constraints of `phi` that mention `var` and nothing else.
fn local(phi: &[Constraint], var: &str) -> Vec<Constraint> {
    phi.iter()
        .filter(|c| c.distance_parts().is_some() && c.vars().iter().all(|v| *v == var))
        .cloned()
        .collect()
}

fn pair_feasible(phi1: &[Constraint], v1: &str, phi2: &[Constraint], v2: &str) -> bool {
    let a = local(phi1, v1);
    let b = local(phi2, v2);
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let common = "\u{0}x".to_string();
    let mut all: Vec<Constraint> = a.iter().map(|c| c.rename(&|_| common.clone())).collect();
    all.extend(b.iter().map(|c| c.rename(&|_| common.clone())));
    feasible(&all)
}

struct Search<'a> {
    q1: &'a GraphPattern,
    q2: &'a GraphPattern,
    cand: Vec<Vec<usize>>,
    /// For each first-pattern edge, second-pattern edges it may pair with
    /// once its endpoints agree.
    edge_cand: Vec<Vec<usize>>,
    nodes: usize,
    best: Option<(usize, usize, Vec<(String, String)>)>,
}

impl Search<'_> {
    fn vertex_index(p: &GraphPattern, var: &str) -> usize {
        p.vertices
            .iter()
            .position(|v| v.var == var)
            .expect("edge endpoint is a vertex")
    }

    fn edges_for(&self, map: &[Option<usize>]) -> Vec<(usize, usize)> {
        // Kuhn's augmenting paths over the admissible edge pairs.
        let n1 = self.q1.edges.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n1];
        for (i, e1) in self.q1.edges.iter().enumerate() {
            let (f, t) = (
                Self::vertex_index(self.q1, &e1.from),
                Self::vertex_index(self.q1, &e1.to),
            );
            let (Some(mf), Some(mt)) = (map[f], map[t]) else {
                continue;
            };
            for &j in &self.edge_cand[i] {
                let e2 = &self.q2.edges[j];
                if Self::vertex_index(self.q2, &e2.from) == mf && Self::vertex_index(self.q2, &e2.to) == mt {
                    adj[i].push(j);
                }
            }
        }
        let mut owner: Vec<Option<usize>> = vec![None; self.q2.edges.len()];
        fn augment(i: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
            for &j in &adj[i] {
                if seen[j] {
                    continue;
                }
                seen[j] = true;
                if owner[j].map_or(true, |k| augment(k, adj, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
            false
        }
        for i in 0..n1 {
            let mut seen = vec![false; self.q2.edges.len()];
            augment(i, &adj, &mut seen, &mut owner);
        }
        let mut pairs: Vec<(usize, usize)> = owner
            .iter()
            .enumerate()
            .filter_map(|(j, o)| o.map(|i| (i, j)))
            .collect();
        pairs.sort();
        pairs
    }

    fn better(&self, e: usize, v: usize, key: &[(String, String)]) -> bool {
        match &self.best {
            None => true,
            Some((be, bv, bk)) => (e, v) > (*be, *bv) || ((e, v) == (*be, *bv) && key < bk.as_slice()),
        }
    }

    fn leaf(&mut self, map: &[Option<usize>]) {
        let edges = self.edges_for(map);
        let mut key: Vec<(String, String)> = map
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| (self.q1.vertices[i].var.clone(), self.q2.vertices[j].var.clone())))
            .collect();
        key.extend(
            edges
                .iter()
                .map(|&(i, j)| (self.q1.edges[i].var.clone(), self.q2.edges[j].var.clone())),
        );
        key.sort();
        let v = map.iter().filter(|m| m.is_some()).count();
        if self.better(edges.len(), v, &key) {
            self.best = Some((edges.len(), v, key));
        }
    }

    fn upper_bound(&self, i: usize, map: &[Option<usize>]) -> (usize, usize) {
        let alive = |var: &str| {
            let k = Self::vertex_index(self.q1, var);
            k >= i || map[k].is_some()
        };
        let e = self.q1.edges.iter().filter(|e| alive(&e.from) && alive(&e.to)).count();
        let v = map[..i].iter().filter(|m| m.is_some()).count() + (self.q1.vertices.len() - i);
        (e, v)
    }

    fn dfs(&mut self, i: usize, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>) -> Result<(), IntersectError> {
        self.nodes += 1;
        if self.nodes > INTERSECT_NODE_LIMIT {
            return Err(IntersectError(format!(
                "{} and {} vertices exceed {INTERSECT_NODE_LIMIT} search nodes",
                self.q1.vertices.len(),
                self.q2.vertices.len()
            )));
        }
        if let Some((be, bv, _)) = &self.best {
            if self.upper_bound(i, map) < (*be, *bv) {
                return Ok(());
            }
        }
        if i == self.q1.vertices.len() {
            self.leaf(map);
            return Ok(());
        }
        for k in 0..self.cand[i].len() {
            let j = self.cand[i][k];
            if used[j] {
                continue;
            }
            used[j] = true;
            map[i] = Some(j);
            self.dfs(i + 1, map, used)?;
            map[i] = None;
            used[j] = false;
        }
        self.dfs(i + 1, map, used)
    }
}

/// Maximal common sub-pattern under an injective correspondence.
///
/// Vertices pair when their labels are compatible and their single-variable
/// constraints are jointly feasible; edges additionally need paired
/// endpoints. The largest result by (edges, vertices) wins, ties going to
/// the least sorted list of variable pairs.
pub fn intersect_patterns(
    q1: &GraphPattern,
    phi1: &[Constraint],
    q2: &GraphPattern,
    phi2: &[Constraint],
) -> Result<Intersection, IntersectError> {
    let cand = q1
        .vertices
        .iter()
        .map(|a| {
            (0..q2.vertices.len())
                .filter(|&j| {
                    let b = &q2.vertices[j];
                    a.label.compatible(&b.label) && pair_feasible(phi1, &a.var, phi2, &b.var)
                })
                .collect()
        })
        .collect();
    let label = |p: &GraphPattern, var: &str| p.label_of(var).cloned().unwrap_or(Label::Wildcard);
    let edge_cand = q1
        .edges
        .iter()
        .map(|a| {
            (0..q2.edges.len())
                .filter(|&j| {
                    let b = &q2.edges[j];
                    a.label.compatible(&b.label)
                        && label(q1, &a.from).compatible(&label(q2, &b.from))
                        && label(q1, &a.to).compatible(&label(q2, &b.to))
                        && pair_feasible(phi1, &a.var, phi2, &b.var)
                })
                .collect()
        })
        .collect();
    let mut s = Search {
        q1,
        q2,
        cand,
        edge_cand,
        nodes: 0,
        best: None,
    };
    let mut map = vec![None; q1.vertices.len()];
    let mut used = vec![false; q2.vertices.len()];
    s.dfs(0, &mut map, &mut used)?;
    let pairs: BTreeMap<String, String> = s.best.map(|(_, _, k)| k.into_iter().collect()).unwrap_or_default();
    let mut pattern = GraphPattern::default();
    for v in &q1.vertices {
        if pairs.contains_key(&v.var) {
            pattern.vertex(&v.var, v.label.as_str());
        }
    }
    for e in &q1.edges {
        if pairs.contains_key(&e.var) {
            pattern.edge(&e.var, e.label.as_str(), &e.from, &e.to);
        }
    }
    Ok(Intersection { pattern, map: pairs })
}

/// Whether the chosen sides of two GGDs share a non-empty intersection.
pub fn interacts(s1: &Ggd, s2: &Ggd, side: Side) -> Result<bool, IntersectError> {
    let (q1, p1, q2, p2) = match side {
        Side::Source => (&s1.source, &s1.source_constraints, &s2.source, &s2.source_constraints),
        Side::Target => (&s1.target, &s1.target_constraints, &s2.target, &s2.target_constraints),
        Side::TargetSource => (&s1.target, &s1.target_constraints, &s2.source, &s2.source_constraints),
    };
    Ok(!intersect_patterns(q1, p1, q2, p2)?.is_empty())
}
