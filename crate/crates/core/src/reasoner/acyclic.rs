use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::dot::{Config, Dot};
use petgraph::graph::{DiGraph, NodeIndex};

use crate::lang::{Constraint, GgdSet, GraphPattern, Label, VarKind};

/// A (kind, label, key) slot. Key `*` stands for the object itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub kind: VarKind,
    pub label: String,
    pub key: String,
}

pub const ENTITY_KEY: &str = "*";

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Vertex => write!(f, "({}).{}", self.label, self.key),
            VarKind::Edge => write!(f, "[{}].{}", self.label, self.key),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Regular,
    /// Flows into an object the target has to create.
    Special,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Regular => "regular",
            EdgeKind::Special => "special",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DependencyGraph {
    pub graph: DiGraph<Position, EdgeKind>,
}

impl DependencyGraph {
    /// Graphviz rendering with a stable node and edge order.
    pub fn to_dot(&self) -> String {
        let shown = self.graph.map(|_, p| p.to_string(), |_, k| k.to_string());
        format!("{}", Dot::with_config(&shown, &[Config::GraphContentOnly]))
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .fold(String::from("digraph dependencies {\n"), |mut acc, l| {
                acc.push_str("    ");
                acc.push_str(l);
                acc.push('\n');
                acc
            })
            + "}\n"
    }

    /// Special edges whose endpoints share a strongly connected component.
    pub fn cyclic_special_edges(&self) -> Vec<(Position, Position)> {
        let mut comp = vec![0usize; self.graph.node_count()];
        for (ci, scc) in tarjan_scc(&self.graph).iter().enumerate() {
            for n in scc {
                comp[n.index()] = ci;
            }
        }
        let mut out: Vec<(Position, Position)> = self
            .graph
            .edge_indices()
            .filter(|&e| self.graph[e] == EdgeKind::Special)
            .filter_map(|e| {
                let (a, b) = self.graph.edge_endpoints(e)?;
                (comp[a.index()] == comp[b.index()]).then(|| (self.graph[a].clone(), self.graph[b].clone()))
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn label_name(l: &Label) -> String {
    l.as_str().to_string()
}

/// Positions of every variable of `p`: its entity slot plus each key `phi`
/// mentions on it.
fn positions(p: &GraphPattern, phi: &[Constraint]) -> BTreeMap<String, BTreeSet<Position>> {
    let mut out: BTreeMap<String, BTreeSet<Position>> = BTreeMap::new();
    for var in p.variables() {
        let kind = p.var_kind(var).expect("pattern variable");
        let label = label_name(p.label_of(var).expect("pattern variable"));
        out.entry(var.to_string()).or_default().insert(Position {
            kind,
            label,
            key: ENTITY_KEY.into(),
        });
    }
    for c in phi {
        let attrs = match c {
            Constraint::ConstVsAttr { attr, .. } => vec![attr],
            Constraint::AttrVsAttr { left, right, .. } => vec![left, right],
            _ => Vec::new(),
        };
        for a in attrs {
            if let (Some(kind), Some(label)) = (p.var_kind(&a.var), p.label_of(&a.var)) {
                out.entry(a.var.clone()).or_default().insert(Position {
                    kind,
                    label: label_name(label),
                    key: a.key.clone(),
                });
            }
        }
    }
    out
}

/// Builds the dependency graph over (kind, label, key) positions.
///
/// Per GGD: a regular edge from each source position of a shared variable
/// to each of its target positions, and a special edge from every source
/// position to every position of an object the target creates. Named
/// positions also feed the wildcard position of the same kind and key,
/// since wildcard patterns match objects of any label. Weakly acyclic iff no
/// special edge lies on a cycle.
pub fn is_weakly_acyclic(sigma: &GgdSet) -> (bool, DependencyGraph) {
    let mut edges: BTreeSet<(Position, Position, EdgeKind)> = BTreeSet::new();
    let mut nodes: BTreeSet<Position> = BTreeSet::new();
    for ggd in sigma {
        let src = positions(&ggd.source, &ggd.source_constraints);
        let tgt = positions(&ggd.target, &ggd.target_constraints);
        let all_src: BTreeSet<Position> = src.values().flatten().cloned().collect();
        let fresh: BTreeSet<String> = ggd.fresh_vars().into_iter().collect();
        nodes.extend(all_src.iter().cloned());
        for (var, tps) in &tgt {
            nodes.extend(tps.iter().cloned());
            if fresh.contains(var) {
                for s in &all_src {
                    for t in tps {
                        edges.insert((s.clone(), t.clone(), EdgeKind::Special));
                    }
                }
            } else if let Some(sps) = src.get(var) {
                for s in sps {
                    for t in tps {
                        edges.insert((s.clone(), t.clone(), EdgeKind::Regular));
                    }
                }
            }
        }
    }
    let named: Vec<Position> = nodes.iter().filter(|p| p.label != "-").cloned().collect();
    for p in named {
        let wild = Position {
            label: "-".into(),
            ..p.clone()
        };
        if nodes.contains(&wild) {
            edges.insert((p, wild, EdgeKind::Regular));
        }
    }
    let mut graph = DiGraph::new();
    let index: BTreeMap<Position, NodeIndex> = nodes.iter().map(|p| (p.clone(), graph.add_node(p.clone()))).collect();
    for (a, b, k) in edges {
        graph.add_edge(index[&a], index[&b], k);
    }
    let dg = DependencyGraph { graph };
    (dg.cyclic_special_edges().is_empty(), dg)
}
