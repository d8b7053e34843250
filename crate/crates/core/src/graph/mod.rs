//! In-memory property graph with deterministic, id-sorted indexes.
//!
//! Objects live in a dense arena addressed by [`ObjRef`]. Every index (per-kind
//! id lists, label index, adjacency) is kept sorted by object id so iteration
//! order is a function of the graph contents only.

mod csv;
mod value;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use self::csv::{dump_graph, graph_to_csv, load_graph, parse_graph};
pub use self::value::{Value, ValueKind};

/// Dense handle into a [`PropertyGraph`] arena.
pub type ObjRef = usize;

/// Property key stamped on generated objects.
pub const GEN_BY_KEY: &str = "_gen_by";

/// Prefix of ids minted by [`PropertyGraph::create_object`].
pub const GEN_PREFIX: &str = "gen:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectKind {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphObject {
    pub id: String,
    pub kind: ObjectKind,
    pub labels: BTreeSet<String>,
    pub properties: BTreeMap<String, Value>,
    /// `(source id, target id)` for edges.
    pub endpoints: Option<(String, String)>,
}

impl GraphObject {
    /// Property lookup as seen by constraint evaluation: `_`-prefixed keys are hidden.
    pub fn visible_property(&self, key: &str) -> Option<&Value> {
        if key.starts_with('_') {
            None
        } else {
            self.properties.get(key)
        }
    }

    pub fn has_label(&self, label: &str) -> bool {
        label == "-" || self.labels.contains(label)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("duplicate object id `{0}`")]
    DuplicateId(String),
    #[error("edge `{edge}` references missing vertex `{missing}`")]
    DanglingEndpoint { edge: String, missing: String },
    #[error("endpoints must be given for edges and only for edges")]
    EndpointMismatch,
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    objects: Vec<GraphObject>,
    ends: Vec<Option<(ObjRef, ObjRef)>>,
    ids: BTreeMap<String, ObjRef>,
    vertices: Vec<ObjRef>,
    edges: Vec<ObjRef>,
    out_adj: Vec<Vec<ObjRef>>,
    in_adj: Vec<Vec<ObjRef>>,
    vertex_labels: BTreeMap<String, Vec<ObjRef>>,
    edge_labels: BTreeMap<String, Vec<ObjRef>>,
    next_gen: u64,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn lookup(&self, id: &str) -> Option<ObjRef> {
        self.ids.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&GraphObject> {
        self.lookup(id).map(|r| &self.objects[r])
    }

    pub fn obj(&self, r: ObjRef) -> &GraphObject {
        &self.objects[r]
    }

    pub fn id(&self, r: ObjRef) -> &str {
        &self.objects[r].id
    }

    /// Endpoint handles of an edge.
    pub fn ends(&self, r: ObjRef) -> Option<(ObjRef, ObjRef)> {
        self.ends[r]
    }

    pub fn out_edges(&self, v: ObjRef) -> &[ObjRef] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: ObjRef) -> &[ObjRef] {
        &self.in_adj[v]
    }

    /// Vertex handles sorted by id.
    pub fn vertex_refs(&self) -> &[ObjRef] {
        &self.vertices
    }

    /// Edge handles sorted by id.
    pub fn edge_refs(&self) -> &[ObjRef] {
        &self.edges
    }

    pub fn refs_of_kind(&self, kind: ObjectKind) -> &[ObjRef] {
        match kind {
            ObjectKind::Vertex => &self.vertices,
            ObjectKind::Edge => &self.edges,
        }
    }

    /// Handles of objects of `kind` carrying `label` (`-` means any), sorted by id.
    pub fn refs_with_label(&self, kind: ObjectKind, label: &str) -> &[ObjRef] {
        if label == "-" {
            return self.refs_of_kind(kind);
        }
        let index = match kind {
            ObjectKind::Vertex => &self.vertex_labels,
            ObjectKind::Edge => &self.edge_labels,
        };
        index.get(label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Ids of objects of `kind` carrying `label` (`-` means any), sorted.
    pub fn objects_with_label(&self, kind: ObjectKind, label: &str) -> Vec<&str> {
        self.refs_with_label(kind, label).iter().map(|&r| self.id(r)).collect()
    }

    /// Distinct labels used by objects of `kind`.
    pub fn labels(&self, kind: ObjectKind) -> impl Iterator<Item = &str> {
        match kind {
            ObjectKind::Vertex => self.vertex_labels.keys(),
            ObjectKind::Edge => self.edge_labels.keys(),
        }
        .map(String::as_str)
    }

    /// All objects in id order.
    pub fn objects(&self) -> impl Iterator<Item = &GraphObject> {
        self.ids.values().map(|&r| &self.objects[r])
    }

    /// Adds an object with a fresh `gen:<n>` id and returns that id.
    pub fn create_object(
        &mut self,
        kind: ObjectKind,
        labels: BTreeSet<String>,
        properties: BTreeMap<String, Value>,
        endpoints: Option<(&str, &str)>,
    ) -> Result<String, GraphError> {
        let ends = match (kind, endpoints) {
            (ObjectKind::Vertex, None) => None,
            (ObjectKind::Edge, Some((s, t))) => Some((self.vertex_ref(s, "<new>")?, self.vertex_ref(t, "<new>")?)),
            _ => return Err(GraphError::EndpointMismatch),
        };
        let id = loop {
            self.next_gen += 1;
            let candidate = format!("{GEN_PREFIX}{}", self.next_gen);
            if !self.ids.contains_key(&candidate) {
                break candidate;
            }
        };
        let endpoints = endpoints.map(|(s, t)| (s.to_string(), t.to_string()));
        let r = self.push(
            GraphObject {
                id: id.clone(),
                kind,
                labels,
                properties,
                endpoints,
            },
            ends,
        );
        self.index_sorted(r);
        Ok(id)
    }

    /// Sets a property on an existing object.
    pub fn set_property(&mut self, r: ObjRef, key: &str, value: Value) {
        self.objects[r].properties.insert(key.to_string(), value);
    }

    fn vertex_ref(&self, id: &str, edge: &str) -> Result<ObjRef, GraphError> {
        match self.ids.get(id) {
            Some(&r) if self.objects[r].kind == ObjectKind::Vertex => Ok(r),
            _ => Err(GraphError::DanglingEndpoint {
                edge: edge.to_string(),
                missing: id.to_string(),
            }),
        }
    }

    fn push(&mut self, obj: GraphObject, ends: Option<(ObjRef, ObjRef)>) -> ObjRef {
        let r = self.objects.len();
        self.ids.insert(obj.id.clone(), r);
        self.objects.push(obj);
        self.ends.push(ends);
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        r
    }

    fn index_sorted(&mut self, r: ObjRef) {
        let objects = &self.objects;
        let insert = |list: &mut Vec<ObjRef>| {
            let pos = list.partition_point(|&o| objects[o].id < objects[r].id);
            list.insert(pos, r);
        };
        let obj = &objects[r];
        match obj.kind {
            ObjectKind::Vertex => {
                insert(&mut self.vertices);
                for l in &obj.labels {
                    insert(self.vertex_labels.entry(l.clone()).or_default());
                }
            }
            ObjectKind::Edge => {
                insert(&mut self.edges);
                for l in &obj.labels {
                    insert(self.edge_labels.entry(l.clone()).or_default());
                }
                let (s, t) = self.ends[r].expect("edge without endpoints");
                insert(&mut self.out_adj[s]);
                insert(&mut self.in_adj[t]);
            }
        }
    }

    /// Rebuilds every index from the object arena.
    fn reindex(&mut self) {
        self.vertices.clear();
        self.edges.clear();
        self.vertex_labels.clear();
        self.edge_labels.clear();
        for adj in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            adj.clear();
        }
        let order: Vec<ObjRef> = self.ids.values().copied().collect();
        for r in order {
            let obj = &self.objects[r];
            let labels = match obj.kind {
                ObjectKind::Vertex => {
                    self.vertices.push(r);
                    &mut self.vertex_labels
                }
                ObjectKind::Edge => {
                    self.edges.push(r);
                    let (s, t) = self.ends[r].expect("edge without endpoints");
                    self.out_adj[s].push(r);
                    self.in_adj[t].push(r);
                    &mut self.edge_labels
                }
            };
            for l in &obj.labels {
                labels.entry(l.clone()).or_default().push(r);
            }
        }
    }

    /// Checks that every index agrees with the object arena.
    pub fn audit(&self) -> Result<(), String> {
        let mut fresh = self.clone();
        fresh.reindex();
        let check = |name: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(format!("{name} index out of sync"))
            }
        };
        check("vertex", fresh.vertices == self.vertices)?;
        check("edge", fresh.edges == self.edges)?;
        check("vertex label", fresh.vertex_labels == self.vertex_labels)?;
        check("edge label", fresh.edge_labels == self.edge_labels)?;
        check("out adjacency", fresh.out_adj == self.out_adj)?;
        check("in adjacency", fresh.in_adj == self.in_adj)?;
        if self.ids.len() != self.objects.len() {
            return Err("id map out of sync".into());
        }
        for (id, &r) in &self.ids {
            let obj = &self.objects[r];
            if &obj.id != id {
                return Err(format!("id map points `{id}` at `{}`", obj.id));
            }
            match (obj.kind, &obj.endpoints, self.ends[r]) {
                (ObjectKind::Vertex, None, None) => {}
                (ObjectKind::Edge, Some((s, t)), Some((rs, rt))) => {
                    if self.objects[rs].id != *s || self.objects[rt].id != *t {
                        return Err(format!("edge `{id}` endpoint handles disagree with ids"));
                    }
                    if self.objects[rs].kind != ObjectKind::Vertex || self.objects[rt].kind != ObjectKind::Vertex {
                        return Err(format!("edge `{id}` has a non-vertex endpoint"));
                    }
                }
                _ => return Err(format!("object `{id}` has inconsistent endpoints")),
            }
        }
        Ok(())
    }
}

/// Bulk loader: collects objects, then sorts and validates once.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<GraphObject>,
    edges: Vec<GraphObject>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(
        &mut self,
        id: impl Into<String>,
        labels: BTreeSet<String>,
        properties: BTreeMap<String, Value>,
    ) -> &mut Self {
        self.vertices.push(GraphObject {
            id: id.into(),
            kind: ObjectKind::Vertex,
            labels,
            properties,
            endpoints: None,
        });
        self
    }

    pub fn edge(
        &mut self,
        id: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
        labels: BTreeSet<String>,
        properties: BTreeMap<String, Value>,
    ) -> &mut Self {
        self.edges.push(GraphObject {
            id: id.into(),
            kind: ObjectKind::Edge,
            labels,
            properties,
            endpoints: Some((src.into(), dst.into())),
        });
        self
    }

    pub fn build(self) -> Result<PropertyGraph, GraphError> {
        let mut g = PropertyGraph::new();
        for v in self.vertices {
            if g.ids.contains_key(&v.id) {
                return Err(GraphError::DuplicateId(v.id));
            }
            g.push(v, None);
        }
        let mut pending = Vec::with_capacity(self.edges.len());
        for e in self.edges {
            if g.ids.contains_key(&e.id) {
                return Err(GraphError::DuplicateId(e.id));
            }
            let (s, t) = e.endpoints.clone().expect("builder edge without endpoints");
            let ends = (g.vertex_ref(&s, &e.id)?, g.vertex_ref(&t, &e.id)?);
            pending.push((e, ends));
        }
        for (e, ends) in pending {
            if g.ids.contains_key(&e.id) {
                return Err(GraphError::DuplicateId(e.id));
            }
            g.push(e, Some(ends));
        }
        g.reindex();
        Ok(g)
    }
}

/// Builds a label set from string slices.
pub fn labels<I, S>(items: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

/// Builds a property map from `(key, value)` pairs.
pub fn props<I, K>(items: I) -> BTreeMap<String, Value>
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    items.into_iter().map(|(k, v)| (k.into(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> PropertyGraph {
        let mut b = GraphBuilder::new();
        b.vertex("v1", labels(["Person"]), props([("name", Value::text("Ann"))]))
            .vertex("v2", labels(["Person", "Employee"]), BTreeMap::new())
            .vertex("v3", labels(["Company"]), BTreeMap::new())
            .edge("e1", "v1", "v3", labels(["worksAt"]), BTreeMap::new());
        b.build().unwrap()
    }

    #[test]
    fn label_lookup() {
        let g = tiny();
        assert_eq!(g.objects_with_label(ObjectKind::Vertex, "-"), vec!["v1", "v2", "v3"]);
        assert_eq!(g.objects_with_label(ObjectKind::Vertex, "Person"), vec!["v1", "v2"]);
        assert!(g.objects_with_label(ObjectKind::Vertex, "Zzz").is_empty());
        g.audit().unwrap();
    }

    #[test]
    fn create_keeps_indexes() {
        let mut g = tiny();
        let p = g
            .create_object(ObjectKind::Vertex, labels(["Place"]), BTreeMap::new(), None)
            .unwrap();
        let e = g
            .create_object(
                ObjectKind::Edge,
                labels(["isLocatedIn"]),
                BTreeMap::new(),
                Some(("v3", &p)),
            )
            .unwrap();
        assert_eq!(p, "gen:1");
        assert_eq!(e, "gen:2");
        g.audit().unwrap();
        let v3 = g.lookup("v3").unwrap();
        assert_eq!(g.out_edges(v3).len(), 1);
        let missing = g.create_object(
            ObjectKind::Edge,
            labels(["x"]),
            BTreeMap::new(),
            Some(("v1", "gen:999")),
        );
        assert!(matches!(missing, Err(GraphError::DanglingEndpoint { .. })));
    }
}
