use std::collections::BTreeMap;

use serde::Serialize;

use ggd_core::graph::{PropertyGraph, Value};

/// Result document of the reasoning commands. Field order is fixed.
#[derive(Serialize)]
pub struct Verdict {
    pub problem: &'static str,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub steps: usize,
    pub ms: Option<f64>,
}

impl Verdict {
    pub fn render(&self) -> serde_json::Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[derive(Serialize)]
struct WitnessObject<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    src: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dst: Option<&'a str>,
    labels: Vec<&'a str>,
    props: &'a BTreeMap<String, Value>,
}

#[derive(Serialize)]
pub struct WitnessGraph<'a> {
    vertices: Vec<WitnessObject<'a>>,
    edges: Vec<WitnessObject<'a>>,
}

impl<'a> WitnessGraph<'a> {
    pub fn of(g: &'a PropertyGraph) -> WitnessGraph<'a> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for o in g.objects() {
            let (src, dst) = match &o.endpoints {
                Some((s, t)) => (Some(s.as_str()), Some(t.as_str())),
                None => (None, None),
            };
            let w = WitnessObject {
                id: &o.id,
                src,
                dst,
                labels: o.labels.iter().map(String::as_str).collect(),
                props: &o.properties,
            };
            if src.is_some() {
                edges.push(w);
            } else {
                vertices.push(w);
            }
        }
        WitnessGraph { vertices, edges }
    }

    pub fn into_value(self) -> serde_json::Value {
        serde_json::to_value(&self).expect("witness serializes")
    }
}
