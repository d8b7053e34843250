//! Two-file CSV layout: `vertices.csv` (`id;labels;props`) and
//! `edges.csv` (`id;src;dst;labels;props`). Labels are `|`-separated, properties
//! are `k=v` pairs separated by `,`. A backslash escapes any separator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{GraphBuilder, GraphError, ObjectKind, PropertyGraph, Value};

const VERTEX_HEADER: &str = "id;labels;props";
const EDGE_HEADER: &str = "id;src;dst;labels;props";

pub fn load_graph(dir: impl AsRef<Path>) -> Result<PropertyGraph, GraphError> {
    let dir = dir.as_ref();
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|e| GraphError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    };
    parse_graph(&read("vertices.csv")?, &read("edges.csv")?)
}

/// Parses the contents of the two files.
pub fn parse_graph(vertices: &str, edges: &str) -> Result<PropertyGraph, GraphError> {
    let mut b = GraphBuilder::new();
    for (line, fields) in rows("vertices.csv", vertices, VERTEX_HEADER, 3)? {
        let err = |m: String| parse_err("vertices.csv", line, m);
        let labels = parse_labels(&fields[1]).map_err(err)?;
        let props = parse_props(&fields[2]).map_err(err)?;
        b.vertex(unescape(&fields[0]), labels, props);
    }
    for (line, fields) in rows("edges.csv", edges, EDGE_HEADER, 5)? {
        let err = |m: String| parse_err("edges.csv", line, m);
        let labels = parse_labels(&fields[3]).map_err(err)?;
        let props = parse_props(&fields[4]).map_err(err)?;
        b.edge(
            unescape(&fields[0]),
            unescape(&fields[1]),
            unescape(&fields[2]),
            labels,
            props,
        );
    }
    b.build()
}

fn parse_err(file: &str, line: usize, message: String) -> GraphError {
    GraphError::Parse {
        file: file.to_string(),
        line,
        message,
    }
}

type Rows = Vec<(usize, Vec<String>)>;

fn rows(file: &str, text: &str, header: &str, arity: usize) -> Result<Rows, GraphError> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if raw.trim() != header {
                return Err(parse_err(file, line, format!("expected header `{header}`")));
            }
            seen_header = true;
            continue;
        }
        let fields = split_escaped(raw, ';');
        if fields.len() != arity {
            return Err(parse_err(
                file,
                line,
                format!("expected {arity} fields, found {}", fields.len()),
            ));
        }
        if fields[0].is_empty() {
            return Err(parse_err(file, line, "empty id".into()));
        }
        out.push((line, fields));
    }
    // An entirely empty file stands for an empty table.
    Ok(out)
}

fn parse_labels(field: &str) -> Result<BTreeSet<String>, String> {
    let labels: BTreeSet<String> = split_escaped(field, '|')
        .iter()
        .map(|l| unescape(l))
        .filter(|l| !l.is_empty())
        .collect();
    if labels.is_empty() {
        return Err("object has no labels".into());
    }
    if labels.contains("-") {
        return Err("`-` is reserved for the wildcard".into());
    }
    Ok(labels)
}

fn parse_props(field: &str) -> Result<BTreeMap<String, Value>, String> {
    let mut props = BTreeMap::new();
    if field.is_empty() {
        return Ok(props);
    }
    for pair in split_escaped(field, ',') {
        let kv = split_escaped(&pair, '=');
        if kv.len() < 2 {
            return Err(format!("property `{}` is not of the form k=v", unescape(&pair)));
        }
        let key = unescape(&kv[0]);
        if key.is_empty() {
            return Err("empty property key".into());
        }
        // Only the first unescaped `=` separates key from value.
        let rest = kv[1..].join("=");
        if props
            .insert(key.clone(), Value::parse_field(&unescape(&rest)))
            .is_some()
        {
            return Err(format!("duplicate property key `{key}`"));
        }
    }
    Ok(props)
}

/// Splits on unescaped `sep`, leaving escape sequences in place.
fn split_escaped(s: &str, sep: char) -> Vec<String> {
    let mut parts = vec![String::new()];
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            let last = parts.last_mut().unwrap();
            last.push(c);
            if let Some(n) = chars.next() {
                last.push(n);
            }
        } else if c == sep {
            parts.push(String::new());
        } else {
            parts.last_mut().unwrap().push(c);
        }
    }
    parts
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some(n) => out.push(n),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            ';' | '|' | ',' | '=' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

fn write_labels(out: &mut String, labels: &BTreeSet<String>) {
    let joined: Vec<String> = labels.iter().map(|l| escape(l)).collect();
    out.push_str(&joined.join("|"));
}

fn write_props(out: &mut String, props: &BTreeMap<String, Value>) {
    let joined: Vec<String> = props
        .iter()
        .map(|(k, v)| format!("{}={}", escape(k), escape(&v.to_field())))
        .collect();
    out.push_str(&joined.join(","));
}

/// Serializes the graph as `(vertices.csv, edges.csv)` contents, rows sorted by id.
pub fn graph_to_csv(g: &PropertyGraph) -> (String, String) {
    let mut vs = format!("{VERTEX_HEADER}\n");
    for &r in g.refs_of_kind(ObjectKind::Vertex) {
        let o = g.obj(r);
        vs.push_str(&escape(&o.id));
        vs.push(';');
        write_labels(&mut vs, &o.labels);
        vs.push(';');
        write_props(&mut vs, &o.properties);
        vs.push('\n');
    }
    let mut es = format!("{EDGE_HEADER}\n");
    for &r in g.refs_of_kind(ObjectKind::Edge) {
        let o = g.obj(r);
        let (s, t) = o.endpoints.as_ref().expect("edge without endpoints");
        let _ = write!(es, "{};{};{};", escape(&o.id), escape(s), escape(t));
        write_labels(&mut es, &o.labels);
        es.push(';');
        write_props(&mut es, &o.properties);
        es.push('\n');
    }
    (vs, es)
}

pub fn dump_graph(g: &PropertyGraph, dir: impl AsRef<Path>) -> Result<(), GraphError> {
    let dir = dir.as_ref();
    let io = |path: &Path, e: std::io::Error| GraphError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let (vs, es) = graph_to_csv(g);
    for (name, body) in [("vertices.csv", vs), ("edges.csv", es)] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_round_trip() {
        for s in ["a;b", "x|y", "k=v", "c,d", "back\\slash", "two\nlines", "plain"] {
            assert_eq!(unescape(&escape(s)), s);
            assert_eq!(split_escaped(&escape(s), ';').len(), 1);
        }
    }

    #[test]
    fn first_equals_splits() {
        let p = parse_props("url=a\\=b,n=1").unwrap();
        assert_eq!(p["url"], Value::text("a=b"));
        assert_eq!(p["n"], Value::Integer(1));
    }
}
