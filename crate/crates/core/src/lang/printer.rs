//! Canonical text rendering; parsing the output yields the same object model.

use std::fmt::{self, Write as _};

use super::{Constraint, Ggd, GgdSet, GraphPattern};
use crate::graph::Value;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn constant(v: &Value) -> String {
    match v {
        Value::Text(s) => quote(s),
        other => other.to_string(),
    }
}

fn threshold(t: f64) -> String {
    if t.fract() == 0.0 && t.abs() < 1e15 {
        format!("{}", t as i64)
    } else {
        format!("{t:?}")
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::ConstVsAttr {
                distance,
                attr,
                constant: c,
                op,
                threshold: t,
            } => write!(
                f,
                "{}({}.{}, {}) {} {}",
                distance.name(),
                attr.var,
                attr.key,
                constant(c),
                op.symbol(),
                threshold(*t)
            ),
            Constraint::AttrVsAttr {
                distance,
                left,
                right,
                op,
                threshold: t,
            } => write!(
                f,
                "{}({}.{}, {}.{}) {} {}",
                distance.name(),
                left.var,
                left.key,
                right.var,
                right.key,
                op.symbol(),
                threshold(*t)
            ),
            Constraint::IdentEq(a, b) => write!(f, "{a} = {b}"),
            Constraint::IdentNeq(a, b) => write!(f, "{a} != {b}"),
        }
    }
}

impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("({}:{})", v.var, v.label))
            .collect();
        parts.extend(
            self.edges
                .iter()
                .map(|e| format!("({})-[{}:{}]->({})", e.from, e.var, e.label, e.to)),
        );
        f.write_str(&parts.join(", "))
    }
}

fn block(out: &mut String, kw: &str, body: &[String], inline: bool) {
    if body.is_empty() {
        let _ = writeln!(out, "  {kw} {{ }}");
    } else if inline {
        let _ = writeln!(out, "  {kw} {{ {} }}", body.join(", "));
    } else {
        let _ = writeln!(out, "  {kw} {{");
        for line in body {
            let _ = writeln!(out, "    {line};");
        }
        let _ = writeln!(out, "  }}");
    }
}

impl fmt::Display for Ggd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = format!("ggd {} {{\n", self.name);
        let pat = |p: &GraphPattern| {
            let s = p.to_string();
            if s.is_empty() {
                Vec::new()
            } else {
                vec![s]
            }
        };
        let cons = |cs: &[Constraint]| cs.iter().map(ToString::to_string).collect::<Vec<_>>();
        block(&mut out, "source", &pat(&self.source), true);
        block(&mut out, "where", &cons(&self.source_constraints), false);
        block(&mut out, "target", &pat(&self.target), true);
        block(&mut out, "having", &cons(&self.target_constraints), false);
        out.push_str("}\n");
        f.write_str(&out)
    }
}

impl fmt::Display for GgdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.ggds.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}
