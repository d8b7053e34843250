//! Concrete values for a consistent chase state.

use std::collections::{BTreeMap, BTreeSet};

use super::{ChaseState, Comparand, Role};
use crate::graph::{GraphBuilder, ObjRef, PropertyGraph, Value, GEN_BY_KEY};
use crate::lang::{distance, CmpOp, DistanceFn, Interval};

/// A target obligation on one attribute. `None` compares the attribute
/// with itself.
type Bound = (DistanceFn, Option<Value>, CmpOp, f64);

/// The quotient graph with a value chosen for every constrained attribute.
///
/// Attributes are assigned most constrained first; each choice only has
/// to respect constraints whose other side is already fixed. Every target
/// obligation is re-checked at the end.
pub fn extract_model(state: &ChaseState) -> Result<PropertyGraph, String> {
    let mut reps: Vec<ObjRef> = state.classes.keys().copied().collect();
    reps.sort_by(|a, b| state.graph.id(*a).cmp(state.graph.id(*b)));
    let mut assigned: BTreeMap<(ObjRef, String), Value> = BTreeMap::new();
    let mut open: Vec<(ObjRef, &String)> = Vec::new();
    for &r in &reps {
        let class = &state.classes[&r];
        for (key, rcqs) in &class.attrs {
            if let Some(v) = class.own_values(key).first() {
                assigned.insert((r, key.clone()), (*v).clone());
            } else if rcqs.iter().any(|q| q.role == Role::Target) {
                open.push((r, key));
            }
        }
    }
    while !open.is_empty() {
        let (i, bounds) = open
            .iter()
            .enumerate()
            .map(|(i, &(r, key))| (i, bounds_of(state, &assigned, r, key, false)))
            .max_by_key(|(i, b)| (b.len(), std::cmp::Reverse(*i)))
            .expect("open attributes");
        let (r, key) = open.remove(i);
        let text = state.classes[&r]
            .rcqs(key)
            .iter()
            .any(|q| matches!(q.distance, Some(DistanceFn::Edit | DistanceFn::Jaccard)));
        let v = choose(&bounds, text).ok_or_else(|| format!("no value found for {}.{key}", state.graph.id(r)))?;
        assigned.insert((r, key.clone()), v);
    }
    for &r in &reps {
        for key in state.classes[&r].attrs.keys() {
            if !assigned.contains_key(&(r, key.clone())) {
                continue;
            }
            let v = &assigned[&(r, key.clone())];
            let bounds = bounds_of(state, &assigned, r, key, true);
            if !satisfies(v, &bounds) {
                return Err(format!(
                    "chosen value for {}.{key} breaks an obligation",
                    state.graph.id(r)
                ));
            }
        }
    }
    let mut b = GraphBuilder::new();
    for &r in &reps {
        let obj = state.graph.obj(r);
        let mut props: BTreeMap<String, Value> = assigned
            .range((r, String::new())..)
            .take_while(|((o, _), _)| *o == r)
            .map(|((_, k), v)| (k.clone(), v.clone()))
            .collect();
        if let Some(v) = obj.properties.get(GEN_BY_KEY) {
            props.insert(GEN_BY_KEY.to_string(), v.clone());
        }
        let labels = state.class_labels(r);
        match state.graph.ends(r) {
            None => {
                b.vertex(obj.id.clone(), labels, props);
            }
            Some((s, t)) => {
                let (s, t) = (state.graph.id(state.rep(s)), state.graph.id(state.rep(t)));
                b.edge(obj.id.clone(), s, t, labels, props);
            }
        }
    }
    b.build().map_err(|e| e.to_string())
}

/// Target obligations on `r.key` whose comparand is known. With `strict`,
/// an unknown comparand is an error value that no candidate satisfies.
fn bounds_of(
    state: &ChaseState,
    assigned: &BTreeMap<(ObjRef, String), Value>,
    r: ObjRef,
    key: &str,
    strict: bool,
) -> Vec<Bound> {
    let mut out = Vec::new();
    for q in state.classes[&r].rcqs(key).iter().filter(|q| q.role == Role::Target) {
        let d = q.distance.expect("target obligation has a distance");
        let other = match &q.val {
            Comparand::Const(k) => Some(Some(k.clone())),
            Comparand::Attr { object, key: k2 } => match state.rep_of(object) {
                Some(r2) if r2 == r && k2 == key => Some(None),
                r2 => r2.and_then(|r2| assigned.get(&(r2, k2.clone())).cloned()).map(Some),
            },
        };
        match other {
            Some(k) => out.push((d, k, q.op, q.threshold)),
            None if strict => out.push((DistanceFn::Eq, Some(Value::Boolean(false)), CmpOp::Lt, 0.0)),
            None => {}
        }
    }
    out
}

fn satisfies(v: &Value, bounds: &[Bound]) -> bool {
    bounds
        .iter()
        .all(|(d, k, op, t)| distance(*d, v, k.as_ref().unwrap_or(v)).is_ok_and(|x| op.holds(x, *t)))
}

fn allowed(op: CmpOp, t: f64) -> Interval {
    Interval::from_op(op, t).intersect(&Interval::non_negative())
}

fn numeric_candidates(x: f64, out: &mut Vec<Value>) {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        out.push(Value::Integer(x as i64));
    }
    out.push(Value::Number(x));
}

/// A value meeting every bound. `text` prefers strings when nothing else
/// decides the kind.
fn choose(all: &[Bound], text_hint: bool) -> Option<Value> {
    let bounds: Vec<(DistanceFn, Value, CmpOp, f64)> = all
        .iter()
        .filter_map(|(d, k, op, t)| k.clone().map(|k| (*d, k, *op, *t)))
        .collect();
    let mut stages: Vec<Vec<Value>> = Vec::new();

    let pins: Vec<Value> = bounds
        .iter()
        .filter(|(d, _, op, t)| {
            *d == DistanceFn::Eq && allowed(*op, *t).contains(0.0) && !allowed(*op, *t).contains(1.0)
        })
        .map(|(_, k, _, _)| k.clone())
        .collect();
    stages.push(pins);

    let mut region: Option<Interval> = None;
    for (d, k, op, t) in &bounds {
        if *d == DistanceFn::AbsDiff {
            let pre = match k.as_f64() {
                Some(c) => allowed(*op, *t).absdiff_preimage(c),
                None => Interval::empty(),
            };
            region = Some(region.map_or(pre.clone(), |r| r.intersect(&pre)));
        }
    }
    if let Some(region) = region {
        let mut nums = Vec::new();
        for (lo, lc, hi, hc) in region.segments() {
            if let Some(x) = Interval::from_seg(lo, lc, hi, hc).sample() {
                numeric_candidates(x, &mut nums);
            }
            for (end, closed) in [(lo, lc), (hi, hc)] {
                if closed && end.is_finite() {
                    numeric_candidates(end, &mut nums);
                }
            }
        }
        stages.push(nums);
    }

    let texts: Vec<&str> = bounds.iter().filter_map(|(_, k, _, _)| k.as_text()).collect();
    let used: BTreeSet<char> = texts.iter().flat_map(|s| s.chars()).collect();
    let fresh = "zqxjkvw~#"
        .chars()
        .chain(['\u{e000}'])
        .find(|c| !used.contains(c))
        .expect("a fresh character");
    let mut text = Vec::new();
    for (d, k, op, t) in &bounds {
        let Some(c) = k.as_text() else { continue };
        let ok = allowed(*op, *t);
        match d {
            DistanceFn::Edit => {
                let len = c.chars().count();
                for n in 0..=16usize {
                    if !ok.contains(n as f64) {
                        continue;
                    }
                    text.push(Value::text(format!("{c}{}", fresh.to_string().repeat(n))));
                    if n <= len {
                        text.push(Value::text(c.chars().take(len - n).collect::<String>()));
                    }
                }
            }
            DistanceFn::Jaccard => {
                let tokens: Vec<String> = crate::lang::jaccard_tokens(c).into_iter().take(12).collect();
                for keep in (0..=tokens.len()).rev() {
                    for extra in 0..=8 {
                        let mut parts: Vec<String> = tokens[..keep].to_vec();
                        parts.extend((0..extra).map(|i| format!("{fresh}{fresh}{i}")));
                        text.push(Value::text(parts.join(" ")));
                    }
                }
            }
            _ => {}
        }
    }
    stages.push(text);

    let mut fallback = vec![Value::Integer(0), Value::text(fresh.to_string())];
    if text_hint {
        fallback.reverse();
    }
    for (_, k, _, _) in &bounds {
        match k {
            Value::Text(s) => fallback.push(Value::text(format!("{s}{fresh}"))),
            Value::Integer(i) => fallback.push(Value::Integer(i.saturating_add(1))),
            Value::Number(x) => fallback.push(Value::Number(x + 1.0)),
            Value::Boolean(b) => fallback.push(Value::Boolean(!b)),
        }
    }
    stages.push(fallback);

    let alphabet: BTreeSet<char> = used.iter().copied().chain([fresh]).collect();
    for c in &texts {
        if let Some(ball) = crate::lang::edit_ball(c, 2, &alphabet) {
            stages.push(ball.into_iter().map(Value::text).collect());
        }
    }

    stages.into_iter().flatten().find(|v| satisfies(v, all))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_band_prefers_integers() {
        let b = vec![(DistanceFn::AbsDiff, Some(Value::Integer(10)), CmpOp::Le, 2.0)];
        assert_eq!(choose(&b, false), Some(Value::Integer(10)));
    }

    #[test]
    fn open_band_avoids_center() {
        let b = vec![
            (DistanceFn::AbsDiff, Some(Value::Integer(10)), CmpOp::Gt, 3.0),
            (DistanceFn::AbsDiff, Some(Value::Integer(0)), CmpOp::Lt, 20.0),
        ];
        let v = choose(&b, false).unwrap();
        assert!(satisfies(&v, &b));
    }

    #[test]
    fn edit_distance_exactly() {
        let b = vec![
            (DistanceFn::Edit, Some(Value::text("abc")), CmpOp::Ge, 2.0),
            (DistanceFn::Edit, Some(Value::text("abc")), CmpOp::Le, 2.0),
        ];
        let v = choose(&b, true).unwrap();
        assert!(satisfies(&v, &b));
    }

    #[test]
    fn jaccard_half() {
        let b = vec![(DistanceFn::Jaccard, Some(Value::text("a b")), CmpOp::Eq, 0.5)];
        let v = choose(&b, true).unwrap();
        assert!(satisfies(&v, &b));
    }

    #[test]
    fn self_comparison_needs_a_string() {
        let b = vec![(DistanceFn::Jaccard, None, CmpOp::Le, 1.0)];
        let v = choose(&b, true).unwrap();
        assert!(v.as_text().is_some());
        assert!(choose(&[(DistanceFn::Edit, None, CmpOp::Gt, 0.0)], true).is_none());
    }
}
