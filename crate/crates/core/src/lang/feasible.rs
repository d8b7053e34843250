//! Feasibility of constraint sets by interval analysis.
//!
//! Every distance constraint is keyed by its `(distance, left, right)` triple
//! after identity classes are collapsed; the admissible distances of a triple
//! are the intersection of the intervals of its constraints, restricted to the
//! values the distance function can actually take. On top of the per-triple
//! check, each attribute is refined against all of its constant comparands at
//! once: numbers on the real line, text by a bounded neighbourhood search.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::distance::{distance, jaccard_tokens};
use super::interval::Interval;
use super::{AttrRef, Constraint, DistanceFn};
use crate::graph::Value;

const BALL_LIMIT: usize = 100_000;
const JACCARD_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Operand {
    Attr(AttrRef),
    Const(Value),
}

pub(crate) type Triple = (DistanceFn, Operand, Operand);

/// The values a distance function can take for a given pair of operands.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSet {
    Empty,
    /// A closed real range.
    Reals(f64, f64),
    Naturals,
    Points(Vec<f64>),
    /// Jaccard distances against a constant with this many distinct tokens.
    JaccardConst(usize),
}

impl DomainSet {
    pub(crate) fn of(d: DistanceFn, left: &Operand, right: &Operand) -> DomainSet {
        if left == right {
            return DomainSet::Points(vec![0.0]);
        }
        let constant = match (left, right) {
            (Operand::Const(c), _) | (_, Operand::Const(c)) => Some(c),
            _ => None,
        };
        match d {
            DistanceFn::AbsDiff => match constant {
                Some(c) if !c.is_numeric() => DomainSet::Empty,
                _ => DomainSet::Reals(0.0, f64::INFINITY),
            },
            DistanceFn::Edit => match constant {
                Some(c) if c.as_text().is_none() => DomainSet::Empty,
                _ => DomainSet::Naturals,
            },
            DistanceFn::Jaccard => match constant {
                Some(Value::Text(s)) => DomainSet::JaccardConst(jaccard_tokens(s).len()),
                Some(_) => DomainSet::Empty,
                None => DomainSet::Reals(0.0, 1.0),
            },
            DistanceFn::Eq => DomainSet::Points(vec![0.0, 1.0]),
        }
    }

    /// Whether some attainable distance lies in `i`.
    pub fn meets(&self, i: &Interval) -> bool {
        match self {
            DomainSet::Empty => false,
            DomainSet::Reals(lo, hi) => !i.intersect(&Interval::from_seg(*lo, true, *hi, true)).is_empty(),
            DomainSet::Naturals => i.intersect(&Interval::non_negative()).contains_integer(),
            DomainSet::Points(ps) => ps.iter().any(|p| i.contains(*p)),
            DomainSet::JaccardConst(n) => jaccard_meets(*n, i),
        }
    }

    /// Whether every attainable distance in `a` also lies in `b`.
    pub fn within(&self, a: &Interval, b: &Interval) -> bool {
        !self.meets(&a.intersect(&b.complement()))
    }
}

fn jaccard_meets(n: usize, i: &Interval) -> bool {
    if i.contains(1.0) || (n == 0 && i.contains(0.0)) {
        return true;
    }
    if n == 0 {
        return false;
    }
    let below = i.intersect(&Interval::from_seg(0.0, true, 1.0, false));
    let Some((_, hi)) = below.bounds() else {
        return false;
    };
    if hi >= 1.0 {
        return true;
    }
    // k shared tokens out of a union of m: distance 1 - k/m with k <= n <= m.
    let max_m = (n as f64 / (1.0 - hi)).floor() as usize;
    let mut budget = JACCARD_LIMIT;
    for m in n..=max_m {
        for k in 1..=n {
            if below.contains(1.0 - k as f64 / m as f64) {
                return true;
            }
            budget -= 1;
            if budget == 0 {
                return true;
            }
        }
    }
    false
}

/// Union-find over identity constraints plus the merged triple intervals.
pub(crate) struct Analysis {
    rep: BTreeMap<String, String>,
    pub triples: BTreeMap<Triple, Interval>,
}

impl Analysis {
    /// `None` when identity constraints contradict each other.
    pub fn new(cs: &[Constraint]) -> Option<Analysis> {
        let mut parent: BTreeMap<String, String> = BTreeMap::new();
        fn find(p: &mut BTreeMap<String, String>, x: &str) -> String {
            let mut cur = x.to_string();
            while let Some(next) = p.get(&cur).filter(|n| **n != cur).cloned() {
                cur = next;
            }
            cur
        }
        for c in cs {
            for v in c.vars() {
                parent.entry(v.to_string()).or_insert_with(|| v.to_string());
            }
            if let Constraint::IdentEq(a, b) = c {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                    parent.insert(hi, lo);
                }
            }
        }
        let vars: Vec<String> = parent.keys().cloned().collect();
        let rep: BTreeMap<String, String> = vars.iter().map(|v| (v.clone(), find(&mut parent, v))).collect();
        let canon = |v: &str| rep.get(v).cloned().unwrap_or_else(|| v.to_string());
        for c in cs {
            if let Constraint::IdentNeq(a, b) = c {
                if canon(a) == canon(b) {
                    return None;
                }
            }
        }
        let mut triples: BTreeMap<Triple, Interval> = BTreeMap::new();
        for c in cs {
            let c = c.rename(&canon);
            if let Some(key) = triple_of(&c) {
                let i = c.interval().expect("distance constraint");
                triples
                    .entry(key)
                    .and_modify(|cur| *cur = cur.intersect(&i))
                    .or_insert(i);
            }
        }
        Some(Analysis { rep, triples })
    }

    pub fn canon(&self, v: &str) -> String {
        self.rep.get(v).cloned().unwrap_or_else(|| v.to_string())
    }

    pub fn canon_attr(&self, a: &AttrRef) -> AttrRef {
        AttrRef {
            var: self.canon(&a.var),
            key: a.key.clone(),
        }
    }
}

/// The triple of an already canonicalized distance constraint.
pub(crate) fn triple_of(c: &Constraint) -> Option<Triple> {
    match c {
        Constraint::ConstVsAttr {
            distance,
            attr,
            constant,
            ..
        } => Some((*distance, Operand::Attr(attr.clone()), Operand::Const(constant.clone()))),
        Constraint::AttrVsAttr {
            distance, left, right, ..
        } => {
            let (a, b) = (Operand::Attr(left.clone()), Operand::Attr(right.clone()));
            Some(if a <= b { (*distance, a, b) } else { (*distance, b, a) })
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum KindReq {
    Numeric,
    Text,
}

pub(crate) fn kind_req(d: DistanceFn) -> Option<KindReq> {
    match d {
        DistanceFn::AbsDiff => Some(KindReq::Numeric),
        DistanceFn::Edit | DistanceFn::Jaccard => Some(KindReq::Text),
        DistanceFn::Eq => None,
    }
}

fn kind_ok(req: KindReq, v: &Value) -> bool {
    match req {
        KindReq::Numeric => v.is_numeric(),
        KindReq::Text => v.as_text().is_some(),
    }
}

/// Constant comparisons of one attribute: `(distance, constant, interval)`.
type ConstCmps<'a> = Vec<(DistanceFn, &'a Value, &'a Interval)>;

/// Whether some assignment of values to all attribute terms satisfies every
/// constraint, with identities resolved first.
pub fn feasible(cs: &[Constraint]) -> bool {
    let Some(an) = Analysis::new(cs) else {
        return false;
    };
    let mut reqs: BTreeMap<&AttrRef, BTreeSet<KindReq>> = BTreeMap::new();
    let mut consts: BTreeMap<&AttrRef, ConstCmps<'_>> = BTreeMap::new();
    for ((d, l, r), i) in &an.triples {
        if !DomainSet::of(*d, l, r).meets(i) {
            return false;
        }
        for op in [l, r] {
            if let Operand::Attr(a) = op {
                let e = reqs.entry(a).or_default();
                e.extend(kind_req(*d));
            }
        }
        if let (Operand::Attr(a), Operand::Const(c)) = (l, r) {
            consts.entry(a).or_default().push((*d, c, i));
        }
    }
    for (attr, req) in &reqs {
        if req.len() > 1 {
            return false;
        }
        let req = req.iter().next().copied();
        let cmps = consts.get(attr).map(Vec::as_slice).unwrap_or(&[]);
        if !attribute_feasible(req, cmps) {
            return false;
        }
    }
    true
}

fn holds(d: DistanceFn, v: &Value, c: &Value, i: &Interval) -> bool {
    distance(d, v, c).map(|x| i.contains(x)).unwrap_or(false)
}

fn attribute_feasible(req: Option<KindReq>, cmps: &[(DistanceFn, &Value, &Interval)]) -> bool {
    let pins: Vec<&Value> = cmps
        .iter()
        .filter(|(d, _, i)| *d == DistanceFn::Eq && i.contains(0.0) && !i.contains(1.0))
        .map(|(_, c, _)| *c)
        .collect();
    if let Some(p) = pins.first() {
        if req.is_some_and(|r| !kind_ok(r, p)) {
            return false;
        }
        return cmps.iter().all(|(d, c, i)| holds(*d, p, c, i));
    }
    match req {
        Some(KindReq::Numeric) => {
            let mut v = Interval::all();
            for (d, c, i) in cmps {
                if *d == DistanceFn::AbsDiff {
                    v = v.intersect(&i.absdiff_preimage(c.as_f64().expect("numeric constant")));
                }
            }
            !v.is_empty()
        }
        Some(KindReq::Text) => text_feasible(cmps),
        None => true,
    }
}

fn text_feasible(cmps: &[(DistanceFn, &Value, &Interval)]) -> bool {
    let bounded = cmps
        .iter()
        .filter(|(d, _, _)| *d == DistanceFn::Edit)
        .filter_map(|(_, c, i)| {
            let (_, hi) = i.intersect(&Interval::non_negative()).bounds()?;
            hi.is_finite().then(|| (hi.floor() as usize, c.as_text().unwrap()))
        })
        .min();
    let Some((radius, center)) = bounded else {
        // Long strings of a foreign character reach every lower bound.
        return true;
    };
    let mut alphabet: BTreeSet<char> = cmps
        .iter()
        .filter_map(|(_, c, _)| c.as_text())
        .flat_map(str::chars)
        .collect();
    let fresh = ['#', '%', '~', '¤', '§']
        .into_iter()
        .find(|c| !alphabet.contains(c))
        .unwrap_or('\u{FFFD}');
    alphabet.insert(fresh);
    let Some(ball) = edit_ball(center, radius, &alphabet) else {
        return true;
    };
    let mut partial = false;
    for s in &ball {
        let v = Value::text(s.clone());
        let core_ok = cmps
            .iter()
            .filter(|(d, _, _)| *d != DistanceFn::Jaccard)
            .all(|(d, c, i)| holds(*d, &v, c, i));
        if core_ok {
            if cmps.iter().all(|(d, c, i)| holds(*d, &v, c, i)) {
                return true;
            }
            partial = true;
        }
    }
    // Jaccard is not closed under the foreign-character collapse, so a
    // failed search is inconclusive when it is involved.
    partial
}

/// All strings within `radius` edits of `center` over `alphabet`, or `None`
/// past the size limit.
pub(crate) fn edit_ball(center: &str, radius: usize, alphabet: &BTreeSet<char>) -> Option<Vec<String>> {
    let mut seen: HashSet<Vec<char>> = HashSet::new();
    let start: Vec<char> = center.chars().collect();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    for _ in 0..radius {
        let mut next = Vec::new();
        for s in &frontier {
            let mut push = |t: Vec<char>| {
                if seen.insert(t.clone()) {
                    next.push(t);
                }
            };
            for pos in 0..=s.len() {
                for &ch in alphabet {
                    let mut t = s.clone();
                    t.insert(pos, ch);
                    push(t);
                }
                if pos < s.len() {
                    let mut t = s.clone();
                    t.remove(pos);
                    push(t);
                    for &ch in alphabet {
                        if ch != s[pos] {
                            let mut t = s.clone();
                            t[pos] = ch;
                            push(t);
                        }
                    }
                }
            }
            if seen.len() > BALL_LIMIT {
                return None;
            }
        }
        frontier = next;
    }
    let mut out: Vec<String> = seen.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::CmpOp;

    fn abs(var: &str, c: i64, op: CmpOp, t: f64) -> Constraint {
        Constraint::const_attr(DistanceFn::AbsDiff, var, "A", Value::Integer(c), op, t)
    }

    #[test]
    fn hours_pair_is_infeasible() {
        assert!(!feasible(&[abs("s", 10, CmpOp::Gt, 5.0), abs("s", 10, CmpOp::Lt, 5.0)]));
        assert!(feasible(&[abs("s", 10, CmpOp::Gt, 5.0), abs("s", 10, CmpOp::Lt, 6.0)]));
        assert!(feasible(&[]));
    }

    #[test]
    fn separate_comparands_on_one_line() {
        assert!(!feasible(&[abs("x", 0, CmpOp::Le, 1.0), abs("x", 10, CmpOp::Le, 1.0)]));
        assert!(feasible(&[abs("x", 0, CmpOp::Le, 5.0), abs("x", 10, CmpOp::Le, 5.0)]));
    }

    #[test]
    fn identities() {
        let eq = Constraint::IdentEq("a".into(), "b".into());
        let eq2 = Constraint::IdentEq("b".into(), "c".into());
        let ne = Constraint::IdentNeq("c".into(), "a".into());
        assert!(feasible(&[eq.clone(), eq2.clone()]));
        assert!(!feasible(&[eq, eq2, ne]));
        let self_cmp = Constraint::attr_attr(DistanceFn::Edit, ("a", "n"), ("b", "n"), CmpOp::Gt, 0.0);
        assert!(feasible(&[self_cmp.clone()]));
        assert!(!feasible(&[self_cmp, Constraint::IdentEq("a".into(), "b".into())]));
    }

    #[test]
    fn domains() {
        let e = |op, t| Constraint::const_attr(DistanceFn::Edit, "x", "n", Value::text("abc"), op, t);
        assert!(!feasible(&[e(CmpOp::Gt, 1.0), e(CmpOp::Lt, 2.0)]));
        assert!(feasible(&[e(CmpOp::Gt, 1.0), e(CmpOp::Le, 2.0)]));
        let j = |op, t| Constraint::const_attr(DistanceFn::Jaccard, "x", "n", Value::text("a b"), op, t);
        assert!(!feasible(&[j(CmpOp::Gt, 0.0), j(CmpOp::Lt, 0.3)]));
        assert!(feasible(&[j(CmpOp::Gt, 0.0), j(CmpOp::Lt, 0.34)]));
        assert!(feasible(&[j(CmpOp::Gt, 0.0), j(CmpOp::Le, 0.5)]));
        let mismatch = Constraint::const_attr(DistanceFn::AbsDiff, "x", "n", Value::text("a"), CmpOp::Ge, 0.0);
        assert!(!feasible(&[mismatch]));
        let kinds = [
            Constraint::const_attr(DistanceFn::AbsDiff, "x", "n", Value::Integer(1), CmpOp::Ge, 0.0),
            e(CmpOp::Ge, 0.0),
        ];
        assert!(!feasible(&kinds));
    }

    #[test]
    fn full_time_disjoint() {
        let t = |op, th| Constraint::const_attr(DistanceFn::Edit, "b", "type", Value::text("full-time"), op, th);
        assert!(!feasible(&[t(CmpOp::Eq, 0.0), t(CmpOp::Gt, 1.0)]));
    }

    #[test]
    fn text_with_two_centres() {
        let e = |c: &str, op, t| Constraint::const_attr(DistanceFn::Edit, "x", "n", Value::text(c), op, t);
        assert!(!feasible(&[e("aa", CmpOp::Eq, 0.0), e("bb", CmpOp::Eq, 0.0)]));
        assert!(feasible(&[e("aa", CmpOp::Le, 1.0), e("bb", CmpOp::Le, 1.0)]));
        assert!(!feasible(&[e("aaa", CmpOp::Le, 1.0), e("bbb", CmpOp::Le, 1.0)]));
    }
}
