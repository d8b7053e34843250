//! The GGD chase.
//!
//! Objects carry range classes instead of fixed values: each attribute holds
//! the constraints it must satisfy. A step takes a source match of some GGD
//! and either confirms that a target extension already satisfies `φ_t`,
//! folds `φ_t` onto an existing extension, or generates the missing target
//! objects. Identity constraints in `φ_t` merge objects through a union-find
//! and the matcher then runs on the quotient graph.

mod extract;
mod rcq;

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::graph::{GraphBuilder, ObjRef, ObjectKind, PropertyGraph, Value, GEN_BY_KEY};
use crate::lang::{distance, entails, feasible, AttrRef, Constraint, Ggd, GgdSet, GraphPattern, Label};
use crate::matcher::{extend_match, match_pattern, plan_pattern, Match, PlanOptions};

pub use self::extract::extract_model;
pub use self::rcq::{Comparand, RangeClass, Rcq, Role};

pub const DEFAULT_CAP: usize = 10_000;

/// Attribute systems larger than this are checked only partially.
const SYSTEM_LIMIT: usize = 512;

/// When a GGD fires on a source match whose attributes are not fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FireMode {
    /// Whenever the range classes admit values satisfying `φ_s`. A target
    /// extension that admits `φ_t` receives it.
    #[default]
    Compatible,
    /// Only when the range classes force `φ_s`. Missing targets are always
    /// generated fresh.
    Entailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaseConfig {
    pub cap: usize,
    pub mode: FireMode,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            cap: DEFAULT_CAP,
            mode: FireMode::Compatible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub ggd: String,
    pub binding: Match,
    pub action: String,
    pub consistency: String,
}

impl fmt::Display for StepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binding: Vec<String> = self.binding.iter().map(|(v, id)| format!("{v}={id}")).collect();
        write!(
            f,
            "{}; {}; {}; {}; {}",
            self.step,
            self.ggd,
            binding.join(","),
            self.action,
            self.consistency
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChaseVerdict {
    TerminatedValid,
    /// The given step left the state inconsistent.
    Inconsistent {
        step: usize,
        reason: String,
    },
    StepCapExceeded,
}

#[derive(Debug, Clone)]
pub struct ChaseOutcome {
    pub verdict: ChaseVerdict,
    pub state: ChaseState,
}

/// What a single step did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub changed: bool,
    pub action: String,
    pub error: Option<String>,
    /// Representatives bound by the step, including generated objects.
    pub touched: Vec<ObjRef>,
}

impl StepOutcome {
    fn unchanged() -> StepOutcome {
        StepOutcome {
            changed: false,
            action: "none".into(),
            error: None,
            touched: Vec::new(),
        }
    }
}

/// A constraint after substituting known values.
enum Inst {
    Holds(bool),
    Open(Constraint),
}

enum Term {
    Value(Value),
    Missing,
    Free,
}

#[derive(PartialEq, Eq)]
enum Status {
    Entailed,
    Compatible,
    Neither,
}

type Bind = BTreeMap<String, ObjRef>;

#[derive(Debug, Clone)]
pub struct ChaseState {
    graph: PropertyGraph,
    parent: Vec<ObjRef>,
    classes: BTreeMap<ObjRef, RangeClass>,
    neq: BTreeSet<(ObjRef, ObjRef)>,
    merged: bool,
    merges: usize,
    steps: usize,
    log: Vec<StepRecord>,
}

/// A chase state over a data graph: every stored value is fixed.
pub fn init_chase(g: PropertyGraph) -> ChaseState {
    ChaseState::new(g, true)
}

impl ChaseState {
    /// With `concrete`, stored property values become fixed and absent
    /// properties stay absent. Otherwise every attribute starts unknown.
    pub fn new(graph: PropertyGraph, concrete: bool) -> ChaseState {
        let n = graph.object_count();
        let mut classes = BTreeMap::new();
        for r in 0..n {
            let obj = graph.obj(r);
            let mut class = RangeClass::new(&obj.id, concrete);
            if concrete {
                for (k, v) in &obj.properties {
                    if obj.visible_property(k).is_some() {
                        class.attrs.insert(k.clone(), vec![Rcq::own(v.clone())]);
                    }
                }
            }
            classes.insert(r, class);
        }
        ChaseState {
            graph,
            parent: (0..n).collect(),
            classes,
            neq: BTreeSet::new(),
            merged: false,
            merges: 0,
            steps: 0,
            log: Vec::new(),
        }
    }

    /// The underlying graph, including generated objects, before merging.
    pub fn graph(&self) -> &PropertyGraph {
        &self.graph
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn log(&self) -> &[StepRecord] {
        &self.log
    }

    pub fn rep(&self, r: ObjRef) -> ObjRef {
        self.parent[r]
    }

    /// Id of the representative of `id`'s class.
    pub fn rep_id(&self, id: &str) -> Option<&str> {
        self.graph.lookup(id).map(|r| self.graph.id(self.rep(r)))
    }

    pub fn class(&self, id: &str) -> Option<&RangeClass> {
        self.graph.lookup(id).and_then(|r| self.classes.get(&self.rep(r)))
    }

    /// Representatives with their classes, in arena order.
    pub fn classes(&self) -> impl Iterator<Item = (ObjRef, &RangeClass)> {
        self.classes.iter().map(|(r, c)| (*r, c))
    }

    pub fn has_merges(&self) -> bool {
        self.merged
    }

    /// Labels of every member of `rep`'s class.
    fn class_labels(&self, rep: ObjRef) -> BTreeSet<String> {
        self.classes[&rep]
            .members
            .iter()
            .filter_map(|m| self.graph.get(m))
            .flat_map(|o| o.labels.iter().cloned())
            .collect()
    }

    /// The graph with every class collapsed onto its representative.
    pub fn quotient(&self) -> PropertyGraph {
        let mut b = GraphBuilder::new();
        for (&r, _) in &self.classes {
            let obj = self.graph.obj(r);
            let labels = self.class_labels(r);
            match self.graph.ends(r) {
                None => {
                    b.vertex(obj.id.clone(), labels, obj.properties.clone());
                }
                Some((s, t)) => {
                    let (s, t) = (self.graph.id(self.rep(s)), self.graph.id(self.rep(t)));
                    b.edge(obj.id.clone(), s, t, labels, obj.properties.clone());
                }
            }
        }
        b.build().expect("quotient of a valid graph")
    }

    fn view(&self) -> Cow<'_, PropertyGraph> {
        if self.merged {
            Cow::Owned(self.quotient())
        } else {
            Cow::Borrowed(&self.graph)
        }
    }

    fn attr(&self, rep: ObjRef, key: &str) -> AttrRef {
        AttrRef::new(self.graph.id(rep), key)
    }

    fn rep_of(&self, id: &str) -> Option<ObjRef> {
        self.graph.lookup(id).map(|r| self.rep(r))
    }

    fn term(&self, rep: ObjRef, key: &str) -> Term {
        let class = &self.classes[&rep];
        match class.own_values(key).first() {
            Some(v) => Term::Value((*v).clone()),
            None if class.concrete => Term::Missing,
            None => Term::Free,
        }
    }

    /// Substitutes fixed values into `c`, whose variables resolve through
    /// `bind`. Attributes left open are named by representative id.
    fn instantiate(&self, c: &Constraint, bind: &Bind) -> Inst {
        let rep = |v: &str| self.rep(bind[v]);
        let cmp = |d, a: &Value, b: &Value, op: crate::lang::CmpOp, t| {
            Inst::Holds(distance(d, a, b).is_ok_and(|x| op.holds(x, t)))
        };
        match c {
            Constraint::IdentEq(a, b) => Inst::Holds(rep(a) == rep(b)),
            Constraint::IdentNeq(a, b) => Inst::Holds(rep(a) != rep(b)),
            Constraint::ConstVsAttr {
                distance: d,
                attr,
                constant,
                op,
                threshold,
            } => {
                let r = rep(&attr.var);
                match self.term(r, &attr.key) {
                    Term::Value(v) => cmp(*d, &v, constant, *op, *threshold),
                    Term::Missing => Inst::Holds(false),
                    Term::Free => Inst::Open(Constraint::ConstVsAttr {
                        distance: *d,
                        attr: self.attr(r, &attr.key),
                        constant: constant.clone(),
                        op: *op,
                        threshold: *threshold,
                    }),
                }
            }
            Constraint::AttrVsAttr {
                distance: d,
                left,
                right,
                op,
                threshold,
            } => {
                let (rl, rr) = (rep(&left.var), rep(&right.var));
                let (al, ar) = (self.attr(rl, &left.key), self.attr(rr, &right.key));
                match (self.term(rl, &left.key), self.term(rr, &right.key)) {
                    (Term::Missing, _) | (_, Term::Missing) => Inst::Holds(false),
                    (Term::Value(a), Term::Value(b)) => cmp(*d, &a, &b, *op, *threshold),
                    (Term::Value(v), Term::Free) | (Term::Free, Term::Value(v)) => {
                        let free = if matches!(self.term(rl, &left.key), Term::Free) {
                            al
                        } else {
                            ar
                        };
                        Inst::Open(Constraint::ConstVsAttr {
                            distance: *d,
                            attr: free,
                            constant: v,
                            op: *op,
                            threshold: *threshold,
                        })
                    }
                    (Term::Free, Term::Free) => Inst::Open(Constraint::AttrVsAttr {
                        distance: *d,
                        left: al,
                        right: ar,
                        op: *op,
                        threshold: *threshold,
                    }),
                }
            }
        }
    }

    /// Target obligations on the attributes reachable from `seeds` through
    /// attribute comparands, with fixed values substituted. `None` when a
    /// fixed value already violates one of them.
    fn system(&self, seeds: &[AttrRef]) -> Option<Vec<Constraint>> {
        let mut out = Vec::new();
        let mut seen: BTreeSet<AttrRef> = BTreeSet::new();
        let mut queue: Vec<AttrRef> = seeds.to_vec();
        while let Some(a) = queue.pop() {
            if seen.len() >= SYSTEM_LIMIT || !seen.insert(a.clone()) {
                continue;
            }
            let Some(r) = self.rep_of(&a.var) else { continue };
            let subject = self.attr(r, &a.key);
            let here = self.term(r, &a.key);
            for q in self.classes[&r].rcqs(&a.key).iter().filter(|q| q.role == Role::Target) {
                let c = q.to_constraint(&subject);
                let c = match (&here, &q.val) {
                    (Term::Missing, _) => return None,
                    (Term::Free, Comparand::Const(_)) => c,
                    (Term::Value(v), Comparand::Const(k)) => {
                        let d = q.distance.expect("target obligation has a distance");
                        if !distance(d, v, k).is_ok_and(|x| q.op.holds(x, q.threshold)) {
                            return None;
                        }
                        continue;
                    }
                    (_, Comparand::Attr { object, key }) => {
                        let Some(r2) = self.rep_of(object) else { return None };
                        let other = self.attr(r2, key);
                        let mut bind = Bind::new();
                        bind.insert(subject.var.clone(), r);
                        bind.insert(other.var.clone(), r2);
                        match self.instantiate(
                            &c.rename(&|v| if v == object { other.var.clone() } else { v.to_string() }),
                            &bind,
                        ) {
                            Inst::Holds(true) => continue,
                            Inst::Holds(false) => return None,
                            Inst::Open(c) => {
                                if matches!(self.term(r2, key), Term::Free) {
                                    queue.push(other);
                                }
                                c
                            }
                        }
                    }
                };
                out.push(c);
            }
        }
        Some(out)
    }

    fn attrs_of(c: &Constraint) -> Vec<AttrRef> {
        match c {
            Constraint::ConstVsAttr { attr, .. } => vec![attr.clone()],
            Constraint::AttrVsAttr { left, right, .. } => vec![left.clone(), right.clone()],
            _ => Vec::new(),
        }
    }

    fn compatible(&self, opens: &[Constraint]) -> bool {
        let seeds: Vec<AttrRef> = opens.iter().flat_map(Self::attrs_of).collect();
        match self.system(&seeds) {
            Some(mut sys) => {
                sys.extend(opens.iter().cloned());
                feasible(&sys)
            }
            None => false,
        }
    }

    fn entailed(&self, c: &Constraint) -> bool {
        match self.system(&Self::attrs_of(c)) {
            Some(sys) => entails(&sys, c),
            None => true,
        }
    }

    fn fires(&self, ggd: &Ggd, bind: &Bind, mode: FireMode) -> bool {
        let mut opens = Vec::new();
        for c in &ggd.source_constraints {
            match self.instantiate(c, bind) {
                Inst::Holds(false) => return false,
                Inst::Holds(true) => {}
                Inst::Open(c) => opens.push(c),
            }
        }
        match mode {
            FireMode::Compatible => opens.is_empty() || self.compatible(&opens),
            FireMode::Entailed => opens.iter().all(|c| self.entailed(c)),
        }
    }

    fn in_neq(&self, a: ObjRef, b: ObjRef) -> bool {
        self.neq.iter().any(|&(x, y)| {
            let (x, y) = (self.rep(x), self.rep(y));
            (x, y) == (a, b) || (y, x) == (a, b)
        })
    }

    fn mergeable(&self, a: ObjRef, b: ObjRef) -> bool {
        self.merge_conflict(a, b).is_none()
    }

    fn merge_conflict(&self, a: ObjRef, b: ObjRef) -> Option<String> {
        let (ia, ib) = (self.graph.id(a), self.graph.id(b));
        if self.graph.obj(a).kind != self.graph.obj(b).kind {
            return Some(format!("cannot identify vertex and edge `{ia}`, `{ib}`"));
        }
        let (la, lb) = (self.class_labels(a), self.class_labels(b));
        if !la.is_empty() && !lb.is_empty() && la.is_disjoint(&lb) {
            return Some(format!("label conflict between `{ia}` {la:?} and `{ib}` {lb:?}"));
        }
        if self.in_neq(a, b) {
            return Some(format!("`{ia}` and `{ib}` must differ"));
        }
        let (ca, cb) = (&self.classes[&a], &self.classes[&b]);
        for key in ca.attrs.keys() {
            let (va, vb) = (ca.own_values(key), cb.own_values(key));
            if let (Some(x), Some(y)) = (va.first(), vb.first()) {
                if x != y {
                    return Some(format!("value conflict on `{key}` between `{ia}` and `{ib}`"));
                }
            }
        }
        None
    }

    /// Unions the classes of `a` and `b`; edges also unify their endpoints.
    fn merge(&mut self, a: ObjRef, b: ObjRef, touched: &mut Vec<AttrRef>) -> Result<bool, String> {
        let (ra, rb) = (self.rep(a), self.rep(b));
        if ra == rb {
            return Ok(false);
        }
        if let Some(why) = self.merge_conflict(ra, rb) {
            return Err(why);
        }
        let (keep, gone) = if self.graph.id(ra) < self.graph.id(rb) {
            (ra, rb)
        } else {
            (rb, ra)
        };
        let absorbed = self.classes.remove(&gone).expect("class of a representative");
        for m in &absorbed.members {
            let r = self.graph.lookup(m).expect("member id");
            self.parent[r] = keep;
        }
        let class = self.classes.get_mut(&keep).expect("class of a representative");
        class.absorb(absorbed);
        let keys: Vec<String> = class.attrs.keys().cloned().collect();
        touched.extend(keys.iter().map(|k| self.attr(keep, k)));
        self.merged = true;
        self.merges += 1;
        if let (Some((s1, t1)), Some((s2, t2))) = (self.graph.ends(ra), self.graph.ends(rb)) {
            self.merge(s1, s2, touched)?;
            self.merge(t1, t2, touched)?;
        }
        Ok(true)
    }

    /// Rejects the state if any touched attribute has no admissible value.
    fn check(&self, touched: &[AttrRef]) -> Result<(), String> {
        if touched.is_empty() {
            return Ok(());
        }
        match self.system(touched) {
            Some(sys) if feasible(&sys) => Ok(()),
            _ => {
                let names: BTreeSet<String> = touched.iter().map(|a| format!("{}.{}", a.var, a.key)).collect();
                Err(format!(
                    "no admissible value for {}",
                    names.into_iter().collect::<Vec<_>>().join(", ")
                ))
            }
        }
    }

    fn status(&self, ggd: &Ggd, bind: &Bind) -> Status {
        let mut opens = Vec::new();
        let mut entailed = true;
        let mut compatible = true;
        for c in &ggd.target_constraints {
            match c {
                Constraint::IdentEq(a, b) => {
                    let (ra, rb) = (self.rep(bind[a]), self.rep(bind[b]));
                    if ra != rb {
                        entailed = false;
                        compatible &= self.mergeable(ra, rb);
                    }
                }
                Constraint::IdentNeq(a, b) => {
                    let (ra, rb) = (self.rep(bind[a]), self.rep(bind[b]));
                    if ra == rb {
                        return Status::Neither;
                    }
                    entailed &= self.in_neq(ra, rb);
                }
                _ => match self.instantiate(c, bind) {
                    Inst::Holds(true) => {}
                    Inst::Holds(false) => return Status::Neither,
                    Inst::Open(c) => {
                        entailed &= self.entailed(&c);
                        opens.push(c);
                    }
                },
            }
        }
        if entailed {
            Status::Entailed
        } else if compatible && (opens.is_empty() || self.compatible(&opens)) {
            Status::Compatible
        } else {
            Status::Neither
        }
    }

    fn rcqs_of(c: &Constraint, role: Role) -> Vec<(AttrRef, Rcq)> {
        let (d, op, t) = c.distance_parts().expect("distance constraint");
        let mk = |val| Rcq {
            distance: Some(d),
            val,
            threshold: t,
            op,
            role,
        };
        match c {
            Constraint::ConstVsAttr { attr, constant, .. } => {
                vec![(attr.clone(), mk(Comparand::Const(constant.clone())))]
            }
            Constraint::AttrVsAttr { left, right, .. } => vec![
                (
                    left.clone(),
                    mk(Comparand::Attr {
                        object: right.var.clone(),
                        key: right.key.clone(),
                    }),
                ),
                (
                    right.clone(),
                    mk(Comparand::Attr {
                        object: left.var.clone(),
                        key: left.key.clone(),
                    }),
                ),
            ],
            _ => Vec::new(),
        }
    }

    fn class_mut(&mut self, a: &AttrRef) -> &mut RangeClass {
        let r = self.rep_of(&a.var).expect("attribute of a known object");
        self.classes.get_mut(&r).expect("class of a representative")
    }

    /// Imposes `cs` (variables named by object id) as target obligations.
    pub fn assume(&mut self, cs: &[Constraint]) -> Result<(), String> {
        let mut bind = Bind::new();
        for c in cs {
            for v in c.vars() {
                let r = self.graph.lookup(v).ok_or_else(|| format!("unknown object `{v}`"))?;
                bind.insert(v.to_string(), r);
            }
        }
        let mut touched = Vec::new();
        self.impose(cs, &bind, &mut touched)?;
        self.check(&touched)
    }

    /// Folds `φ_t` under `bind`. Returns whether the state changed.
    fn impose(&mut self, cs: &[Constraint], bind: &Bind, touched: &mut Vec<AttrRef>) -> Result<bool, String> {
        let mut changed = false;
        for c in cs {
            match c {
                Constraint::IdentEq(a, b) => changed |= self.merge(bind[a], bind[b], touched)?,
                Constraint::IdentNeq(a, b) => {
                    let (ra, rb) = (self.rep(bind[a]), self.rep(bind[b]));
                    if ra == rb {
                        return Err(format!("`{}` must differ from itself", self.graph.id(ra)));
                    }
                    if !self.in_neq(ra, rb) {
                        self.neq.insert((ra.min(rb), ra.max(rb)));
                        changed = true;
                    }
                }
                _ => match self.instantiate(c, bind) {
                    Inst::Holds(true) => {}
                    Inst::Holds(false) => return Err(format!("`{c}` fails on stored values")),
                    Inst::Open(open) => {
                        if self.entailed(&open) {
                            continue;
                        }
                        for (a, q) in Self::rcqs_of(&open, Role::Target) {
                            self.class_mut(&a).fold_target(&a.key, q);
                            touched.push(a);
                        }
                        changed = true;
                    }
                },
            }
        }
        Ok(changed)
    }

    fn fold_source(&mut self, ggd: &Ggd, bind: &Bind) -> bool {
        let mut changed = false;
        for c in &ggd.source_constraints {
            if let Inst::Open(open) = self.instantiate(c, bind) {
                for (a, q) in Self::rcqs_of(&open, Role::Source) {
                    changed |= self.class_mut(&a).fold_source(&a.key, q);
                }
            }
        }
        changed
    }

    fn generate(&mut self, ggd: &Ggd, bind: &mut Bind) -> Vec<String> {
        let mut made = Vec::new();
        let stamp = || BTreeMap::from([(GEN_BY_KEY.to_string(), Value::text(&ggd.name))]);
        let label_set = |l: &Label| match l {
            Label::Named(n) => BTreeSet::from([n.clone()]),
            Label::Wildcard => BTreeSet::new(),
        };
        for v in &ggd.target.vertices {
            if !bind.contains_key(&v.var) {
                let id = self
                    .graph
                    .create_object(ObjectKind::Vertex, label_set(&v.label), stamp(), None)
                    .expect("vertex creation");
                bind.insert(v.var.clone(), self.register(&id));
                made.push(id);
            }
        }
        for e in &ggd.target.edges {
            if !bind.contains_key(&e.var) {
                let s = self.graph.id(self.rep(bind[&e.from])).to_string();
                let t = self.graph.id(self.rep(bind[&e.to])).to_string();
                let id = self
                    .graph
                    .create_object(ObjectKind::Edge, label_set(&e.label), stamp(), Some((&s, &t)))
                    .expect("edge creation");
                bind.insert(e.var.clone(), self.register(&id));
                made.push(id);
            }
        }
        made
    }

    fn register(&mut self, id: &str) -> ObjRef {
        let r = self.graph.lookup(id).expect("new object");
        debug_assert_eq!(r, self.parent.len());
        self.parent.push(r);
        self.classes.insert(r, RangeClass::new(id, false));
        r
    }

    fn bind(&self, h: &Match) -> Option<Bind> {
        h.iter()
            .map(|(v, id)| self.rep_of(id).map(|r| (v.clone(), r)))
            .collect()
    }
}

/// Source matches (by representative id) on which `ggd` fires.
pub fn chase_match_source(state: &ChaseState, ggd: &Ggd, mode: FireMode) -> Vec<Match> {
    let view = state.view();
    match_pattern(&view, &ggd.source, &[])
        .matches
        .into_iter()
        .filter(|m| state.bind(m).is_some_and(|b| state.fires(ggd, &b, mode)))
        .collect()
}

/// One chase step of `ggd` on the source match `h`. The step counter and log
/// are left to the caller.
pub fn apply_step(state: &mut ChaseState, ggd: &Ggd, h: &Match, mode: FireMode) -> StepOutcome {
    let Some(mut bind) = state.bind(h) else {
        return StepOutcome::unchanged();
    };
    if !state.fires(ggd, &bind, mode) {
        return StepOutcome::unchanged();
    }
    let source_changed = state.fold_source(ggd, &bind);
    let mut candidate = None;
    {
        let view = state.view();
        let hs: Match = bind
            .iter()
            .map(|(v, &r)| (v.clone(), state.graph.id(state.rep(r)).to_string()))
            .collect();
        for ext in extend_match(&view, ggd, &hs, false).iter() {
            let mut full = bind.clone();
            for (v, id) in ext {
                full.insert(v.clone(), state.graph.lookup(id).expect("quotient id"));
            }
            match state.status(ggd, &full) {
                Status::Entailed => {
                    return StepOutcome {
                        touched: bind.values().map(|&r| state.rep(r)).collect(),
                        changed: source_changed,
                        action: if source_changed {
                            "update source".into()
                        } else {
                            "none".into()
                        },
                        error: None,
                    };
                }
                Status::Compatible if candidate.is_none() && mode == FireMode::Compatible => candidate = Some(full),
                _ => {}
            }
        }
    }
    let mut touched = Vec::new();
    let (action, result, full) = match candidate {
        Some(full) => {
            let r = state.impose(&ggd.target_constraints, &full, &mut touched);
            ("update".to_string(), r, full)
        }
        None => {
            let made = state.generate(ggd, &mut bind);
            let r = state.impose(&ggd.target_constraints, &bind, &mut touched).map(|_| true);
            (format!("generate {}", made.join(",")), r, bind)
        }
    };
    let error = match result {
        Ok(_) => state.check(&touched).err(),
        Err(e) => Some(e),
    };
    StepOutcome {
        changed: true,
        action,
        error,
        touched: full.values().map(|&r| state.rep(r)).collect(),
    }
}

/// A source match on which a GGD may fire but is not forced to, and whose
/// target is not already entailed.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub ggd: String,
    pub binding: Match,
    /// `φ_s` with fixed values substituted; attributes named by
    /// representative id.
    pub open: Vec<Constraint>,
}

/// The first undecided firing, scanning GGDs in order.
pub fn pending_split(state: &ChaseState, sigma: &GgdSet) -> Option<Split> {
    for ggd in sigma {
        for h in chase_match_source(state, ggd, FireMode::Compatible) {
            let bind = state.bind(&h)?;
            if state.fires(ggd, &bind, FireMode::Entailed) || deducible(state, ggd, &h) {
                continue;
            }
            let open = ggd
                .source_constraints
                .iter()
                .filter_map(|c| match state.instantiate(c, &bind) {
                    Inst::Open(c) => Some(c),
                    Inst::Holds(_) => None,
                })
                .collect();
            return Some(Split {
                ggd: ggd.name.clone(),
                binding: h,
                open,
            });
        }
    }
    None
}

/// Whether some target extension of `h` has range classes entailing `φ_t`.
pub fn deducible(state: &ChaseState, ggd: &Ggd, h: &Match) -> bool {
    let Some(bind) = state.bind(h) else { return false };
    let view = state.view();
    let hs: Match = bind
        .iter()
        .map(|(v, &r)| (v.clone(), state.graph.id(r).to_string()))
        .collect();
    let exts = extend_match(&view, ggd, &hs, false);
    exts.iter().any(|ext| {
        let mut full = bind.clone();
        for (v, id) in ext {
            full.insert(v.clone(), state.graph.lookup(id).expect("quotient id"));
        }
        state.status(ggd, &full) == Status::Entailed
    })
}

/// Runs GGDs in order, pass after pass, until a pass changes nothing, the
/// state becomes inconsistent, or more than `cap` steps were taken.
///
/// After its first pass, a GGD is only matched around objects that steps
/// have touched since its previous batch. Any merge brings back a full
/// match.
pub fn run_chase(mut state: ChaseState, sigma: &GgdSet, cfg: ChaseConfig) -> ChaseOutcome {
    // Per GGD: the `touched` length and merge count when its batch was last taken.
    let mut seen: Vec<Option<(usize, usize)>> = vec![None; sigma.len()];
    let mut touched: Vec<String> = Vec::new();
    loop {
        let mut progressed = false;
        for (gi, ggd) in sigma.iter().enumerate() {
            let batch = {
                let view = state.view();
                match seen[gi] {
                    Some((pos, merges)) if merges == state.merges => delta_matches(&view, &ggd.source, &touched[pos..]),
                    _ => match_pattern(&view, &ggd.source, &[]).matches,
                }
            };
            seen[gi] = Some((touched.len(), state.merges));
            for h in batch {
                let out = apply_step(&mut state, ggd, &h, cfg.mode);
                if !out.changed {
                    continue;
                }
                touched.extend(out.touched.iter().map(|&r| state.graph.id(r).to_string()));
                touched.extend(h.values().cloned());
                progressed = true;
                state.steps += 1;
                let binding: Match = h
                    .iter()
                    .map(|(v, id)| (v.clone(), state.rep_id(id).unwrap_or(id).to_string()))
                    .collect();
                state.log.push(StepRecord {
                    step: state.steps,
                    ggd: ggd.name.clone(),
                    binding,
                    action: out.action,
                    consistency: match &out.error {
                        None => "consistent".into(),
                        Some(e) => format!("inconsistent: {e}"),
                    },
                });
                if let Some(reason) = out.error {
                    let step = state.steps;
                    return ChaseOutcome {
                        verdict: ChaseVerdict::Inconsistent { step, reason },
                        state,
                    };
                }
                if state.steps > cfg.cap {
                    return ChaseOutcome {
                        verdict: ChaseVerdict::StepCapExceeded,
                        state,
                    };
                }
            }
        }
        if !progressed {
            return ChaseOutcome {
                verdict: ChaseVerdict::TerminatedValid,
                state,
            };
        }
    }
}

/// Matches of `pattern` binding at least one of `ids`, in match order.
fn delta_matches(g: &PropertyGraph, pattern: &GraphPattern, ids: &[String]) -> Vec<Match> {
    let refs: BTreeSet<ObjRef> = ids.iter().filter_map(|id| g.lookup(id)).collect();
    if refs.is_empty() {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    for var in pattern.variables() {
        let fixed_vars = [var.to_string()];
        let plan = plan_pattern(g, pattern, &[], &fixed_vars, PlanOptions::default());
        for &r in &refs {
            let fixed = BTreeMap::from([(var.to_string(), r)]);
            out.extend(plan.execute(g, &fixed).to_match_set(g, None).matches);
        }
    }
    out.into_iter().collect()
}
