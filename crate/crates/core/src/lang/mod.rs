//! GGD object model, DSL parser and printer, differential-constraint
//! evaluation, subjugation and feasibility.

mod distance;
mod eval;
mod feasible;
mod interval;
mod parser;
mod printer;
mod subjugate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::graph::Value;

pub use self::distance::{distance, jaccard_tokens, levenshtein, DistanceError};
pub use self::eval::{eval_constraint, eval_with, satisfies, satisfies_all, EvalError};
pub(crate) use self::feasible::edit_ball;
pub use self::feasible::{feasible, DomainSet};
pub use self::interval::Interval;
pub use self::interval::TOLERANCE;
pub use self::parser::{parse_ggds, ParseError};
pub use self::subjugate::{entails, subjugates, subjugates_with};

/// Pattern label: a concrete label or the wildcard `-`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Named(String),
    Wildcard,
}

impl Label {
    pub fn parse(s: &str) -> Label {
        if s == "-" {
            Label::Wildcard
        } else {
            Label::Named(s.to_string())
        }
    }

    /// The string used for graph label lookups (`-` for the wildcard).
    pub fn as_str(&self) -> &str {
        match self {
            Label::Named(s) => s,
            Label::Wildcard => "-",
        }
    }

    /// Label compatibility: equal, or either side is the wildcard.
    pub fn compatible(&self, other: &Label) -> bool {
        match (self, other) {
            (Label::Wildcard, _) | (_, Label::Wildcard) => true,
            (Label::Named(a), Label::Named(b)) => a == b,
        }
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, Label::Wildcard)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternVertex {
    pub var: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternEdge {
    pub var: String,
    pub label: Label,
    pub from: String,
    pub to: String,
}

/// A directed graph pattern whose vertices and edges are variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphPattern {
    pub name: Option<String>,
    pub vertices: Vec<PatternVertex>,
    pub edges: Vec<PatternEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Vertex,
    Edge,
}

impl GraphPattern {
    pub fn vertex(&mut self, var: &str, label: &str) -> &mut Self {
        self.vertices.push(PatternVertex {
            var: var.to_string(),
            label: Label::parse(label),
        });
        self
    }

    pub fn edge(&mut self, var: &str, label: &str, from: &str, to: &str) -> &mut Self {
        self.edges.push(PatternEdge {
            var: var.to_string(),
            label: Label::parse(label),
            from: from.to_string(),
            to: to.to_string(),
        });
        self
    }

    /// All variables, vertices first, in declaration order.
    pub fn variables(&self) -> Vec<&str> {
        self.vertices
            .iter()
            .map(|v| v.var.as_str())
            .chain(self.edges.iter().map(|e| e.var.as_str()))
            .collect()
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.variables().into_iter().map(str::to_string).collect()
    }

    pub fn var_kind(&self, var: &str) -> Option<VarKind> {
        if self.vertices.iter().any(|v| v.var == var) {
            Some(VarKind::Vertex)
        } else if self.edges.iter().any(|e| e.var == var) {
            Some(VarKind::Edge)
        } else {
            None
        }
    }

    pub fn label_of(&self, var: &str) -> Option<&Label> {
        self.vertices
            .iter()
            .find(|v| v.var == var)
            .map(|v| &v.label)
            .or_else(|| self.edges.iter().find(|e| e.var == var).map(|e| &e.label))
    }

    pub fn size(&self) -> usize {
        self.vertices.len() + self.edges.len()
    }

    /// Checks variable uniqueness and endpoint declarations.
    pub fn check(&self) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        for v in self.variables() {
            if !seen.insert(v) {
                return Err(format!("variable `{v}` declared twice"));
            }
        }
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if !self.vertices.iter().any(|v| &v.var == end) {
                    return Err(format!("edge `{}` uses undeclared vertex `{end}`", e.var));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistanceFn {
    AbsDiff,
    Edit,
    Jaccard,
    Eq,
}

impl DistanceFn {
    pub const ALL: [DistanceFn; 4] = [
        DistanceFn::AbsDiff,
        DistanceFn::Edit,
        DistanceFn::Jaccard,
        DistanceFn::Eq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DistanceFn::AbsDiff => "absdiff",
            DistanceFn::Edit => "edit",
            DistanceFn::Jaccard => "jaccard",
            DistanceFn::Eq => "eq",
        }
    }

    pub fn from_name(s: &str) -> Option<DistanceFn> {
        DistanceFn::ALL.into_iter().find(|d| d.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Gt, CmpOp::Le, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }

    /// Float comparison; `=` and `!=` use an absolute tolerance of 1e-9.
    pub fn holds(self, d: f64, t: f64) -> bool {
        const TOL: f64 = 1e-9;
        match self {
            CmpOp::Lt => d < t,
            CmpOp::Gt => d > t,
            CmpOp::Le => d <= t,
            CmpOp::Ge => d >= t,
            CmpOp::Eq => (d - t).abs() <= TOL,
            CmpOp::Ne => (d - t).abs() > TOL,
        }
    }

    /// Operators whose union with `self` covers every distance, used to negate.
    pub fn complement(self) -> &'static [CmpOp] {
        match self {
            CmpOp::Lt => &[CmpOp::Ge],
            CmpOp::Le => &[CmpOp::Gt],
            CmpOp::Gt => &[CmpOp::Le],
            CmpOp::Ge => &[CmpOp::Lt],
            CmpOp::Eq => &[CmpOp::Lt, CmpOp::Gt],
            CmpOp::Ne => &[CmpOp::Eq],
        }
    }
}

/// `var.key`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrRef {
    pub var: String,
    pub key: String,
}

impl AttrRef {
    pub fn new(var: &str, key: &str) -> AttrRef {
        AttrRef {
            var: var.to_string(),
            key: key.to_string(),
        }
    }
}

/// A differential constraint. Distance constraints compare `distance(left, right)`
/// against a non-negative threshold; identity constraints compare bound ids.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    ConstVsAttr {
        distance: DistanceFn,
        attr: AttrRef,
        constant: Value,
        op: CmpOp,
        threshold: f64,
    },
    AttrVsAttr {
        distance: DistanceFn,
        left: AttrRef,
        right: AttrRef,
        op: CmpOp,
        threshold: f64,
    },
    IdentEq(String, String),
    IdentNeq(String, String),
}

/// Form tag of a [`Constraint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintForm {
    ConstVsAttr,
    AttrVsAttr,
    IdentEq,
    IdentNeq,
}

impl Constraint {
    pub fn const_attr(
        distance: DistanceFn,
        var: &str,
        key: &str,
        constant: Value,
        op: CmpOp,
        threshold: f64,
    ) -> Constraint {
        Constraint::ConstVsAttr {
            distance,
            attr: AttrRef::new(var, key),
            constant,
            op,
            threshold,
        }
    }

    pub fn attr_attr(
        distance: DistanceFn,
        left: (&str, &str),
        right: (&str, &str),
        op: CmpOp,
        threshold: f64,
    ) -> Constraint {
        Constraint::AttrVsAttr {
            distance,
            left: AttrRef::new(left.0, left.1),
            right: AttrRef::new(right.0, right.1),
            op,
            threshold,
        }
    }

    pub fn form(&self) -> ConstraintForm {
        match self {
            Constraint::ConstVsAttr { .. } => ConstraintForm::ConstVsAttr,
            Constraint::AttrVsAttr { .. } => ConstraintForm::AttrVsAttr,
            Constraint::IdentEq(..) => ConstraintForm::IdentEq,
            Constraint::IdentNeq(..) => ConstraintForm::IdentNeq,
        }
    }

    /// Variables mentioned, in order of appearance (may repeat).
    pub fn vars(&self) -> Vec<&str> {
        match self {
            Constraint::ConstVsAttr { attr, .. } => vec![&attr.var],
            Constraint::AttrVsAttr { left, right, .. } => vec![&left.var, &right.var],
            Constraint::IdentEq(a, b) | Constraint::IdentNeq(a, b) => vec![a, b],
        }
    }

    pub fn distance_parts(&self) -> Option<(DistanceFn, CmpOp, f64)> {
        match self {
            Constraint::ConstVsAttr {
                distance,
                op,
                threshold,
                ..
            }
            | Constraint::AttrVsAttr {
                distance,
                op,
                threshold,
                ..
            } => Some((*distance, *op, *threshold)),
            _ => None,
        }
    }

    /// Same constraint with the comparison operator replaced.
    pub fn with_op(&self, new_op: CmpOp) -> Constraint {
        let mut c = self.clone();
        match &mut c {
            Constraint::ConstVsAttr { op, .. } | Constraint::AttrVsAttr { op, .. } => *op = new_op,
            Constraint::IdentEq(a, b) if new_op == CmpOp::Ne => return Constraint::IdentNeq(a.clone(), b.clone()),
            Constraint::IdentNeq(a, b) if new_op == CmpOp::Eq => return Constraint::IdentEq(a.clone(), b.clone()),
            _ => {}
        }
        c
    }

    /// Distance constraints whose satisfying distances are exactly those
    /// failing `self`. `=` has a tolerance band, so its negation is
    /// `< t - tol` or `> t + tol`.
    pub fn negations(&self) -> Vec<Constraint> {
        let Some((_, op, t)) = self.distance_parts() else {
            return Vec::new();
        };
        let shift = |c: Constraint, to: f64| match c {
            Constraint::ConstVsAttr {
                distance,
                attr,
                constant,
                op,
                ..
            } => Constraint::ConstVsAttr {
                distance,
                attr,
                constant,
                op,
                threshold: to,
            },
            Constraint::AttrVsAttr {
                distance,
                left,
                right,
                op,
                ..
            } => Constraint::AttrVsAttr {
                distance,
                left,
                right,
                op,
                threshold: to,
            },
            other => other,
        };
        match op {
            CmpOp::Eq => vec![
                shift(self.with_op(CmpOp::Lt), t - TOLERANCE),
                shift(self.with_op(CmpOp::Gt), t + TOLERANCE),
            ],
            _ => op.complement().iter().map(|neg| self.with_op(*neg)).collect(),
        }
    }

    /// Renames variables through `f`.
    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> Constraint {
        let attr = |a: &AttrRef| AttrRef {
            var: f(&a.var),
            key: a.key.clone(),
        };
        match self {
            Constraint::ConstVsAttr {
                distance,
                attr: a,
                constant,
                op,
                threshold,
            } => Constraint::ConstVsAttr {
                distance: *distance,
                attr: attr(a),
                constant: constant.clone(),
                op: *op,
                threshold: *threshold,
            },
            Constraint::AttrVsAttr {
                distance,
                left,
                right,
                op,
                threshold,
            } => Constraint::AttrVsAttr {
                distance: *distance,
                left: attr(left),
                right: attr(right),
                op: *op,
                threshold: *threshold,
            },
            Constraint::IdentEq(a, b) => Constraint::IdentEq(f(a), f(b)),
            Constraint::IdentNeq(a, b) => Constraint::IdentNeq(f(a), f(b)),
        }
    }

    /// Admissible distance interval (distance constraints only).
    pub fn interval(&self) -> Option<Interval> {
        self.distance_parts().map(|(_, op, t)| Interval::from_op(op, t))
    }
}

/// A graph generating dependency `Q_s, φ_s → Q_t, φ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ggd {
    pub name: String,
    pub source: GraphPattern,
    pub source_constraints: Vec<Constraint>,
    pub target: GraphPattern,
    pub target_constraints: Vec<Constraint>,
}

impl Ggd {
    /// Source variables x̄.
    pub fn source_vars(&self) -> BTreeSet<String> {
        self.source.var_set()
    }

    /// Target-only variables ȳ, in declaration order.
    pub fn fresh_vars(&self) -> Vec<String> {
        let xs = self.source_vars();
        self.target
            .variables()
            .into_iter()
            .filter(|v| !xs.contains(*v))
            .map(str::to_string)
            .collect()
    }

    /// Source variables that also occur in the target pattern.
    pub fn shared_vars(&self) -> Vec<String> {
        let ts = self.target.var_set();
        self.source
            .variables()
            .into_iter()
            .filter(|v| ts.contains(*v))
            .map(str::to_string)
            .collect()
    }

    /// Structural and scoping checks.
    pub fn check(&self) -> Result<(), String> {
        self.source.check().map_err(|e| format!("source: {e}"))?;
        self.target.check().map_err(|e| format!("target: {e}"))?;
        for v in self.target.variables() {
            if let Some(sk) = self.source.var_kind(v) {
                if self.target.var_kind(v) != Some(sk) {
                    return Err(format!("variable `{v}` changes kind between source and target"));
                }
                let (a, b) = (self.source.label_of(v).unwrap(), self.target.label_of(v).unwrap());
                if !a.compatible(b) {
                    return Err(format!(
                        "label clash on shared variable `{v}`: `{}` vs `{}`",
                        a.as_str(),
                        b.as_str()
                    ));
                }
                let ends = |p: &GraphPattern| {
                    p.edges
                        .iter()
                        .find(|e| e.var == v)
                        .map(|e| (e.from.clone(), e.to.clone()))
                };
                if ends(&self.source) != ends(&self.target) {
                    return Err(format!("shared edge `{v}` changes endpoints between source and target"));
                }
            }
        }
        let xs = self.source_vars();
        for c in &self.source_constraints {
            for v in c.vars() {
                if !xs.contains(v) {
                    return Err(format!("undeclared variable `{v}` in source constraints"));
                }
            }
        }
        let all: BTreeSet<String> = xs.union(&self.target.var_set()).cloned().collect();
        for c in &self.target_constraints {
            for v in c.vars() {
                if !all.contains(v) {
                    return Err(format!("undeclared variable `{v}` in target constraints"));
                }
            }
        }
        for c in self.source_constraints.iter().chain(&self.target_constraints) {
            if let Some((_, _, t)) = c.distance_parts() {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(format!("threshold {t} must be a finite non-negative number"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GgdSet {
    pub ggds: Vec<Ggd>,
}

impl GgdSet {
    pub fn new(ggds: Vec<Ggd>) -> Result<GgdSet, String> {
        let mut names = BTreeSet::new();
        for g in &ggds {
            if !names.insert(g.name.as_str()) {
                return Err(format!("duplicate GGD name `{}`", g.name));
            }
            g.check().map_err(|e| format!("{}: {e}", g.name))?;
        }
        Ok(GgdSet { ggds })
    }

    pub fn len(&self) -> usize {
        self.ggds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ggds.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Ggd> {
        self.ggds.iter().find(|g| g.name == name)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Ggd> {
        self.ggds.iter()
    }
}

impl<'a> IntoIterator for &'a GgdSet {
    type Item = &'a Ggd;
    type IntoIter = std::slice::Iter<'a, Ggd>;

    fn into_iter(self) -> Self::IntoIter {
        self.ggds.iter()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A binding of pattern variables to object ids.
pub type Binding = BTreeMap<String, String>;
