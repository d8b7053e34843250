use crate::graph::{ObjRef, PropertyGraph, Value};
use crate::lang::{distance, CmpOp, Constraint, DistanceFn, Interval};

/// A constraint with variables resolved to row columns.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Const {
        d: DistanceFn,
        col: usize,
        key: String,
        c: Value,
        op: CmpOp,
        t: f64,
    },
    Attr {
        d: DistanceFn,
        l: usize,
        lk: String,
        r: usize,
        rk: String,
        op: CmpOp,
        t: f64,
    },
    IdEq(usize, usize),
    IdNeq(usize, usize),
}

impl Compiled {
    pub fn new(c: &Constraint, col: &dyn Fn(&str) -> usize) -> Compiled {
        match c {
            Constraint::ConstVsAttr {
                distance,
                attr,
                constant,
                op,
                threshold,
            } => Compiled::Const {
                d: *distance,
                col: col(&attr.var),
                key: attr.key.clone(),
                c: constant.clone(),
                op: *op,
                t: *threshold,
            },
            Constraint::AttrVsAttr {
                distance,
                left,
                right,
                op,
                threshold,
            } => Compiled::Attr {
                d: *distance,
                l: col(&left.var),
                lk: left.key.clone(),
                r: col(&right.var),
                rk: right.key.clone(),
                op: *op,
                t: *threshold,
            },
            Constraint::IdentEq(a, b) => Compiled::IdEq(col(a), col(b)),
            Constraint::IdentNeq(a, b) => Compiled::IdNeq(col(a), col(b)),
        }
    }

    pub fn columns(&self) -> Vec<usize> {
        match self {
            Compiled::Const { col, .. } => vec![*col],
            Compiled::Attr { l, r, .. } => vec![*l, *r],
            Compiled::IdEq(a, b) | Compiled::IdNeq(a, b) => vec![*a, *b],
        }
    }

    /// Missing properties and kind mismatches make the constraint false.
    pub fn holds(&self, row: &[ObjRef], g: &PropertyGraph) -> bool {
        match self {
            Compiled::Const { d, col, key, c, op, t } => match g.obj(row[*col]).visible_property(key) {
                Some(v) => distance(*d, v, c).is_ok_and(|x| op.holds(x, *t)),
                None => false,
            },
            Compiled::Attr { d, l, lk, r, rk, op, t } => {
                let a = g.obj(row[*l]).visible_property(lk);
                let b = g.obj(row[*r]).visible_property(rk);
                match (a, b) {
                    (Some(a), Some(b)) => distance(*d, a, b).is_ok_and(|x| op.holds(x, *t)),
                    _ => false,
                }
            }
            Compiled::IdEq(a, b) => row[*a] == row[*b],
            Compiled::IdNeq(a, b) => row[*a] != row[*b],
        }
    }

    /// Upper bound on the admissible distance, if finite.
    pub fn upper_bound(&self) -> Option<f64> {
        let (op, t) = match self {
            Compiled::Const { op, t, .. } | Compiled::Attr { op, t, .. } => (*op, *t),
            _ => return None,
        };
        let i = Interval::from_op(op, t).intersect(&Interval::non_negative());
        let (_, hi) = i.bounds()?;
        hi.is_finite().then_some(hi)
    }

    /// Whether an `eq` constraint admits only distance 0.
    pub fn forces_equal(&self) -> bool {
        match self {
            Compiled::Attr {
                d: DistanceFn::Eq,
                op,
                t,
                ..
            } => {
                let i = Interval::from_op(*op, *t);
                i.contains(0.0) && !i.contains(1.0)
            }
            _ => false,
        }
    }
}
