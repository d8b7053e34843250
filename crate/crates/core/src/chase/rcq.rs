use std::collections::{BTreeMap, BTreeSet};

use crate::graph::Value;
use crate::lang::{subjugates, AttrRef, CmpOp, Constraint, DistanceFn};

/// The other side of a range-class constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparand {
    Const(Value),
    /// An attribute of another object, by object id.
    Attr {
        object: String,
        key: String,
    },
}

/// Where a range-class constraint came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// The stored value of a concrete object.
    Own,
    /// A source condition under which some GGD fired. Informational: the
    /// loosest one per comparand is kept and it does not restrict values.
    Source,
    /// An obligation imposed by a target.
    Target,
}

/// Range-class constraint on one attribute: `distance(attr, val) op threshold`.
/// `Own` entries carry no distance and pin the value to `val`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rcq {
    pub distance: Option<DistanceFn>,
    pub val: Comparand,
    pub threshold: f64,
    pub op: CmpOp,
    pub role: Role,
}

impl Rcq {
    pub fn own(v: Value) -> Rcq {
        Rcq {
            distance: None,
            val: Comparand::Const(v),
            threshold: 0.0,
            op: CmpOp::Eq,
            role: Role::Own,
        }
    }

    /// Lang form over `subject`, with attribute comparands named by object id.
    pub(crate) fn to_constraint(&self, subject: &AttrRef) -> Constraint {
        let d = self.distance.unwrap_or(DistanceFn::Eq);
        match &self.val {
            Comparand::Const(c) => Constraint::ConstVsAttr {
                distance: d,
                attr: subject.clone(),
                constant: c.clone(),
                op: self.op,
                threshold: self.threshold,
            },
            Comparand::Attr { object, key } => Constraint::AttrVsAttr {
                distance: d,
                left: subject.clone(),
                right: AttrRef::new(object, key),
                op: self.op,
                threshold: self.threshold,
            },
        }
    }

    fn same_slot(&self, other: &Rcq) -> bool {
        self.role == other.role && self.distance == other.distance && self.val == other.val
    }
}

/// Objects known to be equal, with the constraints on their attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeClass {
    pub members: BTreeSet<String>,
    pub attrs: BTreeMap<String, Vec<Rcq>>,
    /// Every member comes from the input graph, so an attribute without an
    /// `Own` entry is absent rather than unknown.
    pub concrete: bool,
}

impl RangeClass {
    pub fn new(id: &str, concrete: bool) -> RangeClass {
        RangeClass {
            members: BTreeSet::from([id.to_string()]),
            attrs: BTreeMap::new(),
            concrete,
        }
    }

    pub fn rcqs(&self, key: &str) -> &[Rcq] {
        self.attrs.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Stored values of the attribute.
    pub fn own_values(&self, key: &str) -> Vec<&Value> {
        self.rcqs(key)
            .iter()
            .filter(|r| r.role == Role::Own)
            .filter_map(|r| match &r.val {
                Comparand::Const(v) => Some(v),
                Comparand::Attr { .. } => None,
            })
            .collect()
    }

    pub(crate) fn absorb(&mut self, other: RangeClass) {
        self.members.extend(other.members);
        self.concrete &= other.concrete;
        for (key, list) in other.attrs {
            let mine = self.attrs.entry(key).or_default();
            for r in list {
                if !mine.contains(&r) {
                    mine.push(r);
                }
            }
        }
    }

    /// Loosest-wins fold of a source condition. Returns whether anything
    /// changed.
    pub(crate) fn fold_source(&mut self, key: &str, new: Rcq) -> bool {
        let subject = AttrRef::new("_", key);
        let as_c = |r: &Rcq| r.to_constraint(&subject);
        let list = self.attrs.entry(key.to_string()).or_default();
        let looser_or_equal = |old: &Rcq| subjugates(&[as_c(old)], &[as_c(&new)]);
        if list.iter().any(|old| old.same_slot(&new) && looser_or_equal(old)) {
            return false;
        }
        list.retain(|old| !(old.same_slot(&new) && subjugates(&[as_c(&new)], &[as_c(old)])));
        list.push(new);
        true
    }

    /// Adds a target obligation, dropping obligations it makes redundant.
    pub(crate) fn fold_target(&mut self, key: &str, new: Rcq) {
        let subject = AttrRef::new("_", key);
        let nc = new.to_constraint(&subject);
        let list = self.attrs.entry(key.to_string()).or_default();
        list.retain(|old| !(old.same_slot(&new) && subjugates(&[old.to_constraint(&subject)], &[nc.clone()])));
        list.push(new);
    }
}
