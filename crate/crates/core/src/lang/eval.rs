use super::distance::{distance, DistanceError};
use super::{Binding, Constraint};
use crate::graph::{GraphObject, PropertyGraph, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("`{var}` is bound to `{id}`, which has no property `{key}`")]
    MissingProperty { var: String, id: String, key: String },
    #[error(transparent)]
    KindMismatch(#[from] DistanceError),
}

/// Evaluates one constraint under a binding of variables to object ids.
pub fn eval_constraint(c: &Constraint, binding: &Binding, g: &PropertyGraph) -> Result<bool, EvalError> {
    eval_with(c, &|var| binding.get(var).and_then(|id| g.get(id)))
}

/// Evaluates one constraint given a resolver from variables to bound objects.
pub fn eval_with<'a>(c: &Constraint, resolve: &dyn Fn(&str) -> Option<&'a GraphObject>) -> Result<bool, EvalError> {
    let obj = |var: &str| resolve(var).ok_or_else(|| EvalError::Unbound(var.to_string()));
    let prop = |var: &str, key: &str| -> Result<&'a Value, EvalError> {
        let o = obj(var)?;
        o.visible_property(key).ok_or_else(|| EvalError::MissingProperty {
            var: var.to_string(),
            id: o.id.clone(),
            key: key.to_string(),
        })
    };
    match c {
        Constraint::ConstVsAttr {
            distance: d,
            attr,
            constant,
            op,
            threshold,
        } => {
            let v = prop(&attr.var, &attr.key)?;
            Ok(op.holds(distance(*d, v, constant)?, *threshold))
        }
        Constraint::AttrVsAttr {
            distance: d,
            left,
            right,
            op,
            threshold,
        } => {
            let a = prop(&left.var, &left.key)?;
            let b = prop(&right.var, &right.key)?;
            Ok(op.holds(distance(*d, a, b)?, *threshold))
        }
        Constraint::IdentEq(a, b) => Ok(obj(a)?.id == obj(b)?.id),
        Constraint::IdentNeq(a, b) => Ok(obj(a)?.id != obj(b)?.id),
    }
}

/// A constraint that fails to evaluate is not satisfied.
pub fn satisfies(c: &Constraint, binding: &Binding, g: &PropertyGraph) -> bool {
    matches!(eval_constraint(c, binding, g), Ok(true))
}

pub fn satisfies_all(cs: &[Constraint], binding: &Binding, g: &PropertyGraph) -> bool {
    cs.iter().all(|c| satisfies(c, binding, g))
}
