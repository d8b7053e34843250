use std::collections::BTreeMap;

use super::feasible::{feasible, kind_req, Analysis, KindReq, Operand};
use super::{AttrRef, Constraint, DistanceFn};

/// `τ ⪰ ω` over a single pattern: every binding satisfying `ω` satisfies `τ`.
pub fn subjugates(tau: &[Constraint], omega: &[Constraint]) -> bool {
    subjugates_with(tau, omega, &BTreeMap::new())
}

/// `τ ⪰ ω` with `τ`'s variables renamed through `mapping` (unmapped names
/// are kept).
pub fn subjugates_with(tau: &[Constraint], omega: &[Constraint], mapping: &BTreeMap<String, String>) -> bool {
    if !feasible(omega) {
        return true;
    }
    let rename = |v: &str| mapping.get(v).cloned().unwrap_or_else(|| v.to_string());
    tau.iter().all(|c| entails(omega, &c.rename(&rename)))
}

/// Whether every binding satisfying `omega` satisfies `c`.
///
/// A distance constraint can fail by its comparison or by a missing or
/// ill-typed property, so `omega` must force the property to exist with a
/// usable kind and must contradict every complementary comparison.
pub fn entails(omega: &[Constraint], c: &Constraint) -> bool {
    if !feasible(omega) {
        return true;
    }
    match c {
        Constraint::IdentEq(a, b) => !feasible(&with(omega, Constraint::IdentNeq(a.clone(), b.clone()))),
        Constraint::IdentNeq(a, b) => !feasible(&with(omega, Constraint::IdentEq(a.clone(), b.clone()))),
        Constraint::ConstVsAttr { distance, attr, .. } => {
            forces(omega, attr, *distance) && refutes_complement(omega, c)
        }
        Constraint::AttrVsAttr {
            distance, left, right, ..
        } => forces(omega, left, *distance) && forces(omega, right, *distance) && refutes_complement(omega, c),
    }
}

fn with(omega: &[Constraint], extra: Constraint) -> Vec<Constraint> {
    let mut v = omega.to_vec();
    v.push(extra);
    v
}

fn refutes_complement(omega: &[Constraint], c: &Constraint) -> bool {
    c.negations().into_iter().all(|neg| !feasible(&with(omega, neg)))
}

/// Whether `omega` forces `attr` to be present with a kind `d` accepts.
fn forces(omega: &[Constraint], attr: &AttrRef, d: DistanceFn) -> bool {
    let Some(an) = Analysis::new(omega) else {
        return true;
    };
    let target = an.canon_attr(attr);
    let need = kind_req(d);
    let mut present = false;
    let mut kind_forced = need.is_none();
    for ((dist, l, r), i) in &an.triples {
        let mentions = |o: &Operand| matches!(o, Operand::Attr(a) if *a == target);
        if !(mentions(l) || mentions(r)) {
            continue;
        }
        present = true;
        if need.is_some() && kind_req(*dist) == need {
            kind_forced = true;
        }
        if *dist == DistanceFn::Eq && i.contains(0.0) && !i.contains(1.0) {
            let other = if mentions(l) { r } else { l };
            if let Operand::Const(c) = other {
                let ok = match need {
                    Some(KindReq::Numeric) => c.is_numeric(),
                    Some(KindReq::Text) => c.as_text().is_some(),
                    None => true,
                };
                kind_forced |= ok;
            }
        }
    }
    present && kind_forced
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Value;
    use crate::lang::CmpOp;

    fn a9(var: &str, op: CmpOp, t: f64) -> Constraint {
        Constraint::const_attr(DistanceFn::AbsDiff, var, "A", Value::Integer(9), op, t)
    }

    #[test]
    fn looser_threshold_subjugates() {
        assert!(subjugates(&[a9("u", CmpOp::Le, 7.0)], &[a9("u", CmpOp::Le, 5.0)]));
        assert!(!subjugates(&[a9("u", CmpOp::Le, 5.0)], &[a9("u", CmpOp::Le, 7.0)]));
        let m = BTreeMap::from([("u2".to_string(), "u".to_string())]);
        assert!(subjugates_with(
            &[a9("u2", CmpOp::Le, 7.0)],
            &[a9("u", CmpOp::Le, 5.0)],
            &m
        ));
    }

    #[test]
    fn vacuous_cases() {
        assert!(subjugates(&[], &[a9("u", CmpOp::Le, 5.0)]));
        assert!(subjugates(
            &[a9("u", CmpOp::Le, 1.0)],
            &[a9("u", CmpOp::Gt, 5.0), a9("u", CmpOp::Lt, 5.0)]
        ));
        assert!(!subjugates(&[a9("u", CmpOp::Ge, 0.0)], &[]));
    }

    #[test]
    fn identity() {
        let eq = Constraint::IdentEq("a".into(), "b".into());
        assert!(subjugates(&[eq.clone()], &[eq.clone()]));
        assert!(!subjugates(&[eq.clone()], &[]));
        assert!(subjugates(&[Constraint::IdentEq("a".into(), "a".into())], &[]));
    }
}
