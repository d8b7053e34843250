use std::collections::BTreeSet;

use super::DistanceFn;
use crate::graph::{Value, ValueKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{function} is undefined on {left:?} and {right:?}")]
pub struct DistanceError {
    pub function: &'static str,
    pub left: ValueKind,
    pub right: ValueKind,
}

/// Computes `d(a, b)`.
///
/// `absdiff` accepts any mix of integers and numbers, `edit` and `jaccard`
/// require text on both sides, and `eq` accepts anything.
pub fn distance(d: DistanceFn, a: &Value, b: &Value) -> Result<f64, DistanceError> {
    let err = || DistanceError {
        function: d.name(),
        left: a.kind(),
        right: b.kind(),
    };
    match d {
        DistanceFn::AbsDiff => match (a, b) {
            (Value::Integer(x), Value::Integer(y)) => Ok((*x as i128 - *y as i128).unsigned_abs() as f64),
            _ => match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => Ok((x - y).abs()),
                _ => Err(err()),
            },
        },
        DistanceFn::Edit => match (a, b) {
            (Value::Text(x), Value::Text(y)) => Ok(levenshtein(x, y) as f64),
            _ => Err(err()),
        },
        DistanceFn::Jaccard => match (a, b) {
            (Value::Text(x), Value::Text(y)) => Ok(jaccard(&jaccard_tokens(x), &jaccard_tokens(y))),
            _ => Err(err()),
        },
        DistanceFn::Eq => Ok(if a == b { 0.0 } else { 1.0 }),
    }
}

/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let next = (diag + usize::from(ca != cb)).min(row[j] + 1).min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Lower-cased whitespace tokens, as a set.
pub fn jaccard_tokens(s: &str) -> BTreeSet<String> {
    s.split_whitespace().map(str::to_lowercase).collect()
}

pub(crate) fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    let inter = a.intersection(b).count();
    1.0 - inter as f64 / union as f64
}
