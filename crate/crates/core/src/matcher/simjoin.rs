//! Candidate generation for similarity joins. Each function returns a
//! superset of the pairs within the bound; callers verify every pair.

use std::collections::{BTreeSet, HashMap};

use crate::graph::Value;
use crate::lang::jaccard_tokens;

const Q: usize = 2;

fn texts(vs: &[Option<Value>]) -> Vec<Option<Vec<char>>> {
    vs.iter()
        .map(|v| v.as_ref().and_then(Value::as_text).map(|s| s.chars().collect()))
        .collect()
}

/// Tagged q-grams: the n-th occurrence of a gram is a distinct token.
fn grams(s: &[char]) -> Vec<(String, usize)> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    s.windows(Q)
        .map(|w| {
            let g: String = w.iter().collect();
            let n = seen.entry(g.clone()).or_default();
            *n += 1;
            (g, *n)
        })
        .collect()
}

/// Pairs `(left, right)` that may be within edit distance `u`: length
/// filter plus a q-gram prefix filter for strings long enough to carry one.
pub(crate) fn edit_pairs(left: &[Option<Value>], right: &[Option<Value>], u: usize) -> Vec<(usize, usize)> {
    let (ls, rs) = (texts(left), texts(right));
    let long = |s: &[char]| s.len() >= Q * u + Q;
    let prefix_len = Q * u + 1;

    let all_grams: Vec<Option<Vec<(String, usize)>>> = ls
        .iter()
        .chain(&rs)
        .map(|s| s.as_ref().filter(|s| long(s)).map(|s| grams(s)))
        .collect();
    let mut freq: HashMap<&(String, usize), usize> = HashMap::new();
    for g in all_grams.iter().flatten().flatten() {
        *freq.entry(g).or_default() += 1;
    }
    let prefix = |gs: &Vec<(String, usize)>| -> Vec<(String, usize)> {
        let mut v = gs.clone();
        v.sort_by(|a, b| freq[a].cmp(&freq[b]).then_with(|| a.cmp(b)));
        v.truncate(prefix_len);
        v
    };
    let (lg, rg) = all_grams.split_at(ls.len());

    let mut index: HashMap<(String, usize), Vec<usize>> = HashMap::new();
    let mut by_len: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut short_right: HashMap<usize, Vec<usize>> = HashMap::new();
    for (ri, s) in rs.iter().enumerate() {
        let Some(s) = s else { continue };
        by_len.entry(s.len()).or_default().push(ri);
        match &rg[ri] {
            Some(gs) => {
                for g in prefix(gs) {
                    index.entry(g).or_default().push(ri);
                }
            }
            None => short_right.entry(s.len()).or_default().push(ri),
        }
    }
    let mut out = Vec::new();
    for (li, s) in ls.iter().enumerate() {
        let Some(s) = s else { continue };
        let lens = s.len().saturating_sub(u)..=s.len() + u;
        match &lg[li] {
            None => {
                for n in lens {
                    out.extend(by_len.get(&n).into_iter().flatten().map(|&ri| (li, ri)));
                }
            }
            Some(gs) => {
                let mut cands: BTreeSet<usize> = BTreeSet::new();
                for g in prefix(gs) {
                    for &ri in index.get(&g).into_iter().flatten() {
                        let n = rs[ri].as_ref().map_or(0, Vec::len);
                        if lens.contains(&n) {
                            cands.insert(ri);
                        }
                    }
                }
                for n in lens {
                    cands.extend(short_right.get(&n).into_iter().flatten());
                }
                out.extend(cands.into_iter().map(|ri| (li, ri)));
            }
        }
    }
    out
}

/// Pairs that may be within Jaccard distance `bound < 1`: size filter and
/// token prefix filter; empty token sets pair only with each other.
pub(crate) fn jaccard_pairs(left: &[Option<Value>], right: &[Option<Value>], bound: f64) -> Vec<(usize, usize)> {
    let sim = 1.0 - bound;
    let toks = |vs: &[Option<Value>]| -> Vec<Option<Vec<String>>> {
        vs.iter()
            .map(|v| {
                v.as_ref()
                    .and_then(Value::as_text)
                    .map(|s| jaccard_tokens(s).into_iter().collect())
            })
            .collect()
    };
    let (lt, rt) = (toks(left), toks(right));
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for t in lt.iter().chain(&rt).flatten().flatten() {
        *freq.entry(t.as_str()).or_default() += 1;
    }
    let prefix = |ts: &Vec<String>| -> Vec<String> {
        let mut v = ts.clone();
        v.sort_by(|a, b| freq[a.as_str()].cmp(&freq[b.as_str()]).then_with(|| a.cmp(b)));
        let need = ((sim * ts.len() as f64) - 1e-9).ceil().max(1.0) as usize;
        v.truncate(ts.len() + 1 - need.min(ts.len()));
        v
    };
    let mut index: HashMap<String, Vec<usize>> = HashMap::new();
    let mut empty_right = Vec::new();
    for (ri, ts) in rt.iter().enumerate() {
        match ts {
            Some(ts) if ts.is_empty() => empty_right.push(ri),
            Some(ts) => {
                for t in prefix(ts) {
                    index.entry(t).or_default().push(ri);
                }
            }
            None => {}
        }
    }
    let mut out = Vec::new();
    for (li, ts) in lt.iter().enumerate() {
        match ts {
            Some(ts) if ts.is_empty() => out.extend(empty_right.iter().map(|&ri| (li, ri))),
            Some(ts) => {
                let n = ts.len() as f64;
                let (lo, hi) = (sim * n - 1e-9, n / sim + 1e-9);
                let mut cands = BTreeSet::new();
                for t in prefix(ts) {
                    for &ri in index.get(&t).into_iter().flatten() {
                        let m = rt[ri].as_ref().map_or(0, Vec::len) as f64;
                        if m >= lo && m <= hi {
                            cands.insert(ri);
                        }
                    }
                }
                out.extend(cands.into_iter().map(|ri| (li, ri)));
            }
            None => {}
        }
    }
    out
}

/// Pairs of numbers within `bound` of each other, by a sorted band scan.
pub(crate) fn band_pairs(left: &[Option<Value>], right: &[Option<Value>], bound: f64) -> Vec<(usize, usize)> {
    let mut sorted: Vec<(f64, usize)> = right
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.as_ref().and_then(Value::as_f64).map(|x| (x, i)))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    for (li, v) in left.iter().enumerate() {
        let Some(x) = v.as_ref().and_then(Value::as_f64) else {
            continue;
        };
        let slack = 1e-9 * (1.0 + x.abs() + bound);
        let (lo, hi) = (x - bound - slack, x + bound + slack);
        let start = sorted.partition_point(|(y, _)| *y < lo);
        for &(y, ri) in &sorted[start..] {
            if y > hi {
                break;
            }
            out.push((li, ri));
        }
    }
    out
}
