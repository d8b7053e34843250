//! Homomorphic pattern matching with constraint filtering.
//!
//! Patterns are split into connected components. Each component is matched
//! by backtracking along a greedy expansion order; components are combined
//! by joins chosen from the constraints that link them.

mod brute;
mod compiled;
mod plan;
mod search;
mod simjoin;

use std::collections::BTreeMap;

use crate::graph::{ObjRef, PropertyGraph};
use crate::lang::{Constraint, Ggd, GraphPattern};

pub use self::brute::{brute_force_match, BRUTE_FORCE_LIMIT};
pub(crate) use self::compiled::Compiled;
pub use self::plan::{plan_pattern, JoinStrategy, Plan, PlanOptions};

/// A binding of every pattern variable to an object id.
pub type Match = BTreeMap<String, String>;

/// Sentinel for a variable that is not bound yet.
pub const UNBOUND: ObjRef = usize::MAX;

/// Deduplicated matches in ascending order of their sorted bindings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchSet {
    pub vars: Vec<String>,
    pub matches: Vec<Match>,
}

impl MatchSet {
    pub fn new(mut vars: Vec<String>, mut matches: Vec<Match>) -> MatchSet {
        vars.sort();
        vars.dedup();
        matches.sort();
        matches.dedup();
        MatchSet { vars, matches }
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Match> {
        self.matches.iter()
    }

    pub fn contains(&self, m: &Match) -> bool {
        self.matches.binary_search(m).is_ok()
    }
}

/// Matches in arena form: one row per match, one column per plan variable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RowSet {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<ObjRef>>,
}

impl RowSet {
    pub fn column(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// Converts to id bindings, keeping only `keep` variables (all when `None`).
    pub fn to_match_set(&self, g: &PropertyGraph, keep: Option<&[String]>) -> MatchSet {
        let cols: Vec<(usize, &String)> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(_, v)| keep.map_or(true, |k| k.contains(v)))
            .collect();
        let matches = self
            .rows
            .iter()
            .map(|row| {
                cols.iter()
                    .map(|(i, v)| ((*v).clone(), g.id(row[*i]).to_string()))
                    .collect()
            })
            .collect();
        MatchSet::new(cols.iter().map(|(_, v)| (*v).clone()).collect(), matches)
    }
}

/// `⟦Q, φ⟧_G` with the default plan.
pub fn match_pattern(g: &PropertyGraph, pattern: &GraphPattern, phi: &[Constraint]) -> MatchSet {
    match_pattern_with(g, pattern, phi, PlanOptions::default())
}

pub fn match_pattern_with(
    g: &PropertyGraph,
    pattern: &GraphPattern,
    phi: &[Constraint],
    opts: PlanOptions,
) -> MatchSet {
    let plan = plan_pattern(g, pattern, phi, &[], opts);
    plan.execute(g, &BTreeMap::new()).to_match_set(g, None)
}

/// Target matches of `ggd` that agree with the source match `hs` on the
/// shared variables. With `filter_target`, only matches satisfying `φ_t`
/// (evaluated together with `hs`) are returned.
pub fn extend_match(g: &PropertyGraph, ggd: &Ggd, hs: &Match, filter_target: bool) -> MatchSet {
    let target_vars = ggd.target.var_set();
    let extra: Vec<String> = if filter_target {
        let mut e: Vec<String> = ggd
            .target_constraints
            .iter()
            .flat_map(|c| c.vars())
            .filter(|v| !target_vars.contains(*v))
            .map(str::to_string)
            .collect();
        e.sort();
        e.dedup();
        e
    } else {
        Vec::new()
    };
    let phi: &[Constraint] = if filter_target { &ggd.target_constraints } else { &[] };
    let keep: Vec<String> = ggd.target.variables().iter().map(|s| s.to_string()).collect();
    let mut fixed = BTreeMap::new();
    for (var, id) in hs {
        if target_vars.contains(var) || extra.contains(var) {
            match g.lookup(id) {
                Some(r) => {
                    fixed.insert(var.clone(), r);
                }
                None => return MatchSet::new(keep, Vec::new()),
            }
        }
    }
    let mut names: Vec<String> = fixed.keys().cloned().collect();
    names.extend(extra.iter().filter(|e| !fixed.contains_key(*e)).cloned());
    let plan = plan_pattern(g, &ggd.target, phi, &names, PlanOptions::default());
    plan.execute(g, &fixed).to_match_set(g, Some(&keep))
}
