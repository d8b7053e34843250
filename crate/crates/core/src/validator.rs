//! GGD validation: which source matches lack a satisfying target extension.
//!
//! Two interchangeable plans compute the violated set. `anti` filters both
//! sides first, joins them on the shared variables and subtracts the source
//! matches that found a partner. `outer` left-joins the unfiltered tables and
//! applies every constraint to the joined rows.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::Serialize;

use crate::graph::{ObjRef, PropertyGraph};
use crate::lang::{Constraint, Ggd, GgdSet};
use crate::matcher::{plan_pattern, Compiled, Match, PlanOptions, RowSet, UNBOUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanKind {
    Anti,
    Outer,
}

impl PlanKind {
    pub fn name(self) -> &'static str {
        match self {
            PlanKind::Anti => "anti",
            PlanKind::Outer => "outer",
        }
    }
}

impl std::str::FromStr for PlanKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "anti" => Ok(PlanKind::Anti),
            "outer" => Ok(PlanKind::Outer),
            other => Err(format!("unknown plan `{other}` (expected anti or outer)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub ggd: String,
    /// Source matches satisfying `φ_s`.
    #[serde(rename = "sourceMatches")]
    pub source_matches: usize,
    /// Violated source matches over the source variables, sorted.
    pub violated: Vec<Match>,
    pub plan: PlanKind,
    /// Wall time in milliseconds.
    pub ms: Option<f64>,
}

impl ViolationReport {
    pub fn is_valid(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Column layout of a joined source/target row: source variables first,
/// then target-only variables.
struct Joined {
    vars: Vec<String>,
    source_cols: usize,
    /// For each target-only column, its column in the target row set.
    target_src: Vec<usize>,
    /// Shared variables as (source column, target column).
    shared: Vec<(usize, usize)>,
}

impl Joined {
    fn new(source: &RowSet, target: &RowSet) -> Joined {
        let mut vars = source.vars.clone();
        let mut target_src = Vec::new();
        let mut shared = Vec::new();
        for (ti, v) in target.vars.iter().enumerate() {
            match source.column(v) {
                Some(si) => shared.push((si, ti)),
                None => {
                    vars.push(v.clone());
                    target_src.push(ti);
                }
            }
        }
        Joined {
            source_cols: source.vars.len(),
            vars,
            target_src,
            shared,
        }
    }

    fn compile(&self, cs: &[Constraint]) -> Vec<Compiled> {
        let col = |v: &str| {
            self.vars
                .iter()
                .position(|x| x == v)
                .expect("constraint variable in joined row")
        };
        cs.iter().map(|c| Compiled::new(c, &col)).collect()
    }

    fn key(&self, row: &[ObjRef], target_side: bool) -> Vec<ObjRef> {
        self.shared
            .iter()
            .map(|&(s, t)| if target_side { row[t] } else { row[s] })
            .collect()
    }

    fn combine(&self, s: &[ObjRef], t: Option<&[ObjRef]>, buf: &mut Vec<ObjRef>) {
        buf.clear();
        buf.extend_from_slice(s);
        for &ti in &self.target_src {
            buf.push(t.map_or(UNBOUND, |t| t[ti]));
        }
    }
}

fn rows(g: &PropertyGraph, ggd: &Ggd, target: bool, phi: &[Constraint]) -> RowSet {
    let p = if target { &ggd.target } else { &ggd.source };
    plan_pattern(g, p, phi, &[], PlanOptions::default()).execute(g, &BTreeMap::new())
}

fn to_matches(g: &PropertyGraph, source: &RowSet, picks: impl Iterator<Item = usize>) -> Vec<Match> {
    let mut out: Vec<Match> = picks
        .map(|i| {
            source
                .vars
                .iter()
                .zip(&source.rows[i])
                .map(|(v, &r)| (v.clone(), g.id(r).to_string()))
                .collect()
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Source matches without a satisfying extension, by the chosen plan.
pub fn find_violations(g: &PropertyGraph, ggd: &Ggd, plan: PlanKind) -> ViolationReport {
    let start = Instant::now();
    let (source_matches, violated) = match plan {
        PlanKind::Anti => anti(g, ggd),
        PlanKind::Outer => outer(g, ggd),
    };
    ViolationReport {
        ggd: ggd.name.clone(),
        source_matches,
        violated,
        plan,
        ms: Some(start.elapsed().as_secs_f64() * 1000.0),
    }
}

fn anti(g: &PropertyGraph, ggd: &Ggd) -> (usize, Vec<Match>) {
    let fresh = ggd.fresh_vars();
    let (t1, t2): (Vec<Constraint>, Vec<Constraint>) = ggd
        .target_constraints
        .iter()
        .cloned()
        .partition(|c| c.vars().iter().all(|v| fresh.iter().any(|f| f == v)));
    let source = rows(g, ggd, false, &ggd.source_constraints);
    let target = rows(g, ggd, true, &t1);
    let j = Joined::new(&source, &target);
    let checks = j.compile(&t2);
    let mut index: HashMap<Vec<ObjRef>, Vec<usize>> = HashMap::new();
    for (ti, t) in target.rows.iter().enumerate() {
        index.entry(j.key(t, true)).or_default().push(ti);
    }
    let mut buf = Vec::with_capacity(j.vars.len());
    let violated = (0..source.rows.len()).filter(|&si| {
        let s = &source.rows[si];
        let partners = index.get(&j.key(s, false)).map(Vec::as_slice).unwrap_or(&[]);
        !partners.iter().any(|&ti| {
            j.combine(s, Some(&target.rows[ti]), &mut buf);
            checks.iter().all(|c| c.holds(&buf, g))
        })
    });
    let violated: Vec<usize> = violated.collect();
    (source.rows.len(), to_matches(g, &source, violated.into_iter()))
}

fn outer(g: &PropertyGraph, ggd: &Ggd) -> (usize, Vec<Match>) {
    let source = rows(g, ggd, false, &[]);
    let target = rows(g, ggd, true, &[]);
    let j = Joined::new(&source, &target);
    let phi_s = j.compile(&ggd.source_constraints);
    let phi_t = j.compile(&ggd.target_constraints);
    let mut index: HashMap<Vec<ObjRef>, Vec<usize>> = HashMap::new();
    for (ti, t) in target.rows.iter().enumerate() {
        index.entry(j.key(t, true)).or_default().push(ti);
    }
    // Materialize the left outer join, then filter it.
    let mut joined: Vec<Vec<ObjRef>> = Vec::new();
    let mut origin: Vec<usize> = Vec::new();
    for (si, s) in source.rows.iter().enumerate() {
        let partners = index.get(&j.key(s, false)).map(Vec::as_slice).unwrap_or(&[]);
        if partners.is_empty() {
            let mut row = Vec::new();
            j.combine(s, None, &mut row);
            joined.push(row);
            origin.push(si);
        }
        for &ti in partners {
            let mut row = Vec::new();
            j.combine(s, Some(&target.rows[ti]), &mut row);
            joined.push(row);
            origin.push(si);
        }
    }
    let mut in_scope = vec![false; source.rows.len()];
    let mut witnessed = vec![false; source.rows.len()];
    for (row, &si) in joined.iter().zip(&origin) {
        let source_part = &row[..j.source_cols];
        if !phi_s.iter().all(|c| c.holds(source_part, g)) {
            continue;
        }
        in_scope[si] = true;
        // Null-extended rows exist only for source rows without partners.
        let has_target = index.contains_key(&j.key(source_part, false));
        if has_target && phi_t.iter().all(|c| c.holds(row, g)) {
            witnessed[si] = true;
        }
    }
    let count = in_scope.iter().filter(|x| **x).count();
    let violated = (0..source.rows.len()).filter(|&i| in_scope[i] && !witnessed[i]);
    (count, to_matches(g, &source, violated))
}

/// Alg. 1 style check: stops at the first source match without a
/// satisfying extension.
pub fn validate_ggd(g: &PropertyGraph, ggd: &Ggd) -> bool {
    let source = rows(g, ggd, false, &ggd.source_constraints);
    let target_vars = ggd.target.var_set();
    let mut fixed_names: Vec<String> = ggd.shared_vars();
    for c in &ggd.target_constraints {
        for v in c.vars() {
            if !target_vars.contains(v) && !fixed_names.iter().any(|f| f == v) {
                fixed_names.push(v.to_string());
            }
        }
    }
    let plan = plan_pattern(
        g,
        &ggd.target,
        &ggd.target_constraints,
        &fixed_names,
        PlanOptions::default(),
    );
    source.rows.iter().all(|s| {
        let fixed: BTreeMap<String, ObjRef> = fixed_names
            .iter()
            .map(|v| (v.clone(), s[source.column(v).expect("source variable")]))
            .collect();
        !plan.execute(g, &fixed).rows.is_empty()
    })
}

/// Reports for every GGD, in input order; `workers > 1` validates GGDs
/// concurrently.
pub fn validate_set(g: &PropertyGraph, sigma: &GgdSet, plan: PlanKind, workers: usize) -> Vec<ViolationReport> {
    let workers = workers.max(1).min(sigma.len().max(1));
    if workers == 1 {
        return sigma.iter().map(|ggd| find_violations(g, ggd, plan)).collect();
    }
    let mut slots: Vec<Option<ViolationReport>> = vec![None; sigma.len()];
    std::thread::scope(|scope| {
        let chunks: Vec<_> = slots
            .chunks_mut(sigma.len().div_ceil(workers))
            .enumerate()
            .map(|(ci, chunk)| (ci * sigma.len().div_ceil(workers), chunk))
            .collect();
        for (offset, chunk) in chunks {
            scope.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(find_violations(g, &sigma.ggds[offset + k], plan));
                }
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every GGD validated")).collect()
}
