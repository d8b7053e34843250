//! Decision procedures over GGD sets: pattern intersection, satisfiability
//! on a canonical graph, implication on a closure graph, weak acyclicity.

mod acyclic;
mod intersect;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::Serialize;

use crate::chase::extract_model;
use crate::chase::{deducible, pending_split, run_chase, ChaseConfig, ChaseState, ChaseVerdict, FireMode};
use crate::graph::{GraphBuilder, PropertyGraph};
use crate::lang::{feasible, Constraint, Ggd, GgdSet, GraphPattern, Label};
use crate::matcher::Match;
use crate::validator::{validate_set, PlanKind};

pub use self::acyclic::{is_weakly_acyclic, DependencyGraph, EdgeKind, Position, ENTITY_KEY};
pub use self::intersect::{interacts, intersect_patterns, IntersectError, Intersection, Side, INTERSECT_NODE_LIMIT};

/// Case splits allowed per implication check.
pub const SPLIT_LIMIT: usize = 256;

/// Source images of GGDs as a graph. Object ids are `<ggd>.<var>` of the
/// GGD that introduced them.
#[derive(Debug, Clone)]
pub struct CanonicalGraph {
    pub graph: PropertyGraph,
    /// `φ_s` of every image, over object ids.
    pub seeds: Vec<Constraint>,
    /// Object id to the GGD that introduced it.
    pub provenance: BTreeMap<String, String>,
    /// Per GGD, each source variable's object id.
    pub images: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Default)]
struct Builder {
    pattern: GraphPattern,
    seeds: Vec<Constraint>,
    provenance: BTreeMap<String, String>,
    images: BTreeMap<String, BTreeMap<String, String>>,
}

impl Builder {
    fn add(&mut self, ggd: &Ggd, alias: &BTreeMap<String, String>) {
        let id = |v: &str| alias.get(v).cloned().unwrap_or_else(|| format!("{}.{v}", ggd.name));
        for v in &ggd.source.vertices {
            if !alias.contains_key(&v.var) {
                self.pattern.vertex(&id(&v.var), v.label.as_str());
                self.provenance.insert(id(&v.var), ggd.name.clone());
            }
        }
        for e in &ggd.source.edges {
            if !alias.contains_key(&e.var) {
                self.pattern
                    .edge(&id(&e.var), e.label.as_str(), &id(&e.from), &id(&e.to));
                self.provenance.insert(id(&e.var), ggd.name.clone());
            }
        }
        self.seeds.extend(ggd.source_constraints.iter().map(|c| c.rename(&id)));
        let image = ggd.source.variables().iter().map(|v| (v.to_string(), id(v))).collect();
        self.images.insert(ggd.name.clone(), image);
    }

    fn finish(self) -> CanonicalGraph {
        let set = |l: &Label| match l {
            Label::Named(n) => BTreeSet::from([n.clone()]),
            Label::Wildcard => BTreeSet::new(),
        };
        let mut b = GraphBuilder::new();
        for v in &self.pattern.vertices {
            b.vertex(v.var.clone(), set(&v.label), BTreeMap::new());
        }
        for e in &self.pattern.edges {
            b.edge(
                e.var.clone(),
                e.from.clone(),
                e.to.clone(),
                set(&e.label),
                BTreeMap::new(),
            );
        }
        CanonicalGraph {
            graph: b.build().expect("images of valid patterns"),
            seeds: self.seeds,
            provenance: self.provenance,
            images: self.images,
        }
    }
}

/// One source image per GGD, in declaration order. With `alias`, variables
/// in the maximal intersection with the graph built so far reuse the
/// objects they correspond to; otherwise images are disjoint.
pub fn build_canonical_graph(sigma: &GgdSet, alias: bool) -> Result<CanonicalGraph, IntersectError> {
    let mut b = Builder::default();
    for ggd in sigma {
        let map = if alias && !b.pattern.vertices.is_empty() {
            intersect_patterns(&ggd.source, &ggd.source_constraints, &b.pattern, &b.seeds)?.map
        } else {
            BTreeMap::new()
        };
        b.add(ggd, &map);
    }
    Ok(b.finish())
}

/// The source image of `σ` alone.
pub fn build_closure_graph(sigma: &Ggd) -> Result<CanonicalGraph, String> {
    if !feasible(&sigma.source_constraints) {
        return Err(format!("source constraints of `{}` are infeasible", sigma.name));
    }
    let mut b = Builder::default();
    b.add(sigma, &BTreeMap::new());
    Ok(b.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SatVerdict {
    Satisfiable,
    Unsatisfiable,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub verdict: SatVerdict,
    /// A graph satisfying every GGD with at least one source match each.
    pub witness: Option<PropertyGraph>,
    /// Step log line of the failing step, or a diagnostic.
    pub reason: Option<String>,
    pub steps: usize,
    pub ms: f64,
}

enum Attempt {
    Sat(PropertyGraph, usize),
    Unsat(String, usize),
    Unknown(String, usize),
}

fn attempt(sigma: &GgdSet, canon: CanonicalGraph, cap: usize) -> Attempt {
    let mut state = ChaseState::new(canon.graph, false);
    if let Err(e) = state.assume(&canon.seeds) {
        return Attempt::Unsat(format!("source images conflict: {e}"), 0);
    }
    let out = run_chase(
        state,
        sigma,
        ChaseConfig {
            cap,
            mode: FireMode::Compatible,
        },
    );
    let steps = out.state.steps();
    match out.verdict {
        ChaseVerdict::StepCapExceeded => Attempt::Unknown(format!("step cap {cap} exceeded"), steps),
        ChaseVerdict::Inconsistent { .. } => {
            let line = out.state.log().last().map(|r| r.to_string()).unwrap_or_default();
            Attempt::Unsat(line, steps)
        }
        ChaseVerdict::TerminatedValid => match extract_model(&out.state) {
            Err(e) => Attempt::Unknown(format!("model extraction failed: {e}"), steps),
            Ok(g) => {
                let reports = validate_set(&g, sigma, PlanKind::Anti, 1);
                match reports.iter().find(|r| !r.is_valid()) {
                    None => Attempt::Sat(g, steps),
                    Some(r) => Attempt::Unknown(format!("extracted witness violates `{}`", r.ggd), steps),
                }
            }
        },
    }
}

/// Chases the canonical graph. The aliased graph is tried first; the
/// disjoint one decides when the aliased attempt does not yield a model.
/// Unsatisfiable needs both to fail.
pub fn check_satisfiability(sigma: &GgdSet, cap: usize) -> SatResult {
    let start = Instant::now();
    let done = |verdict, witness, reason: Option<String>, steps| SatResult {
        verdict,
        witness,
        reason,
        steps,
        ms: start.elapsed().as_secs_f64() * 1000.0,
    };
    for ggd in sigma {
        if !feasible(&ggd.source_constraints) {
            return done(
                SatVerdict::Unsatisfiable,
                None,
                Some(format!("source constraints of `{}` are infeasible", ggd.name)),
                0,
            );
        }
    }
    let mut first: Option<Attempt> = None;
    for alias in [true, false] {
        let canon = match build_canonical_graph(sigma, alias) {
            Ok(c) => c,
            Err(e) => return done(SatVerdict::Unknown, None, Some(e.to_string()), 0),
        };
        match attempt(sigma, canon, cap) {
            Attempt::Sat(g, steps) => return done(SatVerdict::Satisfiable, Some(g), None, steps),
            other if first.is_none() => first = Some(other),
            Attempt::Unsat(..) => {}
            unknown => first = Some(unknown),
        }
    }
    match first.expect("at least one attempt") {
        Attempt::Unsat(why, steps) => done(SatVerdict::Unsatisfiable, None, Some(why), steps),
        Attempt::Unknown(why, steps) => done(SatVerdict::Unknown, None, Some(why), steps),
        Attempt::Sat(..) => unreachable!("satisfiable attempts return early"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ImplVerdict {
    Implied,
    NotImplied,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ImplResult {
    pub verdict: ImplVerdict,
    pub reason: Option<String>,
    pub steps: usize,
    /// Case branches explored.
    pub branches: usize,
    pub ms: f64,
}

/// Whether `sigma ⊨ target`.
///
/// The closure graph is chased with GGDs firing only when forced. When a
/// GGD could fire but is not forced to, the check splits into the branch
/// where its source constraints hold and one branch per complementary
/// comparison of each of them; every consistent branch must deduce the
/// target. Attributes mentioned by constraints are taken to be present.
pub fn check_implication(sigma: &GgdSet, target: &Ggd, cap: usize) -> ImplResult {
    let start = Instant::now();
    let done = |verdict, reason: Option<String>, steps, branches| ImplResult {
        verdict,
        reason,
        steps,
        branches,
        ms: start.elapsed().as_secs_f64() * 1000.0,
    };
    let canon = match build_closure_graph(target) {
        Ok(c) => c,
        Err(e) => return done(ImplVerdict::Implied, Some(format!("vacuous: {e}")), 0, 0),
    };
    let hs: Match = canon.images[&target.name].clone();
    let mut root = ChaseState::new(canon.graph, false);
    if let Err(e) = root.assume(&canon.seeds) {
        return done(ImplVerdict::Implied, Some(format!("vacuous: {e}")), 0, 0);
    }
    let mut stack = vec![root];
    let mut steps = 0;
    let mut branches = 0;
    while let Some(state) = stack.pop() {
        branches += 1;
        if branches > SPLIT_LIMIT {
            return done(
                ImplVerdict::Unknown,
                Some(format!("more than {SPLIT_LIMIT} case branches")),
                steps,
                branches,
            );
        }
        let before = state.steps();
        let out = run_chase(
            state,
            sigma,
            ChaseConfig {
                cap,
                mode: FireMode::Entailed,
            },
        );
        steps += out.state.steps() - before;
        match out.verdict {
            ChaseVerdict::StepCapExceeded => {
                return done(
                    ImplVerdict::Unknown,
                    Some(format!("step cap {cap} exceeded")),
                    steps,
                    branches,
                )
            }
            ChaseVerdict::Inconsistent { reason, .. } => {
                return done(
                    ImplVerdict::NotImplied,
                    Some(format!("inconsistent closure: {reason}")),
                    steps,
                    branches,
                )
            }
            ChaseVerdict::TerminatedValid => {}
        }
        let state = out.state;
        if let Some(split) = pending_split(&state, sigma) {
            let mut cases: Vec<Vec<Constraint>> = vec![split.open.clone()];
            for c in &split.open {
                cases.extend(c.negations().into_iter().map(|neg| vec![neg]));
            }
            for case in cases.into_iter().rev() {
                let mut next = state.clone();
                if next.assume(&case).is_ok() {
                    stack.push(next);
                }
            }
            continue;
        }
        if !deducible(&state, target, &hs) {
            let hint = if branches > 1 { " in some case" } else { "" };
            return done(
                ImplVerdict::NotImplied,
                Some(format!("target not deducible{hint}")),
                steps,
                branches,
            );
        }
    }
    done(ImplVerdict::Implied, None, steps, branches)
}
