use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::compiled::Compiled;
use crate::graph::{ObjectKind, PropertyGraph};
use crate::lang::{feasible, Constraint, DistanceFn, GraphPattern, Label, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanOptions {
    /// Order scans and expansions by ascending label frequency instead of
    /// declaration order.
    pub greedy_order: bool,
    /// Combine components with index or similarity joins where a linking
    /// constraint allows it, instead of nested loops.
    pub use_similarity_joins: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            greedy_order: true,
            use_similarity_joins: true,
        }
    }
}

/// How two components are combined, best first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum JoinStrategy {
    Identity,
    EqualValue,
    EditSimilarity,
    JaccardSimilarity,
    NumericBand,
    NestedLoop,
    CrossProduct,
}

impl JoinStrategy {
    pub fn name(self) -> &'static str {
        match self {
            JoinStrategy::Identity => "hash join on identity",
            JoinStrategy::EqualValue => "hash join on value",
            JoinStrategy::EditSimilarity => "edit-distance similarity join",
            JoinStrategy::JaccardSimilarity => "jaccard similarity join",
            JoinStrategy::NumericBand => "numeric band join",
            JoinStrategy::NestedLoop => "nested loop",
            JoinStrategy::CrossProduct => "cross product",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    Out,
    In,
}

#[derive(Debug, Clone)]
pub(crate) enum Step {
    /// Enumerate candidates by label; an edge also binds its endpoints.
    Scan { var: usize },
    /// Follow edges of the bound vertex `from`, binding `edge` and `other`.
    Expand {
        edge: usize,
        from: usize,
        dir: Dir,
        other: usize,
    },
    /// A variable outside the pattern whose object is supplied by the caller.
    Fixed { var: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct VarSpec {
    pub name: String,
    pub kind: Option<VarKind>,
    pub label: Label,
    pub ends: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub(crate) struct ComponentPlan {
    pub vars: Vec<usize>,
    /// Each step with the constraints that become checkable after it.
    pub steps: Vec<(Step, Vec<usize>)>,
}

#[derive(Debug, Clone)]
pub(crate) struct JoinPlan {
    pub component: usize,
    pub strategy: JoinStrategy,
    pub key: Option<usize>,
    pub checks: Vec<usize>,
}

/// An executable plan for one pattern and constraint set.
#[derive(Debug, Clone)]
pub struct Plan {
    pub(crate) vars: Vec<VarSpec>,
    pub(crate) constraints: Vec<Compiled>,
    pub(crate) sources: Vec<Constraint>,
    pub(crate) components: Vec<ComponentPlan>,
    pub(crate) first: usize,
    pub(crate) joins: Vec<JoinPlan>,
    pub(crate) infeasible: bool,
    pub warnings: Vec<String>,
}

/// Plans `pattern` under `phi`. Variables in `fixed` are supplied at
/// execution; those outside the pattern may only appear in `phi`.
pub fn plan_pattern(
    g: &PropertyGraph,
    pattern: &GraphPattern,
    phi: &[Constraint],
    fixed: &[String],
    opts: PlanOptions,
) -> Plan {
    let mut vars: Vec<VarSpec> = Vec::new();
    for v in &pattern.vertices {
        vars.push(VarSpec {
            name: v.var.clone(),
            kind: Some(VarKind::Vertex),
            label: v.label.clone(),
            ends: None,
        });
    }
    let index = |vars: &[VarSpec], name: &str| vars.iter().position(|v| v.name == name);
    for e in &pattern.edges {
        let ends = (
            index(&vars, &e.from).expect("declared endpoint"),
            index(&vars, &e.to).expect("declared endpoint"),
        );
        vars.push(VarSpec {
            name: e.var.clone(),
            kind: Some(VarKind::Edge),
            label: e.label.clone(),
            ends: Some(ends),
        });
    }
    for f in fixed {
        if index(&vars, f).is_none() {
            vars.push(VarSpec {
                name: f.clone(),
                kind: None,
                label: Label::Wildcard,
                ends: None,
            });
        }
    }
    let col = |name: &str| index(&vars, name).unwrap_or_else(|| panic!("constraint variable `{name}` is not planned"));
    let constraints: Vec<Compiled> = phi.iter().map(|c| Compiled::new(c, &col)).collect();
    let fixed_cols: BTreeSet<usize> = fixed.iter().filter_map(|f| index(&vars, f)).collect();

    // Connected components over vertex variables; edges follow their endpoints.
    let n = vars.len();
    let mut comp_of: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (i, v) in vars.iter().enumerate() {
        if let Some((a, b)) = v.ends {
            for end in [a, b] {
                let (ri, re) = (root(&mut comp_of, i), root(&mut comp_of, end));
                if ri != re {
                    comp_of[ri.max(re)] = ri.min(re);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of_root: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = root(&mut comp_of, i);
        let gi = *group_of_root[r].get_or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[gi].push(i);
    }

    let count = |v: &VarSpec| -> usize {
        match v.kind {
            Some(VarKind::Vertex) => g.refs_with_label(ObjectKind::Vertex, v.label.as_str()).len(),
            Some(VarKind::Edge) => g.refs_with_label(ObjectKind::Edge, v.label.as_str()).len(),
            None => 1,
        }
    };

    let mut assigned = vec![false; constraints.len()];
    let mut components = Vec::new();
    for members in &groups {
        let member_set: BTreeSet<usize> = members.iter().copied().collect();
        let mut bound: BTreeSet<usize> = BTreeSet::new();
        let mut steps: Vec<(Step, Vec<usize>)> = Vec::new();
        let start = if let Some(&f) = members.iter().find(|m| fixed_cols.contains(m)) {
            f
        } else if opts.greedy_order {
            *members.iter().min_by_key(|&&m| (count(&vars[m]), m)).unwrap()
        } else {
            members[0]
        };
        let first = if vars[start].kind.is_none() {
            Step::Fixed { var: start }
        } else {
            Step::Scan { var: start }
        };
        bound.insert(start);
        if let Some((a, b)) = vars[start].ends {
            bound.insert(a);
            bound.insert(b);
        }
        steps.push((first, Vec::new()));
        while bound.len() < members.len() {
            let mut options: Vec<((usize, usize, usize, usize), Step)> = Vec::new();
            for &e in members {
                let Some((a, b)) = vars[e].ends else { continue };
                if bound.contains(&e) {
                    continue;
                }
                let (from, dir, other) = if bound.contains(&a) {
                    (a, Dir::Out, b)
                } else if bound.contains(&b) {
                    (b, Dir::In, a)
                } else {
                    continue;
                };
                let score = if opts.greedy_order {
                    (
                        usize::from(!bound.contains(&other)),
                        count(&vars[e]),
                        count(&vars[other]),
                        e,
                    )
                } else {
                    (0, 0, 0, e)
                };
                options.push((
                    score,
                    Step::Expand {
                        edge: e,
                        from,
                        dir,
                        other,
                    },
                ));
            }
            let (_, step) = options
                .into_iter()
                .min_by_key(|(s, _)| *s)
                .expect("component is connected");
            if let Step::Expand { edge, other, .. } = step {
                bound.insert(edge);
                bound.insert(other);
            }
            steps.push((step, Vec::new()));
        }
        // Attach each constraint to the first step after which it is checkable.
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for (step, filters) in steps.iter_mut() {
            match step {
                Step::Scan { var } | Step::Fixed { var } => {
                    seen.insert(*var);
                    if let Some((a, b)) = vars[*var].ends {
                        seen.insert(a);
                        seen.insert(b);
                    }
                }
                Step::Expand { edge, other, .. } => {
                    seen.insert(*edge);
                    seen.insert(*other);
                }
            }
            for (ci, c) in constraints.iter().enumerate() {
                if !assigned[ci] && c.columns().iter().all(|x| seen.contains(x) && member_set.contains(x)) {
                    assigned[ci] = true;
                    filters.push(ci);
                }
            }
        }
        components.push(ComponentPlan {
            vars: members.clone(),
            steps,
        });
    }

    let first = components
        .iter()
        .position(|c| c.vars.iter().any(|v| fixed_cols.contains(v)))
        .unwrap_or(0);
    let mut acc: BTreeSet<usize> = components
        .get(first)
        .map(|c| c.vars.iter().copied().collect())
        .unwrap_or_default();
    let mut remaining: Vec<usize> = (0..components.len()).filter(|&c| c != first).collect();
    let mut joins = Vec::new();
    let mut warnings = Vec::new();
    while !remaining.is_empty() {
        let mut best: Option<(JoinStrategy, usize, Option<usize>, Vec<usize>)> = None;
        for (pos, &ci) in remaining.iter().enumerate() {
            let cvars: BTreeSet<usize> = components[ci].vars.iter().copied().collect();
            let linking: Vec<usize> = (0..constraints.len())
                .filter(|&k| !assigned[k])
                .filter(|&k| {
                    let cols = constraints[k].columns();
                    cols.iter().all(|c| acc.contains(c) || cvars.contains(c))
                        && cols.iter().any(|c| acc.contains(c))
                        && cols.iter().any(|c| cvars.contains(c))
                })
                .collect();
            let (strategy, key) = if linking.is_empty() {
                (JoinStrategy::CrossProduct, None)
            } else if !opts.use_similarity_joins {
                (JoinStrategy::NestedLoop, None)
            } else {
                linking
                    .iter()
                    .map(|&k| (strategy_for(&constraints[k]), Some(k)))
                    .min_by_key(|(s, k)| (*s, *k))
                    .unwrap()
            };
            if best.as_ref().map_or(true, |b| strategy < b.0) {
                best = Some((strategy, pos, key, linking));
            }
        }
        let (strategy, pos, key, checks) = best.unwrap();
        let ci = remaining.remove(pos);
        for &k in &checks {
            assigned[k] = true;
        }
        if strategy == JoinStrategy::CrossProduct {
            let names: Vec<&str> = components[ci].vars.iter().map(|&v| vars[v].name.as_str()).collect();
            warnings.push(format!(
                "no constraint links {{{}}} to the rest of the pattern; using a cross product",
                names.join(", ")
            ));
        }
        acc.extend(components[ci].vars.iter().copied());
        joins.push(JoinPlan {
            component: ci,
            strategy,
            key,
            checks,
        });
    }
    debug_assert!(assigned.iter().all(|a| *a));

    Plan {
        vars,
        constraints,
        sources: phi.to_vec(),
        components,
        first,
        joins,
        infeasible: !feasible(phi),
        warnings,
    }
}

fn strategy_for(c: &Compiled) -> JoinStrategy {
    match c {
        Compiled::IdEq(..) => JoinStrategy::Identity,
        Compiled::Attr { d, .. } => {
            let ub = c.upper_bound();
            match d {
                _ if c.forces_equal() => JoinStrategy::EqualValue,
                DistanceFn::Edit if ub.is_some() => JoinStrategy::EditSimilarity,
                DistanceFn::Jaccard if ub.is_some_and(|u| u < 1.0) => JoinStrategy::JaccardSimilarity,
                DistanceFn::AbsDiff if ub.is_some() => JoinStrategy::NumericBand,
                _ => JoinStrategy::NestedLoop,
            }
        }
        _ => JoinStrategy::NestedLoop,
    }
}

impl Plan {
    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|v| v.name.clone()).collect()
    }

    /// Join strategies in execution order.
    pub fn strategies(&self) -> Vec<JoinStrategy> {
        self.joins.iter().map(|j| j.strategy).collect()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Human-readable plan dump.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        if self.infeasible {
            out.push_str("constraints are infeasible: empty result without scanning\n");
        }
        let name = |v: usize| self.vars[v].name.as_str();
        let spec = |v: usize| format!("{}:{}", name(v), self.vars[v].label);
        let mut order = vec![self.first];
        order.extend(self.joins.iter().map(|j| j.component));
        for (i, &ci) in order.iter().enumerate() {
            let comp = &self.components[ci];
            let names: Vec<&str> = comp.vars.iter().map(|&v| name(v)).collect();
            if i == 0 {
                let _ = writeln!(out, "component {{{}}}", names.join(", "));
            } else {
                let j = &self.joins[i - 1];
                let _ = writeln!(out, "join component {{{}}} by {}", names.join(", "), j.strategy.name());
                if let Some(k) = j.key {
                    let _ = writeln!(out, "  key {}", self.sources[k]);
                }
            }
            for (step, filters) in &comp.steps {
                match step {
                    Step::Scan { var } => {
                        let _ = writeln!(out, "  scan {}", spec(*var));
                    }
                    Step::Fixed { var } => {
                        let _ = writeln!(out, "  bound {}", name(*var));
                    }
                    Step::Expand { edge, from, dir, other } => {
                        let arrow = match dir {
                            Dir::Out => "out",
                            Dir::In => "in",
                        };
                        let _ = writeln!(
                            out,
                            "  expand {} {arrow} of {} to {}",
                            spec(*edge),
                            name(*from),
                            spec(*other)
                        );
                    }
                }
                for &f in filters {
                    let _ = writeln!(out, "    filter {}", self.sources[f]);
                }
            }
            if i > 0 {
                for &k in &self.joins[i - 1].checks {
                    let _ = writeln!(out, "  check {}", self.sources[k]);
                }
            }
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
