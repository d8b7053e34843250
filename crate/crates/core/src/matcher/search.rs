use std::collections::{BTreeMap, HashMap};

use super::compiled::Compiled;
use super::plan::{ComponentPlan, Dir, JoinPlan, JoinStrategy, Plan, Step};
use super::{simjoin, RowSet, UNBOUND};
use crate::graph::{ObjRef, ObjectKind, PropertyGraph, Value};
use crate::lang::VarKind;

type Row = Vec<ObjRef>;

struct Ctx<'a> {
    plan: &'a Plan,
    g: &'a PropertyGraph,
    fixed: Vec<Option<ObjRef>>,
}

impl Ctx<'_> {
    fn admissible(&self, var: usize, r: ObjRef) -> bool {
        if self.fixed[var].is_some_and(|f| f != r) {
            return false;
        }
        let spec = &self.plan.vars[var];
        let o = self.g.obj(r);
        let kind_ok = match spec.kind {
            Some(VarKind::Vertex) => o.kind == ObjectKind::Vertex,
            Some(VarKind::Edge) => o.kind == ObjectKind::Edge,
            None => true,
        };
        kind_ok && (spec.label.is_wildcard() || o.has_label(spec.label.as_str()))
    }

    /// Binds or checks `var`; newly bound columns are pushed to `newly`.
    fn bind(&self, row: &mut Row, var: usize, r: ObjRef, newly: &mut Vec<usize>) -> bool {
        if row[var] != UNBOUND {
            return row[var] == r;
        }
        if !self.admissible(var, r) {
            return false;
        }
        row[var] = r;
        newly.push(var);
        true
    }

    fn bind_edge(&self, row: &mut Row, edge: usize, r: ObjRef, newly: &mut Vec<usize>) -> bool {
        let Some((a, b)) = self.plan.vars[edge].ends else {
            return false;
        };
        let Some((s, t)) = self.g.ends(r) else {
            return false;
        };
        self.bind(row, edge, r, newly) && self.bind(row, a, s, newly) && self.bind(row, b, t, newly)
    }

    fn filters_hold(&self, row: &Row, filters: &[usize]) -> bool {
        filters.iter().all(|&f| self.plan.constraints[f].holds(row, self.g))
    }

    fn dfs(&self, comp: &ComponentPlan, i: usize, row: &mut Row, out: &mut Vec<Row>) {
        let Some((step, filters)) = comp.steps.get(i) else {
            out.push(row.clone());
            return;
        };
        let mut attempt = |row: &mut Row, bind: &dyn Fn(&mut Row, &mut Vec<usize>) -> bool| {
            let mut newly = Vec::new();
            if bind(row, &mut newly) && self.filters_hold(row, filters) {
                self.dfs(comp, i + 1, row, out);
            }
            for v in newly {
                row[v] = UNBOUND;
            }
        };
        match step {
            Step::Fixed { var } => {
                if let Some(r) = self.fixed[*var] {
                    attempt(row, &|row, newly| self.bind(row, *var, r, newly));
                }
            }
            Step::Scan { var } => {
                let spec = &self.plan.vars[*var];
                let single;
                let candidates: &[ObjRef] = match self.fixed[*var] {
                    Some(r) => {
                        single = [r];
                        &single
                    }
                    None => {
                        let kind = match spec.kind {
                            Some(VarKind::Edge) => ObjectKind::Edge,
                            _ => ObjectKind::Vertex,
                        };
                        self.g.refs_with_label(kind, spec.label.as_str())
                    }
                };
                let is_edge = spec.kind == Some(VarKind::Edge);
                for &r in candidates {
                    if is_edge {
                        attempt(row, &|row, newly| self.bind_edge(row, *var, r, newly));
                    } else {
                        attempt(row, &|row, newly| self.bind(row, *var, r, newly));
                    }
                }
            }
            Step::Expand { edge, from, dir, other } => {
                let v = row[*from];
                let edges = match dir {
                    Dir::Out => self.g.out_edges(v),
                    Dir::In => self.g.in_edges(v),
                };
                for &e in edges {
                    let Some((s, t)) = self.g.ends(e) else { continue };
                    let o = if *dir == Dir::Out { t } else { s };
                    attempt(row, &|row, newly| {
                        self.bind(row, *edge, e, newly) && self.bind(row, *other, o, newly)
                    });
                }
            }
        }
    }
}

impl Plan {
    /// Runs the plan; `fixed` pre-binds variables by name.
    pub fn execute(&self, g: &PropertyGraph, fixed: &BTreeMap<String, ObjRef>) -> RowSet {
        let vars = self.var_names();
        let empty = RowSet {
            vars: vars.clone(),
            rows: Vec::new(),
        };
        if self.infeasible {
            return empty;
        }
        let ctx = Ctx {
            plan: self,
            g,
            fixed: self.vars.iter().map(|v| fixed.get(&v.name).copied()).collect(),
        };
        let n = self.vars.len();
        if self.components.is_empty() {
            return RowSet {
                vars,
                rows: vec![Vec::new()],
            };
        }
        let run = |ci: usize| {
            let mut out = Vec::new();
            let mut row = vec![UNBOUND; n];
            ctx.dfs(&self.components[ci], 0, &mut row, &mut out);
            out
        };
        let mut acc = run(self.first);
        for j in &self.joins {
            if acc.is_empty() {
                return empty;
            }
            let right = run(j.component);
            acc = self.join(g, acc, right, j);
        }
        RowSet { vars, rows: acc }
    }

    fn join(&self, g: &PropertyGraph, left: Vec<Row>, right: Vec<Row>, j: &JoinPlan) -> Vec<Row> {
        if right.is_empty() {
            return Vec::new();
        }
        let right_cols: Vec<usize> = self.components[j.component].vars.clone();
        let on_right = |c: usize| right_cols.contains(&c);
        let pairs: Vec<(usize, usize)> = match (j.strategy, j.key.map(|k| &self.constraints[k])) {
            (JoinStrategy::Identity, Some(Compiled::IdEq(a, b))) => {
                let (lc, rc) = if on_right(*b) { (*a, *b) } else { (*b, *a) };
                let mut index: HashMap<ObjRef, Vec<usize>> = HashMap::new();
                for (ri, r) in right.iter().enumerate() {
                    index.entry(r[rc]).or_default().push(ri);
                }
                left.iter()
                    .enumerate()
                    .flat_map(|(li, l)| index.get(&l[lc]).into_iter().flatten().map(move |&ri| (li, ri)))
                    .collect()
            }
            (JoinStrategy::EqualValue, Some(Compiled::Attr { l, lk, r, rk, .. })) => {
                let ((lc, lkey), (rc, rkey)) = if on_right(*r) {
                    ((*l, lk), (*r, rk))
                } else {
                    ((*r, rk), (*l, lk))
                };
                let mut index: HashMap<&Value, Vec<usize>> = HashMap::new();
                for (ri, row) in right.iter().enumerate() {
                    if let Some(v) = g.obj(row[rc]).visible_property(rkey) {
                        index.entry(v).or_default().push(ri);
                    }
                }
                let mut pairs = Vec::new();
                for (li, row) in left.iter().enumerate() {
                    if let Some(v) = g.obj(row[lc]).visible_property(lkey) {
                        pairs.extend(index.get(v).into_iter().flatten().map(|&ri| (li, ri)));
                    }
                }
                pairs
            }
            (
                JoinStrategy::EditSimilarity | JoinStrategy::JaccardSimilarity | JoinStrategy::NumericBand,
                Some(c @ Compiled::Attr { l, lk, r, rk, .. }),
            ) => {
                let ((lc, lkey), (rc, rkey)) = if on_right(*r) {
                    ((*l, lk), (*r, rk))
                } else {
                    ((*r, rk), (*l, lk))
                };
                let side = |rows: &[Row], col: usize, key: &str| -> Vec<Option<Value>> {
                    rows.iter()
                        .map(|row| g.obj(row[col]).visible_property(key).cloned())
                        .collect()
                };
                let (lv, rv) = (side(&left, lc, lkey), side(&right, rc, rkey));
                let bound = c.upper_bound().expect("bounded linking constraint");
                match j.strategy {
                    JoinStrategy::EditSimilarity => simjoin::edit_pairs(&lv, &rv, bound.floor() as usize),
                    JoinStrategy::JaccardSimilarity => simjoin::jaccard_pairs(&lv, &rv, bound),
                    _ => simjoin::band_pairs(&lv, &rv, bound),
                }
            }
            _ => (0..left.len())
                .flat_map(|li| (0..right.len()).map(move |ri| (li, ri)))
                .collect(),
        };
        let mut out = Vec::with_capacity(pairs.len());
        for (li, ri) in pairs {
            let mut row = left[li].clone();
            for &c in &right_cols {
                row[c] = right[ri][c];
            }
            if j.checks.iter().all(|&k| self.constraints[k].holds(&row, g)) {
                out.push(row);
            }
        }
        out
    }
}
