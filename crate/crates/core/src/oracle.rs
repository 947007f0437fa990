//! Brute-force model finder over small scopes, used to cross-check the
//! evaluator.
//!
//! Universes are enumerated by atom count per concrete sig (odometer
//! order, first sig slowest, counts ascending). Within a universe, sigs
//! with a fixed extent are known; subset sigs and fields are unknowns.
//! Unknowns are settled in three ways: a top-level `X = e` or `no X`
//! conjunct whose other side is already known fixes `X`; a top-level
//! `some` quantifier is expanded over every binding of its variables;
//! anything else is branched over every subset of its bound, in bitmask
//! order. Every conjunct is evaluated once all the names it mentions are
//! settled, so a returned witness satisfies the whole formula.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::eval::{eval_expr, eval_formula, Env, Instance, Tuple, TupleSet};
use crate::schema::{parse_formula_block, FieldMultiplicity, ModelSchema};
use crate::syntax::{CompareOp, Expr, ExprKind, Formula, FormulaKind, Mult, MultKind, QuantKind, QuantVar, SigMultiplicity};
use crate::valuation::Valuation;

pub const MAX_UNIVERSE: usize = 12;
/// Largest bound (in tuples) the search will branch over.
pub const MAX_BRANCH_TUPLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Scope {
    pub default: usize,
    pub per_sig: BTreeMap<String, usize>,
}

impl Default for Scope {
    fn default() -> Self {
        Scope::uniform(3)
    }
}

impl Scope {
    pub fn uniform(n: usize) -> Self {
        Scope {
            default: n,
            per_sig: BTreeMap::new(),
        }
    }

    pub fn of(&self, sig: &str) -> usize {
        self.per_sig.get(sig).copied().unwrap_or(self.default)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("scope allows {total} atoms, more than the limit of {limit}")]
    UniverseTooLarge { total: usize, limit: usize },
    #[error("`{relation}` would need branching over {tuples} candidate tuples (limit {limit})")]
    SearchTooLarge {
        relation: String,
        tuples: usize,
        limit: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleOutcome {
    pub sat: bool,
    pub witness: Option<Valuation>,
    pub universes_examined: u64,
}

/// Whether some valuation within `scope` satisfies the model's structural
/// constraints, its facts, and `formula`.
pub fn enumerate_satisfiable(
    schema: &ModelSchema,
    formula: &Formula,
    scope: &Scope,
) -> Result<OracleOutcome, OracleError> {
    let concrete = schema.concrete_sigs();
    let total: usize = concrete.iter().map(|s| scope.of(s)).sum();
    if total > MAX_UNIVERSE {
        return Err(OracleError::UniverseTooLarge {
            total,
            limit: MAX_UNIVERSE,
        });
    }
    let implicit = implicit_constraints(schema);
    let mut roots: Vec<&Formula> = Vec::new();
    for f in implicit.iter().chain(&schema.facts).chain(std::iter::once(formula)) {
        roots.extend(f.conjuncts());
    }
    let goals: Vec<Goal> = roots
        .into_iter()
        .map(|f| Goal {
            formula: f,
            bindings: Vec::new(),
        })
        .collect();

    let mut deps = Deps::new(schema);
    let mut counts = vec![0usize; concrete.len()];
    let mut examined = 0;
    loop {
        examined += 1;
        let mut search = Search::new(schema, &concrete, &counts, &mut deps);
        if search.run(&goals)? {
            return Ok(OracleOutcome {
                sat: true,
                witness: search.witness,
                universes_examined: examined,
            });
        }
        // Odometer step, last sig fastest.
        let mut i = concrete.len();
        loop {
            if i == 0 {
                return Ok(OracleOutcome {
                    sat: false,
                    witness: None,
                    universes_examined: examined,
                });
            }
            i -= 1;
            if counts[i] < scope.of(concrete[i]) {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
        }
    }
}

/// Parse `formula_text` against `schema` and decide it.
pub fn check_text(schema: &ModelSchema, formula_text: &str, scope: &Scope) -> Result<OracleOutcome, String> {
    let f = parse_formula_block(formula_text, schema).map_err(|e| e.to_string())?;
    enumerate_satisfiable(schema, &f, scope).map_err(|e| e.to_string())
}

fn fresh(schema: &ModelSchema, base: &str, taken: &mut HashSet<String>) -> String {
    let mut name = base.to_string();
    while schema.declares(&name) || taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

fn mult_kind(m: Mult) -> Option<MultKind> {
    match m {
        Mult::Set => None,
        Mult::Some => Some(MultKind::Some),
        Mult::Lone => Some(MultKind::Lone),
        Mult::One => Some(MultKind::One),
    }
}

/// The constraints implied by sig and field declarations, as formulas.
/// Disjointness and containment along `extends` edges are built into how
/// universes are constructed and are not repeated here.
pub fn implicit_constraints(schema: &ModelSchema) -> Vec<Formula> {
    let mut lines = Vec::new();
    for sig in &schema.sigs {
        match sig.multiplicity {
            SigMultiplicity::One => lines.push(format!("one {}", sig.name)),
            SigMultiplicity::Lone => lines.push(format!("lone {}", sig.name)),
            SigMultiplicity::Some => lines.push(format!("some {}", sig.name)),
            SigMultiplicity::Any => {}
        }
        if sig.is_subset() {
            for parent in schema.parents(&sig.name) {
                lines.push(format!("{} in {parent}", sig.name));
            }
        }
    }
    for field in &schema.fields {
        let ty: Vec<&str> = field.column_types().collect();
        lines.push(format!("{} in {}", field.name, ty.join("->")));
        let mut taken = HashSet::new();
        let owner = fresh(schema, "o", &mut taken);
        match &field.multiplicity {
            FieldMultiplicity::Binary(m) => {
                if let Some(k) = mult_kind(*m) {
                    lines.push(format!(
                        "all {owner} : {} | {} {owner}.{}",
                        field.owner,
                        k.as_str(),
                        field.name
                    ));
                }
            }
            FieldMultiplicity::Arrows(arrows) => {
                let vars: Vec<String> = (0..field.columns.len())
                    .map(|i| fresh(schema, &format!("c{i}"), &mut taken))
                    .collect();
                let rel = format!("{owner}.{}", field.name);
                for (i, arrow) in arrows.iter().enumerate() {
                    if let Some(k) = mult_kind(arrow.right) {
                        let decls: Vec<String> = (0..=i)
                            .map(|j| format!("{} : {}", vars[j], field.columns[j]))
                            .collect();
                        let expr = (0..=i).fold(rel.clone(), |acc, j| format!("{}.({acc})", vars[j]));
                        lines.push(format!(
                            "all {owner} : {}, {} | {} {expr}",
                            field.owner,
                            decls.join(", "),
                            k.as_str()
                        ));
                    }
                    if let Some(k) = mult_kind(arrow.left) {
                        let right: Vec<usize> = (i + 1..field.columns.len()).collect();
                        let decls: Vec<String> = right
                            .iter()
                            .map(|&j| format!("{} : {}", vars[j], field.columns[j]))
                            .collect();
                        let expr = right
                            .iter()
                            .rev()
                            .fold(rel.clone(), |acc, &j| format!("({acc}).{}", vars[j]));
                        lines.push(format!(
                            "all {owner} : {}, {} | {} {expr}",
                            field.owner,
                            decls.join(", "),
                            k.as_str()
                        ));
                    }
                }
            }
        }
    }
    lines
        .iter()
        .map(|l| parse_formula_block(l, schema).unwrap_or_else(|e| panic!("implicit constraint `{l}`: {e}")))
        .collect()
}

#[derive(Clone)]
struct Goal<'f> {
    formula: &'f Formula,
    bindings: Vec<(String, TupleSet)>,
}

/// Sig and field names a formula depends on, following predicate calls.
struct Deps<'s> {
    schema: &'s ModelSchema,
    memo: HashMap<*const Formula, Vec<String>>,
}

impl<'s> Deps<'s> {
    fn new(schema: &'s ModelSchema) -> Self {
        Deps {
            schema,
            memo: HashMap::new(),
        }
    }

    fn of_formula(&mut self, f: &Formula) -> Vec<String> {
        let key = f as *const Formula;
        if let Some(d) = self.memo.get(&key) {
            return d.clone();
        }
        let mut names = Vec::new();
        f.walk_exprs(&mut |e| Self::leaf(self.schema, e, &mut names));
        let mut calls = Vec::new();
        f.called_preds(&mut calls);
        for call in calls {
            if let Some(p) = self.schema.pred(&call) {
                let body = &p.body;
                names.extend(self.of_formula(body));
            }
        }
        names.sort();
        names.dedup();
        self.memo.insert(key, names.clone());
        names
    }

    fn of_expr(&self, e: &Expr) -> Vec<String> {
        let mut names = Vec::new();
        e.walk(&mut |e| Self::leaf(self.schema, e, &mut names));
        names
    }

    fn leaf(schema: &ModelSchema, e: &Expr, out: &mut Vec<String>) {
        match &e.kind {
            ExprKind::Sig(n) | ExprKind::Field(n) => out.push(n.clone()),
            ExprKind::Name(n) if schema.sig(n).is_some() || schema.field(n).is_some() => out.push(n.clone()),
            _ => {}
        }
    }
}

struct Unknown {
    name: String,
    is_sig: bool,
    bound: Vec<Tuple>,
}

struct Search<'a, 's> {
    schema: &'s ModelSchema,
    deps: &'a mut Deps<'s>,
    inst: Instance,
    unknowns: Vec<Unknown>,
    index: HashMap<String, usize>,
    assigned: Vec<bool>,
    witness: Option<Valuation>,
}

impl<'a, 's> Search<'a, 's> {
    fn new(schema: &'s ModelSchema, concrete: &[&str], counts: &[usize], deps: &'a mut Deps<'s>) -> Self {
        let mut atoms = Vec::new();
        let mut owner = Vec::new();
        for (sig, n) in concrete.iter().zip(counts) {
            for i in 0..*n {
                atoms.push(format!("{sig}${i}"));
                owner.push(*sig);
            }
        }
        let mut inst = Instance::new(atoms);
        let mut unknowns = Vec::new();
        let mut index = HashMap::new();
        let mut bounds: HashMap<&str, TupleSet> = HashMap::new();
        for sig in &schema.sigs {
            if !sig.is_subset() {
                let set = TupleSet::unary(
                    owner
                        .iter()
                        .enumerate()
                        .filter(|(_, o)| schema.extends_chain(o).contains(&sig.name.as_str()))
                        .map(|(i, _)| i as u32),
                );
                bounds.insert(&sig.name, set.clone());
                inst.sigs.insert(sig.name.clone(), set);
            }
        }
        // Subset sigs may be declared before their parents; settle bounds
        // in dependency order.
        let mut remaining: Vec<&str> = schema.sigs.iter().filter(|s| s.is_subset()).map(|s| s.name.as_str()).collect();
        while !remaining.is_empty() {
            let before = remaining.len();
            remaining.retain(|name| {
                let parents = schema.parents(name);
                if !parents.iter().all(|p| bounds.contains_key(p)) {
                    return true;
                }
                let bound = parents
                    .iter()
                    .map(|p| bounds[p].clone())
                    .reduce(|a, b| a.intersection(&b))
                    .unwrap_or_default();
                index.insert(name.to_string(), unknowns.len());
                unknowns.push(Unknown {
                    name: name.to_string(),
                    is_sig: true,
                    bound: bound.iter().cloned().collect(),
                });
                bounds.insert(name, bound);
                false
            });
            assert!(remaining.len() < before, "subset hierarchy is acyclic after resolve");
        }
        for field in &schema.fields {
            let bound = field
                .column_types()
                .map(|c| bounds[c].clone())
                .reduce(|a, b| a.product(&b))
                .unwrap_or_default();
            index.insert(field.name.clone(), unknowns.len());
            unknowns.push(Unknown {
                name: field.name.clone(),
                is_sig: false,
                bound: bound.iter().cloned().collect(),
            });
        }
        let assigned = vec![false; unknowns.len()];
        Search {
            schema,
            deps,
            inst,
            unknowns,
            index,
            assigned,
            witness: None,
        }
    }

    fn settled(&self, names: &[String]) -> bool {
        names
            .iter()
            .all(|n| self.index.get(n).is_none_or(|&i| self.assigned[i]))
    }

    fn ready(&mut self, g: &Goal) -> bool {
        let names = self.deps.of_formula(g.formula);
        self.settled(&names)
    }

    fn env<'e>(inst: &'e Instance, schema: &'e ModelSchema, bindings: &[(String, TupleSet)]) -> Env<'e> {
        let mut env = Env::new(inst, schema);
        for (n, v) in bindings {
            env.bind(n.clone(), v.clone());
        }
        env
    }

    fn assign(&mut self, u: usize, value: TupleSet) {
        let unknown = &self.unknowns[u];
        if unknown.is_sig {
            self.inst.sigs.insert(unknown.name.clone(), value);
        } else {
            self.inst.fields.insert(unknown.name.clone(), value);
        }
        self.assigned[u] = true;
    }

    fn unassign(&mut self, u: usize) {
        let unknown = &self.unknowns[u];
        if unknown.is_sig {
            self.inst.sigs.remove(&unknown.name);
        } else {
            self.inst.fields.remove(&unknown.name);
        }
        self.assigned[u] = false;
    }

    fn unsettled_leaf(&self, e: &Expr) -> Option<usize> {
        let name = match &e.kind {
            ExprKind::Sig(n) | ExprKind::Field(n) | ExprKind::Name(n) => n,
            _ => return None,
        };
        self.index.get(name).copied().filter(|&i| !self.assigned[i])
    }

    /// An unknown this goal fixes outright, with its value.
    fn pin(&self, g: &Goal) -> Option<(usize, TupleSet)> {
        match &g.formula.kind {
            FormulaKind::Compare(CompareOp::Equal, l, r) => {
                for (a, b) in [(l, r), (r, l)] {
                    if let Some(u) = self.unsettled_leaf(a) {
                        if self.settled(&self.deps.of_expr(b)) {
                            let env = Self::env(&self.inst, self.schema, &g.bindings);
                            return Some((u, eval_expr(b, &env)));
                        }
                    }
                }
                None
            }
            FormulaKind::Mult(MultKind::No, e) => self.unsettled_leaf(e).map(|u| (u, TupleSet::new())),
            _ => None,
        }
    }

    fn run<'g>(&mut self, goals: &[Goal<'g>]) -> Result<bool, OracleError> {
        let mut pending = Vec::new();
        for g in goals {
            if self.ready(g) {
                let mut env = Self::env(&self.inst, self.schema, &g.bindings);
                if !eval_formula(g.formula, &mut env) {
                    return Ok(false);
                }
            } else {
                pending.push(g.clone());
            }
        }
        if pending.is_empty() {
            self.witness = Some(self.inst.to_valuation(self.schema));
            return Ok(true);
        }

        for g in &pending {
            if let Some((u, value)) = self.pin(g) {
                self.assign(u, value);
                let found = self.run(&pending)?;
                self.unassign(u);
                return Ok(found);
            }
        }

        for (i, g) in pending.iter().enumerate() {
            if let FormulaKind::Quantified {
                kind: QuantKind::Some,
                disj,
                vars,
                body,
            } = &g.formula.kind
            {
                let domain_names: Vec<String> = vars.iter().flat_map(|v| self.deps.of_expr(&v.domain)).collect();
                if !self.settled(&domain_names) {
                    continue;
                }
                let rest: Vec<Goal> = pending
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, g)| g.clone())
                    .collect();
                return self.expand(vars, *disj, body, g.bindings.clone(), &mut Vec::new(), &rest);
            }
        }

        let mut wanted = Vec::new();
        for g in &pending {
            for name in self.deps.of_formula(g.formula) {
                if let Some(&u) = self.index.get(&name) {
                    if !self.assigned[u] && !wanted.contains(&u) {
                        wanted.push(u);
                    }
                }
            }
        }
        let u = *wanted.iter().min().expect("pending goals mention an unsettled name");
        let bound = self.unknowns[u].bound.clone();
        if bound.len() > MAX_BRANCH_TUPLES {
            return Err(OracleError::SearchTooLarge {
                relation: self.unknowns[u].name.clone(),
                tuples: bound.len(),
                limit: MAX_BRANCH_TUPLES,
            });
        }
        for mask in 0u32..(1u32 << bound.len()) {
            let value: TupleSet = bound
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, t)| t.clone())
                .collect();
            self.assign(u, value);
            let found = self.run(&pending)?;
            self.unassign(u);
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn expand<'g>(
        &mut self,
        vars: &[QuantVar],
        disj: bool,
        body: &'g Formula,
        bindings: Vec<(String, TupleSet)>,
        chosen: &mut Vec<u32>,
        rest: &[Goal<'g>],
    ) -> Result<bool, OracleError> {
        let Some((var, more)) = vars.split_first() else {
            let mut goals = rest.to_vec();
            goals.extend(body.conjuncts().into_iter().map(|f| Goal {
                formula: f,
                bindings: bindings.clone(),
            }));
            return self.run(&goals);
        };
        let domain = {
            let env = Self::env(&self.inst, self.schema, &bindings);
            eval_expr(&var.domain, &env)
        };
        for atom in domain.atoms() {
            if disj && chosen.contains(&atom) {
                continue;
            }
            let mut next = bindings.clone();
            next.push((var.name.clone(), TupleSet::singleton(atom)));
            chosen.push(atom);
            let found = self.expand(more, disj, body, next, chosen, rest)?;
            chosen.pop();
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
