//! Relational evaluation over a finite instance.

pub mod run;
mod structural;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::schema::ModelSchema;
use crate::syntax::{
    BinaryOp, CompareOp, Expr, ExprKind, Formula, FormulaKind, LogicOp, QuantKind, QuantVar,
    UnaryOp,
};
use crate::valuation::Valuation;

pub use structural::{check_structural, check_structural_instance, StructuralRule};

pub type Tuple = Vec<u32>;

/// A set of same-arity tuples of atom indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleSet(BTreeSet<Tuple>);

impl TupleSet {
    pub fn new() -> Self {
        TupleSet::default()
    }

    pub fn unary(atoms: impl IntoIterator<Item = u32>) -> Self {
        TupleSet(atoms.into_iter().map(|a| vec![a]).collect())
    }

    pub fn singleton(atom: u32) -> Self {
        TupleSet::unary([atom])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, t: Tuple) -> bool {
        self.0.insert(t)
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        self.0.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.0.iter()
    }

    /// First column of each tuple; the atoms of a unary set.
    pub fn atoms(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|t| t[0])
    }

    pub fn is_subset(&self, other: &TupleSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &TupleSet) -> TupleSet {
        TupleSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &TupleSet) -> TupleSet {
        TupleSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &TupleSet) -> TupleSet {
        TupleSet(self.0.intersection(&other.0).cloned().collect())
    }

    /// Relational join on the last column of `self` and the first of `other`.
    pub fn join(&self, other: &TupleSet) -> TupleSet {
        let mut by_head: HashMap<u32, Vec<&[u32]>> = HashMap::new();
        for t in &other.0 {
            by_head.entry(t[0]).or_default().push(&t[1..]);
        }
        let mut out = BTreeSet::new();
        for l in &self.0 {
            let (last, init) = l.split_last().expect("tuples are non-empty");
            for rest in by_head.get(last).into_iter().flatten() {
                if init.is_empty() && rest.is_empty() {
                    continue;
                }
                let mut t = init.to_vec();
                t.extend_from_slice(rest);
                out.insert(t);
            }
        }
        TupleSet(out)
    }

    pub fn product(&self, other: &TupleSet) -> TupleSet {
        let mut out = BTreeSet::new();
        for l in &self.0 {
            for r in &other.0 {
                let mut t = l.clone();
                t.extend_from_slice(r);
                out.insert(t);
            }
        }
        TupleSet(out)
    }

    pub fn transpose(&self) -> TupleSet {
        TupleSet(self.0.iter().map(|t| t.iter().rev().copied().collect()).collect())
    }

    /// Least transitive relation containing `self`.
    pub fn closure(&self) -> TupleSet {
        let mut result = self.clone();
        loop {
            let next = result.union(&result.join(&result));
            if next == result {
                return result;
            }
            result = next;
        }
    }

    pub fn iden(universe: &TupleSet) -> TupleSet {
        TupleSet(universe.atoms().map(|a| vec![a, a]).collect())
    }
}

impl FromIterator<Tuple> for TupleSet {
    fn from_iter<I: IntoIterator<Item = Tuple>>(iter: I) -> Self {
        TupleSet(iter.into_iter().collect())
    }
}

/// A finite instance: labelled atoms plus a tuple set per sig and field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Instance {
    atoms: Vec<String>,
    index: HashMap<String, u32>,
    universe: TupleSet,
    pub sigs: HashMap<String, TupleSet>,
    pub fields: HashMap<String, TupleSet>,
}

impl Instance {
    pub fn new(atoms: Vec<String>) -> Self {
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i as u32))
            .collect();
        let universe = TupleSet::unary(0..atoms.len() as u32);
        Instance {
            atoms,
            index,
            universe,
            sigs: HashMap::new(),
            fields: HashMap::new(),
        }
    }

    /// Atoms are every label mentioned by the valuation, in sorted order.
    pub fn from_valuation(val: &Valuation) -> Self {
        let mut labels: BTreeSet<&str> = BTreeSet::new();
        for set in val.sig_sets.values() {
            labels.extend(set.iter().map(String::as_str));
        }
        for tuples in val.rel_tuples.values() {
            for t in tuples {
                labels.extend(t.iter().map(String::as_str));
            }
        }
        let mut inst = Instance::new(labels.into_iter().map(str::to_string).collect());
        for (name, set) in &val.sig_sets {
            let ts = TupleSet::unary(set.iter().map(|a| inst.index[a]));
            inst.sigs.insert(name.clone(), ts);
        }
        for (name, tuples) in &val.rel_tuples {
            let ts = tuples
                .iter()
                .map(|t| t.iter().map(|a| inst.index[a]).collect())
                .collect();
            inst.fields.insert(name.clone(), ts);
        }
        inst
    }

    pub fn to_valuation(&self, schema: &ModelSchema) -> Valuation {
        let mut val = Valuation::empty(schema);
        for (name, set) in &self.sigs {
            val.sig_sets.insert(
                name.clone(),
                set.atoms().map(|a| self.label(a).to_string()).collect(),
            );
        }
        for (name, set) in &self.fields {
            val.rel_tuples.insert(
                name.clone(),
                set.iter()
                    .map(|t| t.iter().map(|a| self.label(*a).to_string()).collect())
                    .collect(),
            );
        }
        val
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn label(&self, atom: u32) -> &str {
        &self.atoms[atom as usize]
    }

    pub fn atom(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    pub fn universe(&self) -> &TupleSet {
        &self.universe
    }

    pub fn sig(&self, name: &str) -> TupleSet {
        self.sigs.get(name).cloned().unwrap_or_default()
    }

    pub fn field(&self, name: &str) -> TupleSet {
        self.fields.get(name).cloned().unwrap_or_default()
    }

    /// `a->b->c` style rendering of a tuple.
    pub fn render(&self, t: &[u32]) -> String {
        t.iter().map(|a| self.label(*a)).collect::<Vec<_>>().join("->")
    }

    pub fn render_set(&self, set: &TupleSet) -> String {
        if set.is_empty() {
            return "none".to_string();
        }
        set.iter().map(|t| self.render(t)).collect::<Vec<_>>().join(" + ")
    }
}

/// Evaluation context: an instance, the schema for predicate bodies, and a
/// stack of variable bindings (later bindings shadow earlier ones).
pub struct Env<'a> {
    pub instance: &'a Instance,
    pub schema: &'a ModelSchema,
    bindings: Vec<(String, TupleSet)>,
}

impl<'a> Env<'a> {
    pub fn new(instance: &'a Instance, schema: &'a ModelSchema) -> Self {
        Env {
            instance,
            schema,
            bindings: Vec::new(),
        }
    }

    pub fn bind(&mut self, name: impl Into<String>, value: TupleSet) {
        self.bindings.push((name.into(), value));
    }

    pub fn unbind(&mut self) {
        self.bindings.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&TupleSet> {
        self.bindings.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn name(&self, name: &str) -> TupleSet {
        if let Some(v) = self.lookup(name) {
            return v.clone();
        }
        if let Some(s) = self.instance.sigs.get(name) {
            return s.clone();
        }
        self.instance.field(name)
    }
}

pub fn eval_expr(expr: &Expr, env: &Env) -> TupleSet {
    match &expr.kind {
        ExprKind::Var(n) => env.lookup(n).cloned().unwrap_or_default(),
        ExprKind::Sig(n) => env.instance.sig(n),
        ExprKind::Field(n) => env.instance.field(n),
        ExprKind::Name(n) => env.name(n),
        ExprKind::Univ => env.instance.universe().clone(),
        ExprKind::Iden => TupleSet::iden(env.instance.universe()),
        ExprKind::None => TupleSet::new(),
        ExprKind::Unary(op, e) => {
            let v = eval_expr(e, env);
            match op {
                UnaryOp::Transpose => v.transpose(),
                UnaryOp::Closure => v.closure(),
                UnaryOp::ReflexiveClosure => {
                    v.closure().union(&TupleSet::iden(env.instance.universe()))
                }
            }
        }
        ExprKind::Binary(op, l, r) => {
            let (l, r) = (eval_expr(l, env), eval_expr(r, env));
            match op {
                BinaryOp::Join => l.join(&r),
                BinaryOp::Product => l.product(&r),
                BinaryOp::Union => l.union(&r),
                BinaryOp::Difference => l.difference(&r),
                BinaryOp::Intersection => l.intersection(&r),
            }
        }
    }
}

pub fn eval_formula(formula: &Formula, env: &mut Env) -> bool {
    match &formula.kind {
        FormulaKind::Compare(op, l, r) => {
            let (l, r) = (eval_expr(l, env), eval_expr(r, env));
            match op {
                CompareOp::Subset => l.is_subset(&r),
                CompareOp::Equal => l == r,
                CompareOp::NotEqual => l != r,
            }
        }
        FormulaKind::Mult(kind, e) => kind.admits(eval_expr(e, env).len()),
        FormulaKind::Quantified {
            kind,
            disj,
            vars,
            body,
        } => match kind {
            QuantKind::All => count_bindings(vars, *disj, env, 1, &mut |env| !eval_formula(body, env)) == 0,
            QuantKind::Some => count_bindings(vars, *disj, env, 1, &mut |env| eval_formula(body, env)) == 1,
            QuantKind::No => count_bindings(vars, *disj, env, 1, &mut |env| eval_formula(body, env)) == 0,
            QuantKind::Lone => count_bindings(vars, *disj, env, 2, &mut |env| eval_formula(body, env)) <= 1,
            QuantKind::One => count_bindings(vars, *disj, env, 2, &mut |env| eval_formula(body, env)) == 1,
        },
        FormulaKind::Not(f) => !eval_formula(f, env),
        FormulaKind::Logic(op, l, r) => match op {
            LogicOp::And => eval_formula(l, env) && eval_formula(r, env),
            LogicOp::Or => eval_formula(l, env) || eval_formula(r, env),
            LogicOp::Iff => eval_formula(l, env) == eval_formula(r, env),
        },
        FormulaKind::Implies(c, t, e) => {
            if eval_formula(c, env) {
                eval_formula(t, env)
            } else {
                e.as_ref().is_none_or(|e| eval_formula(e, env))
            }
        }
        FormulaKind::PredCall { name, args } => {
            let Some(pred) = env.schema.pred(name) else {
                return false;
            };
            let values: Vec<TupleSet> = args.iter().map(|a| eval_expr(a, env)).collect();
            let mut inner = Env::new(env.instance, env.schema);
            for (param, value) in pred.params.iter().zip(values) {
                inner.bind(param.name.clone(), value);
            }
            eval_formula(&pred.body, &mut inner)
        }
        FormulaKind::Block(items) => items.iter().all(|f| eval_formula(f, env)),
    }
}

/// Count variable assignments for which `test` holds, stopping at `limit`.
/// Each domain is evaluated with the earlier variables bound; `disj`
/// skips assignments that reuse an atom.
pub fn count_bindings(
    vars: &[QuantVar],
    disj: bool,
    env: &mut Env,
    limit: usize,
    test: &mut dyn FnMut(&mut Env) -> bool,
) -> usize {
    let mut chosen = Vec::with_capacity(vars.len());
    let mut count = 0;
    bindings_rec(vars, disj, env, limit, test, &mut chosen, &mut count);
    count
}

fn bindings_rec(
    vars: &[QuantVar],
    disj: bool,
    env: &mut Env,
    limit: usize,
    test: &mut dyn FnMut(&mut Env) -> bool,
    chosen: &mut Vec<u32>,
    count: &mut usize,
) {
    let Some((var, rest)) = vars.split_first() else {
        if test(env) {
            *count += 1;
        }
        return;
    };
    let domain = eval_expr(&var.domain, env);
    for atom in domain.atoms() {
        if disj && chosen.contains(&atom) {
            continue;
        }
        chosen.push(atom);
        env.bind(var.name.clone(), TupleSet::singleton(atom));
        bindings_rec(rest, disj, env, limit, test, chosen, count);
        env.unbind();
        chosen.pop();
        if *count >= limit {
            return;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum DiagnosticKind {
    Structural,
    Fact,
    Predicate,
}

/// The outcome of checking one constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub subject: String,
    pub holds: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<StructuralRule>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schema::{load_model, parse_formula_with_locals};

    /// An environment with every atom of `inst` bound to a variable of the
    /// same name.
    fn atom_env<'a>(inst: &'a Instance, schema: &'a ModelSchema) -> (Env<'a>, Vec<String>) {
        let mut env = Env::new(inst, schema);
        let labels: Vec<String> = (0..inst.atom_count() as u32).map(|a| inst.label(a).to_string()).collect();
        for (a, l) in labels.iter().enumerate() {
            env.bind(l.clone(), TupleSet::singleton(a as u32));
        }
        (env, labels)
    }

    fn list_instance(schema: &ModelSchema) -> Instance {
        Instance::from_valuation(&fixtures::list_two_node(schema).derive_valuation(schema))
    }

    fn eval(text: &str, schema: &ModelSchema, inst: &Instance) -> bool {
        let (mut env, labels) = atom_env(inst, schema);
        let locals: Vec<&str> = labels.iter().map(String::as_str).collect();
        let f = parse_formula_with_locals(text, schema, &locals).unwrap();
        eval_formula(&f, &mut env)
    }

    fn eval_set(text: &str, var: &str, atom: &str, schema: &ModelSchema, inst: &Instance) -> Vec<String> {
        let (mut env, labels) = atom_env(inst, schema);
        let mut locals: Vec<&str> = labels.iter().map(String::as_str).collect();
        locals.push(var);
        let f = parse_formula_with_locals(&format!("some {text}"), schema, &locals).unwrap();
        let FormulaKind::Mult(_, e) = f.kind else { unreachable!() };
        env.bind(var, TupleSet::singleton(inst.atom(atom).unwrap()));
        eval_expr(&e, &env).iter().map(|t| inst.render(t)).collect()
    }

    #[test]
    fn closure_versus_reflexive_closure() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let inst = list_instance(&schema);
        assert_eq!(eval_set("n.*link", "n", "Node0", &schema, &inst), ["Node0", "Node1"]);
        assert_eq!(eval_set("n.^link", "n", "Node0", &schema, &inst), ["Node1"]);
    }

    #[test]
    fn type_disjoint_join_is_empty() {
        let schema = load_model(fixtures::LTS_FAULTY).unwrap();
        let val = fixtures::lts_nondeterministic(&schema).derive_valuation(&schema);
        let inst = Instance::from_valuation(&val);
        assert!(eval_set("e.trans", "e", "Event0", &schema, &inst).is_empty());
        assert_eq!(eval_set("State1.trans", "e", "Event0", &schema, &inst), ["Event0->State0", "Event0->State1"]);
    }

    #[test]
    fn acyclic_faulty_and_fixed() {
        let faulty = load_model(fixtures::LIST_FAULTY).unwrap();
        assert!(!eval("acyclic", &faulty, &list_instance(&faulty)));
        let fixed = load_model(fixtures::LIST_FIXED).unwrap();
        assert!(eval("acyclic", &fixed, &list_instance(&fixed)));
    }

    #[test]
    fn inv3_faulty_is_trivially_true() {
        let schema = load_model(fixtures::LTS_FAULTY).unwrap();
        let inst = Instance::from_valuation(&fixtures::lts_nondeterministic(&schema).derive_valuation(&schema));
        assert!(eval("inv3", &schema, &inst));
        let fixed = load_model(fixtures::LTS_FIXED).unwrap();
        assert!(!eval("inv3", &fixed, &inst));
    }

    #[test]
    fn quantifier_kinds_count_bindings() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let inst = list_instance(&schema);
        assert!(eval("one n: Node | some n.link", &schema, &inst));
        assert!(eval("lone n: Node | some n.link", &schema, &inst));
        assert!(!eval("no n: Node | some n.link", &schema, &inst));
        assert!(eval("some n: Node, m: Node | n.link = m", &schema, &inst));
        assert!(eval("one n: Node, m: Node | n.link = m", &schema, &inst));
        assert!(eval("some n: Node, m: Node | n = m", &schema, &inst));
        assert!(!eval("some disj n, m: Node | n = m", &schema, &inst));
        assert!(eval("all disj n, m: Node | n != m", &schema, &inst));
    }

    #[test]
    fn later_domains_see_earlier_variables() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let inst = list_instance(&schema);
        assert!(eval("all n: Node, m: n.link | m = Node1", &schema, &inst));
        assert!(eval("one n: Node, m: n.link | some m", &schema, &inst));
    }

    #[test]
    fn connectives() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let inst = list_instance(&schema);
        assert!(eval("no link.Node0 => some header else no header", &schema, &inst));
        assert!(eval("some List <=> one List", &schema, &inst));
        assert!(eval("no Node || one List", &schema, &inst));
        assert!(!eval("no Node && one List", &schema, &inst));
        assert!(eval("univ = List + Node", &schema, &inst));
        assert!(eval("iden & link = none->none", &schema, &inst));
        assert!(eval("~link = Node1->Node0", &schema, &inst));
        assert!(eval("Node - Node0 = Node1", &schema, &inst));
        assert!(eval("List.header.link.~link = List.header", &schema, &inst));
    }

    #[test]
    fn predicate_parameters_bind_in_a_fresh_scope() {
        let text = "sig A { f : set A }\npred p[x : A] { some x.f }\npred q { all x : A | p[x] }";
        let schema = load_model(text).unwrap();
        let mut inst = Instance::new(vec!["A0".into(), "A1".into()]);
        inst.sigs.insert("A".into(), TupleSet::unary([0, 1]));
        inst.fields.insert("f".into(), [vec![0, 1], vec![1, 1]].into_iter().collect());
        assert!(eval("q", &schema, &inst));
        inst.fields.insert("f".into(), [vec![0, 1]].into_iter().collect());
        assert!(!eval("q", &schema, &inst));
    }

    #[test]
    fn closure_of_cycle() {
        let r: TupleSet = [vec![0, 1], vec![1, 2], vec![2, 0]].into_iter().collect();
        let c = r.closure();
        assert_eq!(c.len(), 9);
        assert_eq!(c.union(&c.join(&r)), c);
    }
}
