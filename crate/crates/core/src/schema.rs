//! Resolved view of a model: signature hierarchy, relations, multiplicities,
//! predicates and facts.

use std::collections::{BTreeSet, HashMap};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{
    self, BinaryOp, CompareOp, Declaration, Expr, ExprKind, Formula, FormulaKind, Mult,
    ParseError, SigMultiplicity, SigParent, SourceModel, Span, UnaryOp,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("{span}: unknown name `{name}`")]
    UnknownName { span: Span, name: String },
    #[error("{span}: duplicate name `{name}`")]
    DuplicateName { span: Span, name: String },
    #[error("{span}: cyclic signature hierarchy through {}", sigs.join(", "))]
    CyclicHierarchy { span: Span, sigs: Vec<String> },
    #[error("{span}: arity error: {message}")]
    Arity { span: Span, message: String },
    #[error("{span}: `{name}` expects {expected} argument(s), got {found}")]
    ArgumentCount {
        span: Span,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{span}: `{name}` is not a predicate")]
    NotAPredicate { span: Span, name: String },
    #[error("{span}: `{name}` cannot be used as an expression")]
    NotAnExpression { span: Span, name: String },
    #[error("{span}: predicate `{name}` is recursive")]
    RecursivePredicate { span: Span, name: String },
    #[error("{span}: unsupported feature: {feature}")]
    Unsupported { span: Span, feature: String },
}

/// Any failure turning model text into a schema.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

impl ModelError {
    pub fn span(&self) -> Span {
        match self {
            ModelError::Parse(e) => e.span(),
            ModelError::Resolve(e) => e.span(),
        }
    }
}

impl ResolveError {
    pub fn span(&self) -> Span {
        match self {
            ResolveError::UnknownName { span, .. }
            | ResolveError::DuplicateName { span, .. }
            | ResolveError::CyclicHierarchy { span, .. }
            | ResolveError::Arity { span, .. }
            | ResolveError::ArgumentCount { span, .. }
            | ResolveError::NotAPredicate { span, .. }
            | ResolveError::NotAnExpression { span, .. }
            | ResolveError::RecursivePredicate { span, .. }
            | ResolveError::Unsupported { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SigKind {
    Top,
    Extends(String),
    #[serde(rename = "in")]
    SubsetOf(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SigDecl {
    pub name: String,
    pub multiplicity: SigMultiplicity,
    pub is_abstract: bool,
    pub kind: SigKind,
    /// Names of the fields this signature owns, in declaration order.
    pub fields: Vec<String>,
    pub decl_index: usize,
}

impl SigDecl {
    pub fn is_subset(&self) -> bool {
        matches!(self.kind, SigKind::SubsetOf(_))
    }
}

/// Per-arrow multiplicities of a relation type of arity 3 or more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArrowMult {
    pub left: Mult,
    pub right: Mult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum FieldMultiplicity {
    /// `f : m B`: every owner atom maps to `m` atoms.
    Binary(Mult),
    /// One entry per arrow between consecutive non-owner columns; empty
    /// means unconstrained.
    Arrows(Vec<ArrowMult>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldDecl {
    pub name: String,
    pub owner: String,
    /// Column types after the owner column.
    pub columns: Vec<String>,
    pub multiplicity: FieldMultiplicity,
    pub decl_index: usize,
}

impl FieldDecl {
    pub fn arity(&self) -> usize {
        self.columns.len() + 1
    }

    /// Sig type of column `i`, with the owner as column 0.
    pub fn column(&self, i: usize) -> &str {
        if i == 0 {
            &self.owner
        } else {
            &self.columns[i - 1]
        }
    }

    pub fn column_types(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.owner.as_str()).chain(self.columns.iter().map(String::as_str))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    pub sig: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PredDecl {
    pub name: String,
    pub params: Vec<Param>,
    #[serde(serialize_with = "as_source")]
    pub body: Formula,
    pub is_assert: bool,
    pub decl_index: usize,
}

fn as_source<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

fn facts_as_source<S: Serializer>(facts: &[Formula], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(facts.iter().map(|f| f.to_string()))
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ModelSchema {
    pub sigs: Vec<SigDecl>,
    pub fields: Vec<FieldDecl>,
    pub preds: Vec<PredDecl>,
    #[serde(serialize_with = "facts_as_source")]
    pub facts: Vec<Formula>,
    #[serde(skip)]
    index: HashMap<String, Entity>,
}

impl PartialEq for ModelSchema {
    fn eq(&self, other: &Self) -> bool {
        self.sigs == other.sigs
            && self.fields == other.fields
            && self.preds == other.preds
            && self.facts == other.facts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Entity {
    Sig(usize),
    Field(usize),
    Pred(usize),
}

/// Parse and resolve model text in one step.
pub fn load_model(text: &str) -> Result<ModelSchema, ModelError> {
    let source = syntax::parse_model(text)?;
    Ok(resolve(&source)?)
}

/// Parse formula text and resolve it against `schema`.
pub fn parse_formula_block(text: &str, schema: &ModelSchema) -> Result<Formula, ModelError> {
    let mut f = syntax::parse_formula(text)?;
    Resolver::new(schema).formula(&mut f, &mut Vec::new())?;
    Ok(f)
}

/// Like [`parse_formula_block`], with `locals` in scope as unary variables.
pub fn parse_formula_with_locals(text: &str, schema: &ModelSchema, locals: &[&str]) -> Result<Formula, ModelError> {
    let mut f = syntax::parse_formula(text)?;
    let mut scope = locals.iter().map(|l| l.to_string()).collect();
    Resolver::new(schema).formula(&mut f, &mut scope)?;
    Ok(f)
}

/// Turn a parsed model into a schema, checking names, hierarchy and arity.
pub fn resolve(source: &SourceModel) -> Result<ModelSchema, ResolveError> {
    let mut schema = ModelSchema::default();
    let mut spans: HashMap<String, Span> = HashMap::new();

    let mut claim = |schema: &mut ModelSchema, name: &str, span: Span, entity: Entity| {
        if schema.index.contains_key(name) {
            return Err(ResolveError::DuplicateName {
                span,
                name: name.to_string(),
            });
        }
        schema.index.insert(name.to_string(), entity);
        spans.insert(name.to_string(), span);
        Ok(())
    };

    // Declarations first, so bodies may refer forward.
    let mut field_syntax = Vec::new();
    let mut bodies = Vec::new();
    for decl in &source.declarations {
        match decl {
            Declaration::Sig(sig) => {
                if sig.is_abstract && sig.multiplicity.is_some() {
                    return Err(ResolveError::Unsupported {
                        span: sig.span,
                        feature: "abstract signatures with a multiplicity keyword".into(),
                    });
                }
                let kind = match &sig.parent {
                    None => SigKind::Top,
                    Some(SigParent::Extends(p)) => SigKind::Extends(p.name.clone()),
                    Some(SigParent::In(ps)) => {
                        if sig.is_abstract {
                            return Err(ResolveError::Unsupported {
                                span: sig.span,
                                feature: "abstract subset signatures".into(),
                            });
                        }
                        if !sig.fields.is_empty() {
                            return Err(ResolveError::Unsupported {
                                span: sig.fields[0].span,
                                feature: "fields on subset (`in`) signatures".into(),
                            });
                        }
                        SigKind::SubsetOf(ps.iter().map(|p| p.name.clone()).collect())
                    }
                };
                for name in &sig.names {
                    let index = schema.sigs.len();
                    claim(&mut schema, &name.name, name.span, Entity::Sig(index))?;
                    schema.sigs.push(SigDecl {
                        name: name.name.clone(),
                        multiplicity: sig.multiplicity.unwrap_or(SigMultiplicity::Any),
                        is_abstract: sig.is_abstract,
                        kind: kind.clone(),
                        fields: Vec::new(),
                        decl_index: index,
                    });
                    for field in &sig.fields {
                        for fname in &field.names {
                            field_syntax.push((index, fname.clone(), field));
                        }
                    }
                }
            }
            Declaration::Pred(p) => {
                let index = schema.preds.len();
                claim(&mut schema, &p.name.name, p.name.span, Entity::Pred(index))?;
                let mut seen = BTreeSet::new();
                let mut params = Vec::new();
                for (name, sig) in &p.params {
                    if !seen.insert(name.name.clone()) {
                        return Err(ResolveError::DuplicateName {
                            span: name.span,
                            name: name.name.clone(),
                        });
                    }
                    params.push((name.clone(), sig.clone()));
                }
                schema.preds.push(PredDecl {
                    name: p.name.name.clone(),
                    params: params
                        .iter()
                        .map(|(n, s)| Param {
                            name: n.name.clone(),
                            sig: s.name.clone(),
                        })
                        .collect(),
                    body: p.body.clone(),
                    is_assert: false,
                    decl_index: index,
                });
                bodies.push((Entity::Pred(index), params));
            }
            Declaration::Assert(a) => {
                let index = schema.preds.len();
                claim(&mut schema, &a.name.name, a.name.span, Entity::Pred(index))?;
                schema.preds.push(PredDecl {
                    name: a.name.name.clone(),
                    params: Vec::new(),
                    body: a.body.clone(),
                    is_assert: true,
                    decl_index: index,
                });
                bodies.push((Entity::Pred(index), Vec::new()));
            }
            Declaration::Fact(fact) => {
                schema.facts.push(fact.body.clone());
            }
            Declaration::Command(_) => {}
        }
    }

    for (owner, name, field) in field_syntax {
        let index = schema.fields.len();
        claim(&mut schema, &name.name, name.span, Entity::Field(index))?;
        let ty = &field.ty;
        let multiplicity = if ty.arrows.is_empty() {
            FieldMultiplicity::Binary(ty.leading.unwrap_or(Mult::One))
        } else if ty.arrows.iter().all(|a| a.left.is_none() && a.right.is_none()) {
            FieldMultiplicity::Arrows(Vec::new())
        } else {
            FieldMultiplicity::Arrows(
                ty.arrows
                    .iter()
                    .map(|a| ArrowMult {
                        left: a.left.unwrap_or(Mult::Set),
                        right: a.right.unwrap_or(Mult::Set),
                    })
                    .collect(),
            )
        };
        schema.fields.push(FieldDecl {
            name: name.name.clone(),
            owner: schema.sigs[owner].name.clone(),
            columns: ty.columns.iter().map(|c| c.name.clone()).collect(),
            multiplicity,
            decl_index: index,
        });
        schema.sigs[owner].fields.push(name.name.clone());
        // Column types are checked once every sig is known.
        for col in &ty.columns {
            if !matches!(schema.index.get(&col.name), Some(Entity::Sig(_))) {
                let declared_later = source.declarations.iter().any(|d| {
                    matches!(d, Declaration::Sig(s) if s.names.iter().any(|n| n.name == col.name))
                });
                if !declared_later {
                    return Err(ResolveError::UnknownName {
                        span: col.span,
                        name: col.name.clone(),
                    });
                }
            }
        }
    }

    check_hierarchy(&schema, &spans)?;

    for (entity, params) in &bodies {
        let Entity::Pred(i) = *entity else {
            unreachable!()
        };
        for (name, sig) in params {
            if !matches!(schema.index.get(&sig.name), Some(Entity::Sig(_))) {
                return Err(ResolveError::UnknownName {
                    span: sig.span,
                    name: sig.name.clone(),
                });
            }
            let _ = name;
        }
        let mut locals: Vec<String> = params.iter().map(|(n, _)| n.name.clone()).collect();
        let mut body = schema.preds[i].body.clone();
        Resolver::new(&schema).formula(&mut body, &mut locals)?;
        schema.preds[i].body = body;
    }
    let mut facts = std::mem::take(&mut schema.facts);
    for fact in &mut facts {
        Resolver::new(&schema).formula(fact, &mut Vec::new())?;
    }
    schema.facts = facts;

    check_recursion(&schema)?;
    Ok(schema)
}

fn check_hierarchy(schema: &ModelSchema, spans: &HashMap<String, Span>) -> Result<(), ResolveError> {
    for sig in &schema.sigs {
        let parents: Vec<&String> = match &sig.kind {
            SigKind::Top => continue,
            SigKind::Extends(p) => vec![p],
            SigKind::SubsetOf(ps) => ps.iter().collect(),
        };
        for p in parents {
            match schema.sig(p) {
                None => {
                    return Err(ResolveError::UnknownName {
                        span: spans[&sig.name],
                        name: p.clone(),
                    })
                }
                Some(parent) if parent.is_subset() && matches!(sig.kind, SigKind::Extends(_)) => {
                    return Err(ResolveError::Unsupported {
                        span: spans[&sig.name],
                        feature: "extending a subset signature".into(),
                    })
                }
                Some(_) => {}
            }
        }
    }
    // Depth-first search over parent edges of both kinds.
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    fn visit(
        schema: &ModelSchema,
        i: usize,
        marks: &mut [Mark],
        path: &mut Vec<String>,
    ) -> Result<(), Vec<String>> {
        match marks[i] {
            Mark::Done => return Ok(()),
            Mark::Active => {
                let name = &schema.sigs[i].name;
                let start = path.iter().position(|n| n == name).unwrap_or(0);
                return Err(path[start..].to_vec());
            }
            Mark::Fresh => {}
        }
        marks[i] = Mark::Active;
        path.push(schema.sigs[i].name.clone());
        for p in schema.parents(&schema.sigs[i].name) {
            let j = schema.sig_index(p).expect("parents checked above");
            visit(schema, j, marks, path)?;
        }
        path.pop();
        marks[i] = Mark::Done;
        Ok(())
    }
    let mut marks = vec![Mark::Fresh; schema.sigs.len()];
    for i in 0..schema.sigs.len() {
        if let Err(sigs) = visit(schema, i, &mut marks, &mut Vec::new()) {
            return Err(ResolveError::CyclicHierarchy {
                span: spans[&sigs[0]],
                sigs,
            });
        }
    }
    Ok(())
}

fn check_recursion(schema: &ModelSchema) -> Result<(), ResolveError> {
    fn reaches(schema: &ModelSchema, from: usize, target: &str, seen: &mut BTreeSet<usize>) -> bool {
        let mut calls = Vec::new();
        schema.preds[from].body.called_preds(&mut calls);
        calls.iter().any(|c| {
            c == target
                || schema
                    .pred_index(c)
                    .is_some_and(|j| seen.insert(j) && reaches(schema, j, target, seen))
        })
    }
    for (i, p) in schema.preds.iter().enumerate() {
        if reaches(schema, i, &p.name, &mut BTreeSet::new()) {
            return Err(ResolveError::RecursivePredicate {
                span: p.body.span,
                name: p.name.clone(),
            });
        }
    }
    Ok(())
}

/// Expression arity; `None` for the polymorphic empty relation.
type Arity = Option<usize>;

struct Resolver<'a> {
    schema: &'a ModelSchema,
}

impl<'a> Resolver<'a> {
    fn new(schema: &'a ModelSchema) -> Self {
        Resolver { schema }
    }

    fn formula(&self, f: &mut Formula, locals: &mut Vec<String>) -> Result<(), ResolveError> {
        let span = f.span;
        match &mut f.kind {
            FormulaKind::Compare(op, l, r) => {
                let (a, b) = (self.expr(l, locals)?, self.expr(r, locals)?);
                if let (Some(a), Some(b)) = (a, b) {
                    if a != b {
                        let sym = match op {
                            CompareOp::Subset => "in",
                            CompareOp::Equal => "=",
                            CompareOp::NotEqual => "!=",
                        };
                        return Err(ResolveError::Arity {
                            span,
                            message: format!("operands of `{sym}` have arities {a} and {b}"),
                        });
                    }
                }
            }
            FormulaKind::Mult(_, e) => {
                self.expr(e, locals)?;
            }
            FormulaKind::Quantified { vars, body, .. } => {
                let mut seen = BTreeSet::new();
                let depth = locals.len();
                for v in vars.iter_mut() {
                    if !seen.insert(v.name.clone()) {
                        return Err(ResolveError::DuplicateName {
                            span: v.span,
                            name: v.name.clone(),
                        });
                    }
                    if let Some(a) = self.expr(&mut v.domain, locals)? {
                        if a != 1 {
                            return Err(ResolveError::Arity {
                                span: v.domain.span,
                                message: format!(
                                    "quantifier domain for `{}` must be unary, found arity {a}",
                                    v.name
                                ),
                            });
                        }
                    }
                    locals.push(v.name.clone());
                }
                let result = self.formula(body, locals);
                locals.truncate(depth);
                result?;
            }
            FormulaKind::Not(inner) => self.formula(inner, locals)?,
            FormulaKind::Logic(_, l, r) => {
                self.formula(l, locals)?;
                self.formula(r, locals)?;
            }
            FormulaKind::Implies(c, t, e) => {
                self.formula(c, locals)?;
                self.formula(t, locals)?;
                if let Some(e) = e {
                    self.formula(e, locals)?;
                }
            }
            FormulaKind::PredCall { name, args } => {
                let pred = match self.schema.index.get(name.as_str()) {
                    Some(Entity::Pred(i)) => &self.schema.preds[*i],
                    Some(_) => {
                        return Err(ResolveError::NotAPredicate {
                            span,
                            name: name.clone(),
                        })
                    }
                    None => {
                        return Err(ResolveError::UnknownName {
                            span,
                            name: name.clone(),
                        })
                    }
                };
                if pred.is_assert {
                    return Err(ResolveError::NotAPredicate {
                        span,
                        name: name.clone(),
                    });
                }
                if pred.params.len() != args.len() {
                    return Err(ResolveError::ArgumentCount {
                        span,
                        name: name.clone(),
                        expected: pred.params.len(),
                        found: args.len(),
                    });
                }
                for arg in args {
                    if let Some(a) = self.expr(arg, locals)? {
                        if a != 1 {
                            return Err(ResolveError::Arity {
                                span: arg.span,
                                message: format!("argument to `{name}` must be unary, found arity {a}"),
                            });
                        }
                    }
                }
            }
            FormulaKind::Block(items) => {
                for item in items {
                    self.formula(item, locals)?;
                }
            }
        }
        Ok(())
    }

    fn expr(&self, e: &mut Expr, locals: &[String]) -> Result<Arity, ResolveError> {
        let span = e.span;
        let arity = match &mut e.kind {
            ExprKind::Name(name) | ExprKind::Var(name) | ExprKind::Sig(name) | ExprKind::Field(name) => {
                let name = std::mem::take(name);
                let (kind, arity) = if locals.iter().any(|l| *l == name) {
                    (ExprKind::Var(name), 1)
                } else {
                    match self.schema.index.get(name.as_str()) {
                        Some(Entity::Sig(_)) => (ExprKind::Sig(name), 1),
                        Some(Entity::Field(i)) => {
                            let arity = self.schema.fields[*i].arity();
                            (ExprKind::Field(name), arity)
                        }
                        Some(Entity::Pred(_)) => {
                            return Err(ResolveError::NotAnExpression { span, name })
                        }
                        None => return Err(ResolveError::UnknownName { span, name }),
                    }
                };
                e.kind = kind;
                Some(arity)
            }
            ExprKind::Univ => Some(1),
            ExprKind::Iden => Some(2),
            ExprKind::None => None,
            ExprKind::Unary(op, inner) => {
                let a = self.expr(inner, locals)?;
                if let Some(a) = a {
                    if a != 2 {
                        let what = match op {
                            UnaryOp::Transpose => "transpose",
                            UnaryOp::Closure => "transitive closure",
                            UnaryOp::ReflexiveClosure => "reflexive transitive closure",
                        };
                        return Err(ResolveError::Arity {
                            span,
                            message: format!("{what} needs a binary relation, found arity {a}"),
                        });
                    }
                }
                a.map(|_| 2)
            }
            ExprKind::Binary(op, l, r) => {
                let (a, b) = (self.expr(l, locals)?, self.expr(r, locals)?);
                match op {
                    BinaryOp::Join => match (a, b) {
                        (Some(a), Some(b)) => {
                            if a + b < 3 {
                                return Err(ResolveError::Arity {
                                    span,
                                    message: "join of two unary expressions has arity 0".into(),
                                });
                            }
                            Some(a + b - 2)
                        }
                        _ => None,
                    },
                    BinaryOp::Product => a.zip(b).map(|(a, b)| a + b),
                    BinaryOp::Union | BinaryOp::Difference | BinaryOp::Intersection => {
                        if let (Some(a), Some(b)) = (a, b) {
                            if a != b {
                                return Err(ResolveError::Arity {
                                    span,
                                    message: format!(
                                        "operands of `{}` have arities {a} and {b}",
                                        op.symbol()
                                    ),
                                });
                            }
                        }
                        a.or(b)
                    }
                }
            }
        };
        Ok(arity)
    }
}

impl ModelSchema {
    pub fn sig(&self, name: &str) -> Option<&SigDecl> {
        self.sig_index(name).map(|i| &self.sigs[i])
    }

    fn sig_index(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(Entity::Sig(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        match self.index.get(name) {
            Some(Entity::Field(i)) => Some(&self.fields[*i]),
            _ => None,
        }
    }

    pub fn pred(&self, name: &str) -> Option<&PredDecl> {
        self.pred_index(name).map(|i| &self.preds[i])
    }

    fn pred_index(&self, name: &str) -> Option<usize> {
        match self.index.get(name) {
            Some(Entity::Pred(i)) => Some(*i),
            _ => None,
        }
    }

    /// Whether `name` is declared as a sig, field or predicate.
    pub fn declares(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Direct parents: the `extends` parent or the `in` parents.
    pub fn parents(&self, name: &str) -> Vec<&str> {
        match self.sig(name).map(|s| &s.kind) {
            Some(SigKind::Extends(p)) => vec![p.as_str()],
            Some(SigKind::SubsetOf(ps)) => ps.iter().map(String::as_str).collect(),
            _ => Vec::new(),
        }
    }

    /// Sigs that directly `extends` `name`.
    pub fn children(&self, name: &str) -> impl Iterator<Item = &SigDecl> + '_ {
        let name = name.to_string();
        self.sigs
            .iter()
            .filter(move |s| matches!(&s.kind, SigKind::Extends(p) if *p == name))
    }

    /// `name` followed by its `extends` ancestors up to the top-level sig.
    pub fn extends_chain(&self, name: &str) -> Vec<&str> {
        let mut chain = Vec::new();
        let mut current = self.sig(name);
        while let Some(sig) = current {
            chain.push(sig.name.as_str());
            current = match &sig.kind {
                SigKind::Extends(p) => self.sig(p),
                _ => None,
            };
        }
        chain
    }

    /// Every sig reachable from `name` by parent edges, including `name`.
    pub fn supertypes(&self, name: &str) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![name];
        while let Some(n) = stack.pop() {
            if let Some(sig) = self.sig(n) {
                if out.insert(sig.name.as_str()) {
                    stack.extend(self.parents(n));
                }
            }
        }
        out
    }

    /// Whether `sub` is `sup` or reaches it through `extends`/`in` edges.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> Result<bool, ResolveError> {
        for name in [sub, sup] {
            if self.sig(name).is_none() {
                return Err(ResolveError::UnknownName {
                    span: Span::default(),
                    name: name.to_string(),
                });
            }
        }
        Ok(self.supertypes(sub).contains(sup))
    }

    /// Abstract with at least one `extends` child: holds no atoms directly.
    pub fn is_abstract_parent(&self, name: &str) -> bool {
        self.sig(name)
            .is_some_and(|s| s.is_abstract && self.children(name).next().is_some())
    }

    /// Sigs that may directly own atoms, in declaration order.
    pub fn concrete_sigs(&self) -> Vec<&str> {
        self.sigs
            .iter()
            .filter(|s| !s.is_subset() && !self.is_abstract_parent(&s.name))
            .map(|s| s.name.as_str())
            .collect()
    }

    pub fn is_concrete(&self, name: &str) -> bool {
        self.sig(name)
            .is_some_and(|s| !s.is_subset() && !self.is_abstract_parent(name))
    }

    /// Canonical JSON form of the schema.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("schema serialization cannot fail")
    }
}
