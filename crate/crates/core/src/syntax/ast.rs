//! Syntax tree for models and formulas.
//!
//! `Expr` and `Formula` carry source spans, but their equality is structural:
//! two trees compare equal when they differ only in positions.

use serde::Serialize;

use super::Span;

/// A parsed model file. Declarations keep their textual order.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    pub text: String,
    pub declarations: Vec<Declaration>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Sig(SigParagraph),
    Pred(PredParagraph),
    Assert(AssertParagraph),
    Fact(FactParagraph),
    Command(CommandDecl),
}

impl Declaration {
    pub fn span(&self) -> Span {
        match self {
            Declaration::Sig(d) => d.span,
            Declaration::Pred(d) => d.span,
            Declaration::Assert(d) => d.span,
            Declaration::Fact(d) => d.span,
            Declaration::Command(d) => d.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// Cardinality keyword on a signature declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SigMultiplicity {
    One,
    Lone,
    Some,
    Any,
}

/// Multiplicity keyword on a field or arrow position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mult {
    Set,
    Some,
    Lone,
    One,
}

impl Mult {
    pub fn as_str(self) -> &'static str {
        match self {
            Mult::Set => "set",
            Mult::Some => "some",
            Mult::Lone => "lone",
            Mult::One => "one",
        }
    }

    /// Whether `count` is an admissible cardinality.
    pub fn admits(self, count: usize) -> bool {
        match self {
            Mult::Set => true,
            Mult::Some => count >= 1,
            Mult::Lone => count <= 1,
            Mult::One => count == 1,
        }
    }

    pub fn has_upper_bound(self) -> bool {
        matches!(self, Mult::Lone | Mult::One)
    }

    pub fn has_lower_bound(self) -> bool {
        matches!(self, Mult::Some | Mult::One)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SigParent {
    Extends(Ident),
    In(Vec<Ident>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigParagraph {
    pub names: Vec<Ident>,
    pub is_abstract: bool,
    pub multiplicity: Option<SigMultiplicity>,
    pub parent: Option<SigParent>,
    pub fields: Vec<FieldParagraph>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldParagraph {
    pub names: Vec<Ident>,
    pub ty: FieldType,
    pub span: Span,
}

/// `[mult] A` or `A [m] -> [m] B ...`. `arrows[i]` sits between
/// `columns[i]` and `columns[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldType {
    pub leading: Option<Mult>,
    pub columns: Vec<Ident>,
    pub arrows: Vec<ArrowSyntax>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrowSyntax {
    pub left: Option<Mult>,
    pub right: Option<Mult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredParagraph {
    pub name: Ident,
    pub params: Vec<(Ident, Ident)>,
    pub body: Formula,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssertParagraph {
    pub name: Ident,
    pub body: Formula,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactParagraph {
    pub name: Option<Ident>,
    pub body: Formula,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Run,
    Check,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandTarget {
    Named(Ident),
    Block(Formula),
}

/// `run`/`check` commands are kept for completeness; nothing downstream
/// interprets them.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandDecl {
    pub kind: CommandKind,
    pub target: CommandTarget,
    pub scope: Option<u64>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Transpose,
    Closure,
    ReflexiveClosure,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Transpose => "~",
            UnaryOp::Closure => "^",
            UnaryOp::ReflexiveClosure => "*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Join,
    Product,
    Union,
    Difference,
    Intersection,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Join => ".",
            BinaryOp::Product => "->",
            BinaryOp::Union => "+",
            BinaryOp::Difference => "-",
            BinaryOp::Intersection => "&",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    /// A name the resolver has not classified yet.
    Name(String),
    Sig(String),
    Field(String),
    Var(String),
    Univ,
    Iden,
    None,
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Node without a source position, for trees built in code.
    pub fn synthetic(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Self {
        Expr::synthetic(ExprKind::Unary(op, Box::new(e)))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Self {
        Expr::synthetic(ExprKind::Binary(op, Box::new(l), Box::new(r)))
    }

    pub fn join(l: Expr, r: Expr) -> Self {
        Expr::binary(BinaryOp::Join, l, r)
    }

    /// The textual name of a name-like leaf.
    pub fn leaf_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Name(n) | ExprKind::Sig(n) | ExprKind::Field(n) | ExprKind::Var(n) => {
                Some(n)
            }
            _ => None,
        }
    }

    pub fn walk(&self, visit: &mut impl FnMut(&Expr)) {
        visit(self);
        match &self.kind {
            ExprKind::Unary(_, e) => e.walk(visit),
            ExprKind::Binary(_, l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareOp {
    Subset,
    Equal,
    NotEqual,
}

/// Multiplicity formula keyword (`no e`, `some e`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultKind {
    No,
    Some,
    Lone,
    One,
}

impl MultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MultKind::No => "no",
            MultKind::Some => "some",
            MultKind::Lone => "lone",
            MultKind::One => "one",
        }
    }

    pub fn admits(self, count: usize) -> bool {
        match self {
            MultKind::No => count == 0,
            MultKind::Some => count >= 1,
            MultKind::Lone => count <= 1,
            MultKind::One => count == 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantKind {
    All,
    Some,
    No,
    Lone,
    One,
}

impl QuantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuantKind::All => "all",
            QuantKind::Some => "some",
            QuantKind::No => "no",
            QuantKind::Lone => "lone",
            QuantKind::One => "one",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicOp {
    And,
    Or,
    Iff,
}

#[derive(Debug, Clone)]
pub struct QuantVar {
    pub name: String,
    pub domain: Expr,
    pub span: Span,
}

impl PartialEq for QuantVar {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.domain == other.domain
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormulaKind {
    Compare(CompareOp, Expr, Expr),
    Mult(MultKind, Expr),
    Quantified {
        kind: QuantKind,
        disj: bool,
        vars: Vec<QuantVar>,
        body: Box<Formula>,
    },
    Not(Box<Formula>),
    Logic(LogicOp, Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>, Option<Box<Formula>>),
    PredCall { name: String, args: Vec<Expr> },
    Block(Vec<Formula>),
}

#[derive(Debug, Clone)]
pub struct Formula {
    pub kind: FormulaKind,
    pub span: Span,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Formula {
    pub fn new(kind: FormulaKind, span: Span) -> Self {
        Formula { kind, span }
    }

    pub fn synthetic(kind: FormulaKind) -> Self {
        Formula {
            kind,
            span: Span::default(),
        }
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::synthetic(FormulaKind::Logic(LogicOp::And, Box::new(l), Box::new(r)))
    }

    pub fn not(f: Formula) -> Self {
        Formula::synthetic(FormulaKind::Not(Box::new(f)))
    }

    /// Top-level conjuncts, looking through blocks and `and`.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        self.collect_conjuncts(&mut out);
        out
    }

    fn collect_conjuncts<'a>(&'a self, out: &mut Vec<&'a Formula>) {
        match &self.kind {
            FormulaKind::Block(items) => items.iter().for_each(|f| f.collect_conjuncts(out)),
            FormulaKind::Logic(LogicOp::And, l, r) => {
                l.collect_conjuncts(out);
                r.collect_conjuncts(out);
            }
            _ => out.push(self),
        }
    }

    /// Visit every expression reachable from this formula, including
    /// quantifier domains and call arguments.
    pub fn walk_exprs(&self, visit: &mut impl FnMut(&Expr)) {
        match &self.kind {
            FormulaKind::Compare(_, l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            FormulaKind::Mult(_, e) => e.walk(visit),
            FormulaKind::Quantified { vars, body, .. } => {
                for v in vars {
                    v.domain.walk(visit);
                }
                body.walk_exprs(visit);
            }
            FormulaKind::Not(f) => f.walk_exprs(visit),
            FormulaKind::Logic(_, l, r) => {
                l.walk_exprs(visit);
                r.walk_exprs(visit);
            }
            FormulaKind::Implies(c, t, e) => {
                c.walk_exprs(visit);
                t.walk_exprs(visit);
                if let Some(e) = e {
                    e.walk_exprs(visit);
                }
            }
            FormulaKind::PredCall { args, .. } => args.iter().for_each(|a| a.walk(visit)),
            FormulaKind::Block(items) => items.iter().for_each(|f| f.walk_exprs(visit)),
        }
    }

    /// Names of predicates called anywhere in this formula.
    pub fn called_preds(&self, out: &mut Vec<String>) {
        match &self.kind {
            FormulaKind::PredCall { name, .. } => out.push(name.clone()),
            FormulaKind::Quantified { body, .. } | FormulaKind::Not(body) => {
                body.called_preds(out)
            }
            FormulaKind::Logic(_, l, r) => {
                l.called_preds(out);
                r.called_preds(out);
            }
            FormulaKind::Implies(c, t, e) => {
                c.called_preds(out);
                t.called_preds(out);
                if let Some(e) = e {
                    e.called_preds(out);
                }
            }
            FormulaKind::Block(items) => items.iter().for_each(|f| f.called_preds(out)),
            FormulaKind::Compare(..) | FormulaKind::Mult(..) => {}
        }
    }
}
