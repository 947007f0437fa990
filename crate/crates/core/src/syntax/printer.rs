//! Source rendering for expressions and formulas. Output re-parses to a
//! structurally identical tree; operands are parenthesised only where
//! precedence or associativity requires it.

use std::fmt;

use super::ast::*;

fn prec(e: &Expr) -> u8 {
    match e.kind {
        ExprKind::Binary(BinaryOp::Union | BinaryOp::Difference, ..) => 1,
        ExprKind::Binary(BinaryOp::Intersection, ..) => 2,
        ExprKind::Binary(BinaryOp::Product, ..) => 3,
        ExprKind::Binary(BinaryOp::Join, ..) => 4,
        _ => 5,
    }
}

/// An operand printed with parentheses when its precedence is below `min`.
struct Operand<'a>(&'a Expr, u8);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = prec(self);
        match &self.kind {
            ExprKind::Name(n) | ExprKind::Sig(n) | ExprKind::Field(n) | ExprKind::Var(n) => {
                f.write_str(n)
            }
            ExprKind::Univ => f.write_str("univ"),
            ExprKind::Iden => f.write_str("iden"),
            ExprKind::None => f.write_str("none"),
            ExprKind::Unary(op, e) => write!(f, "{}{}", op.symbol(), Operand(e, 5)),
            // Left-associative: a right operand at the same level needs parentheses.
            ExprKind::Binary(BinaryOp::Join, l, r) => {
                write!(f, "{}.{}", Operand(l, p), Operand(r, p + 1))
            }
            ExprKind::Binary(op, l, r) => {
                write!(f, "{} {} {}", Operand(l, p), op.symbol(), Operand(r, p + 1))
            }
        }
    }
}

fn formula_is_atomic(fm: &Formula) -> bool {
    matches!(
        fm.kind,
        FormulaKind::Compare(..)
            | FormulaKind::Mult(..)
            | FormulaKind::PredCall { .. }
            | FormulaKind::Block(_)
            | FormulaKind::Not(_)
    )
}

struct Sub<'a>(&'a Formula);

impl fmt::Display for Sub<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if formula_is_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FormulaKind::Compare(op, l, r) => {
                let sym = match op {
                    CompareOp::Subset => "in",
                    CompareOp::Equal => "=",
                    CompareOp::NotEqual => "!=",
                };
                write!(f, "{l} {sym} {r}")
            }
            FormulaKind::Mult(kind, e) => write!(f, "{} {e}", kind.as_str()),
            FormulaKind::Quantified {
                kind,
                disj,
                vars,
                body,
            } => {
                f.write_str(kind.as_str())?;
                if *disj {
                    f.write_str(" disj")?;
                }
                for (i, v) in vars.iter().enumerate() {
                    let sep = if i == 0 { " " } else { ", " };
                    write!(f, "{sep}{}: {}", v.name, v.domain)?;
                }
                write!(f, " | {body}")
            }
            FormulaKind::Not(inner) => match inner.kind {
                FormulaKind::PredCall { .. } | FormulaKind::Block(_) => write!(f, "!{inner}"),
                _ => write!(f, "!({inner})"),
            },
            FormulaKind::Logic(op, l, r) => {
                let sym = match op {
                    LogicOp::And => "&&",
                    LogicOp::Or => "||",
                    LogicOp::Iff => "<=>",
                };
                write!(f, "{} {sym} {}", Sub(l), Sub(r))
            }
            FormulaKind::Implies(c, t, e) => {
                write!(f, "{} => {}", Sub(c), Sub(t))?;
                if let Some(e) = e {
                    write!(f, " else {}", Sub(e))?;
                }
                Ok(())
            }
            FormulaKind::PredCall { name, args } => {
                f.write_str(name)?;
                if !args.is_empty() {
                    f.write_str("[")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str("]")?;
                }
                Ok(())
            }
            FormulaKind::Block(items) => {
                f.write_str("{")?;
                for item in items {
                    write!(f, " {item}")?;
                }
                f.write_str(" }")
            }
        }
    }
}
