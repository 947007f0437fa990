//! Recursive descent parser.
//!
//! Operator precedence, loosest first: quantifiers, `||`, `<=>`, `=>`/`else`,
//! `&&`, `!`, comparisons and multiplicity formulas, `+ -`, `&`, `->`, `.`,
//! unary `~ ^ *`.

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::{ParseError, Span};

type PResult<T> = Result<T, ParseError>;

/// Parse a complete model file.
pub fn parse_model(text: &str) -> PResult<SourceModel> {
    let mut p = Parser::new(tokenize(text)?);
    let declarations = p.model()?;
    Ok(SourceModel {
        text: text.to_string(),
        declarations,
    })
}

/// Parse a sequence of formulas without resolving names. A single formula
/// is returned as is; anything else is wrapped in a block.
pub fn parse_formula(text: &str) -> PResult<Formula> {
    let mut p = Parser::new(tokenize(text)?);
    let start = p.span();
    let mut items = p.formula_seq(&TokenKind::Eof)?;
    if items.len() == 1 {
        return Ok(items.pop().unwrap());
    }
    let span = start.to(p.prev_span());
    Ok(Formula::new(FormulaKind::Block(items), span))
}

fn unsupported_keyword(kw: Keyword) -> Option<&'static str> {
    Some(match kw {
        Keyword::Open => "module imports (`open`)",
        Keyword::Module => "module declarations (`module`)",
        Keyword::Fun => "functions (`fun`)",
        Keyword::Int => "integers (`Int`)",
        Keyword::Let => "`let` bindings",
        Keyword::Enum => "enumerations (`enum`)",
        Keyword::Seq => "sequences (`seq`)",
        Keyword::Sum => "integer sums (`sum`)",
        Keyword::This => "`this` references",
        Keyword::Private => "`private` declarations",
        Keyword::Var => "mutable declarations (`var`)",
        _ => return None,
    })
}

fn field_mult(kind: &TokenKind) -> Option<Mult> {
    match kind {
        TokenKind::Keyword(Keyword::Set) => Some(Mult::Set),
        TokenKind::Keyword(Keyword::Some) => Some(Mult::Some),
        TokenKind::Keyword(Keyword::Lone) => Some(Mult::Lone),
        TokenKind::Keyword(Keyword::One) => Some(Mult::One),
        _ => None,
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, n: usize) -> &TokenKind {
        let i = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        if self.pos == 0 {
            self.span()
        } else {
            self.tokens[self.pos - 1].span
        }
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        *self.peek() == TokenKind::Keyword(kw)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        self.eat(&TokenKind::Keyword(kw))
    }

    fn expected(&self, what: &str) -> ParseError {
        if let TokenKind::Keyword(kw) = self.peek() {
            if let Some(feature) = unsupported_keyword(*kw) {
                return self.unsupported(feature);
            }
        }
        ParseError::Syntax {
            span: self.span(),
            message: format!("expected {what}, found {}", self.peek().describe()),
        }
    }

    fn unsupported(&self, feature: &str) -> ParseError {
        ParseError::Unsupported {
            span: self.span(),
            feature: feature.to_string(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<Span> {
        if *self.peek() == kind {
            Ok(self.bump().span)
        } else {
            Err(self.expected(what))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek().clone() {
            TokenKind::Ident(name) => {
                let span = self.bump().span;
                Ok(Ident { name, span })
            }
            _ => Err(self.expected(what)),
        }
    }

    // ----- paragraphs -----

    fn model(&mut self) -> PResult<Vec<Declaration>> {
        let mut decls = Vec::new();
        loop {
            let decl = match self.peek() {
                TokenKind::Eof => return Ok(decls),
                TokenKind::Keyword(
                    Keyword::Abstract | Keyword::Sig | Keyword::One | Keyword::Lone | Keyword::Some,
                ) => Declaration::Sig(self.sig_paragraph()?),
                TokenKind::Keyword(Keyword::Pred) => Declaration::Pred(self.pred_paragraph()?),
                TokenKind::Keyword(Keyword::Assert) => {
                    let start = self.bump().span;
                    let name = self.ident("an assertion name")?;
                    let body = self.block()?;
                    Declaration::Assert(AssertParagraph {
                        name,
                        body,
                        span: start.to(self.prev_span()),
                    })
                }
                TokenKind::Keyword(Keyword::Fact) => {
                    let start = self.bump().span;
                    let name = match self.peek() {
                        TokenKind::Ident(_) => Some(self.ident("a fact name")?),
                        _ => None,
                    };
                    let body = self.block()?;
                    Declaration::Fact(FactParagraph {
                        name,
                        body,
                        span: start.to(self.prev_span()),
                    })
                }
                TokenKind::Keyword(Keyword::Run | Keyword::Check) => {
                    Declaration::Command(self.command()?)
                }
                _ => {
                    return Err(
                        self.expected("a signature, predicate, assertion, fact or command")
                    )
                }
            };
            decls.push(decl);
        }
    }

    fn sig_paragraph(&mut self) -> PResult<SigParagraph> {
        let start = self.span();
        let mut is_abstract = false;
        let mut multiplicity = None;
        loop {
            match self.peek() {
                TokenKind::Keyword(Keyword::Abstract) if !is_abstract => {
                    is_abstract = true;
                    self.bump();
                }
                TokenKind::Keyword(kw @ (Keyword::One | Keyword::Lone | Keyword::Some))
                    if multiplicity.is_none() =>
                {
                    multiplicity = Some(match kw {
                        Keyword::One => SigMultiplicity::One,
                        Keyword::Lone => SigMultiplicity::Lone,
                        _ => SigMultiplicity::Some,
                    });
                    self.bump();
                }
                TokenKind::Keyword(Keyword::Sig) => {
                    self.bump();
                    break;
                }
                _ => return Err(self.expected("`sig`")),
            }
        }

        let mut names = vec![self.ident("a signature name")?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.ident("a signature name")?);
        }

        let parent = if self.eat_kw(Keyword::Extends) {
            Some(SigParent::Extends(self.ident("a parent signature")?))
        } else if self.eat_kw(Keyword::In) {
            let mut parents = vec![self.ident("a parent signature")?];
            while self.eat(&TokenKind::Plus) {
                parents.push(self.ident("a parent signature")?);
            }
            Some(SigParent::In(parents))
        } else {
            None
        };

        self.expect(TokenKind::LBrace, "`{`")?;
        let mut fields = Vec::new();
        while *self.peek() != TokenKind::RBrace {
            fields.push(self.field()?);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::RBrace, "`,` or `}`")?;
        if *self.peek() == TokenKind::LBrace {
            return Err(self.unsupported("signature facts"));
        }

        Ok(SigParagraph {
            names,
            is_abstract,
            multiplicity,
            parent,
            fields,
            span: start.to(self.prev_span()),
        })
    }

    fn field(&mut self) -> PResult<FieldParagraph> {
        let start = self.span();
        let mut names = vec![self.ident("a field name")?];
        while self.eat(&TokenKind::Comma) {
            names.push(self.ident("a field name")?);
        }
        self.expect(TokenKind::Colon, "`:`")?;
        if self.at_kw(Keyword::Disj) {
            return Err(self.unsupported("disjoint field declarations"));
        }

        let leading = field_mult(self.peek());
        if leading.is_some() {
            self.bump();
        }
        let mut columns = vec![self.sig_name()?];
        let mut arrows = Vec::new();
        loop {
            let left = field_mult(self.peek());
            if left.is_some() {
                if *self.peek_at(1) != TokenKind::Arrow {
                    break;
                }
                self.bump();
            }
            if !self.eat(&TokenKind::Arrow) {
                break;
            }
            let right = field_mult(self.peek());
            if right.is_some() {
                self.bump();
            }
            columns.push(self.sig_name()?);
            arrows.push(ArrowSyntax { left, right });
        }
        if leading.is_some() && !arrows.is_empty() {
            return Err(ParseError::Unsupported {
                span: start.to(self.prev_span()),
                feature: "multiplicity keyword before an arrow type".to_string(),
            });
        }
        if matches!(
            self.peek(),
            TokenKind::Plus
                | TokenKind::Minus
                | TokenKind::Amp
                | TokenKind::Dot
                | TokenKind::PlusPlus
                | TokenKind::DomainRestrict
                | TokenKind::RangeRestrict
                | TokenKind::LBracket
        ) {
            return Err(self.unsupported("compound field types"));
        }

        Ok(FieldParagraph {
            names,
            ty: FieldType {
                leading,
                columns,
                arrows,
            },
            span: start.to(self.prev_span()),
        })
    }

    fn sig_name(&mut self) -> PResult<Ident> {
        match self.peek() {
            TokenKind::Keyword(Keyword::Univ) => Err(self.unsupported("`univ` in declarations")),
            _ => self.ident("a signature name"),
        }
    }

    fn pred_paragraph(&mut self) -> PResult<PredParagraph> {
        let start = self.bump().span;
        if matches!(self.peek(), TokenKind::Ident(_)) && *self.peek_at(1) == TokenKind::Dot {
            return Err(self.unsupported("receiver predicates (`pred S.p`)"));
        }
        let name = self.ident("a predicate name")?;
        let mut params = Vec::new();
        let close = match self.peek() {
            TokenKind::LBracket => Some(TokenKind::RBracket),
            TokenKind::LParen => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(close) = close {
            self.bump();
            while *self.peek() != close {
                let mut names = vec![self.ident("a parameter name")?];
                while self.eat(&TokenKind::Comma) {
                    names.push(self.ident("a parameter name")?);
                }
                self.expect(TokenKind::Colon, "`:`")?;
                if self.at_kw(Keyword::Disj) || field_mult(self.peek()).is_some() {
                    return Err(self.unsupported("parameter multiplicities"));
                }
                let sig = self.sig_name()?;
                for n in names {
                    params.push((n, sig.clone()));
                }
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            self.expect(close, "`,` or a closing bracket")?;
        }
        let body = self.block()?;
        Ok(PredParagraph {
            name,
            params,
            body,
            span: start.to(self.prev_span()),
        })
    }

    fn command(&mut self) -> PResult<CommandDecl> {
        let start = self.span();
        let kind = if self.eat_kw(Keyword::Run) {
            CommandKind::Run
        } else {
            self.bump();
            CommandKind::Check
        };
        let target = match self.peek() {
            TokenKind::Ident(_) => CommandTarget::Named(self.ident("a command target")?),
            TokenKind::LBrace => CommandTarget::Block(self.block()?),
            _ => return Err(self.expected("a predicate name or `{`")),
        };
        let mut scope = None;
        if self.eat_kw(Keyword::For) {
            if let TokenKind::Number(n) = *self.peek() {
                scope = Some(n);
                self.bump();
            }
            while matches!(
                self.peek(),
                TokenKind::Number(_)
                    | TokenKind::Ident(_)
                    | TokenKind::Comma
                    | TokenKind::Keyword(Keyword::But | Keyword::Exactly | Keyword::Int)
            ) {
                self.bump();
            }
        }
        if self.eat_kw(Keyword::Expect) {
            match self.peek() {
                TokenKind::Number(_) => {
                    self.bump();
                }
                _ => return Err(self.expected("a number after `expect`")),
            }
        }
        Ok(CommandDecl {
            kind,
            target,
            scope,
            span: start.to(self.prev_span()),
        })
    }

    // ----- formulas -----

    fn block(&mut self) -> PResult<Formula> {
        let start = self.expect(TokenKind::LBrace, "`{`")?;
        let items = self.formula_seq(&TokenKind::RBrace)?;
        self.expect(TokenKind::RBrace, "`}`")?;
        Ok(Formula::new(
            FormulaKind::Block(items),
            start.to(self.prev_span()),
        ))
    }

    fn formula_seq(&mut self, end: &TokenKind) -> PResult<Vec<Formula>> {
        let mut items = Vec::new();
        while self.peek() != end {
            if *self.peek() == TokenKind::Eof {
                return Err(self.expected(&end.describe()));
            }
            items.push(self.formula()?);
            self.eat(&TokenKind::Comma);
        }
        Ok(items)
    }

    fn formula(&mut self) -> PResult<Formula> {
        self.or_formula()
    }

    fn or_formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.iff_formula()?;
        while matches!(
            self.peek(),
            TokenKind::OrOr | TokenKind::Keyword(Keyword::Or)
        ) {
            self.bump();
            let rhs = self.iff_formula()?;
            lhs = logic(LogicOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn iff_formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implies_formula()?;
        while matches!(
            self.peek(),
            TokenKind::IffArrow | TokenKind::Keyword(Keyword::Iff)
        ) {
            self.bump();
            let rhs = self.implies_formula()?;
            lhs = logic(LogicOp::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies_formula(&mut self) -> PResult<Formula> {
        let cond = self.and_formula()?;
        if !matches!(
            self.peek(),
            TokenKind::FatArrow | TokenKind::Keyword(Keyword::Implies)
        ) {
            return Ok(cond);
        }
        self.bump();
        let then = self.implies_formula()?;
        let otherwise = if self.eat_kw(Keyword::Else) {
            Some(Box::new(self.implies_formula()?))
        } else {
            None
        };
        let span = cond.span.to(self.prev_span());
        Ok(Formula::new(
            FormulaKind::Implies(Box::new(cond), Box::new(then), otherwise),
            span,
        ))
    }

    fn and_formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.not_formula()?;
        while matches!(
            self.peek(),
            TokenKind::AndAnd | TokenKind::Keyword(Keyword::And)
        ) {
            self.bump();
            let rhs = self.not_formula()?;
            lhs = logic(LogicOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_formula(&mut self) -> PResult<Formula> {
        if matches!(
            self.peek(),
            TokenKind::Bang | TokenKind::Keyword(Keyword::Not)
        ) {
            let start = self.bump().span;
            let inner = self.not_formula()?;
            let span = start.to(inner.span);
            return Ok(Formula::new(FormulaKind::Not(Box::new(inner)), span));
        }
        self.atom_formula()
    }

    fn is_quantifier_start(&self) -> bool {
        match self.peek() {
            TokenKind::Keyword(Keyword::All) => true,
            TokenKind::Keyword(Keyword::Some | Keyword::No | Keyword::Lone | Keyword::One) => {
                match self.peek_at(1) {
                    TokenKind::Keyword(Keyword::Disj) => true,
                    TokenKind::Ident(_) => {
                        matches!(self.peek_at(2), TokenKind::Comma | TokenKind::Colon)
                    }
                    _ => false,
                }
            }
            _ => false,
        }
    }

    fn atom_formula(&mut self) -> PResult<Formula> {
        if self.is_quantifier_start() {
            return self.quantified();
        }
        match self.peek() {
            TokenKind::LBrace => self.block(),
            TokenKind::Keyword(kw @ (Keyword::No | Keyword::Some | Keyword::Lone | Keyword::One)) => {
                let kind = match kw {
                    Keyword::No => MultKind::No,
                    Keyword::Some => MultKind::Some,
                    Keyword::Lone => MultKind::Lone,
                    _ => MultKind::One,
                };
                let start = self.bump().span;
                let e = self.expr()?;
                let span = start.to(e.span);
                Ok(Formula::new(FormulaKind::Mult(kind, e), span))
            }
            TokenKind::LParen => {
                // `(` opens either an expression or a formula; try the
                // comparison reading first and fall back.
                let save = self.pos;
                let first = match self.comparison_or_call() {
                    Ok(f) => return Ok(f),
                    Err(e) => e,
                };
                self.pos = save;
                let start = self.bump().span;
                let second = self.formula().and_then(|f| {
                    self.expect(TokenKind::RParen, "`)`")?;
                    Ok(f)
                });
                match second {
                    Ok(mut f) => {
                        f.span = start.to(self.prev_span());
                        Ok(f)
                    }
                    Err(e) if e.span().offset >= first.span().offset => Err(e),
                    Err(_) => Err(first),
                }
            }
            _ => self.comparison_or_call(),
        }
    }

    fn quantified(&mut self) -> PResult<Formula> {
        let start = self.span();
        let kind = match self.bump().kind {
            TokenKind::Keyword(Keyword::All) => QuantKind::All,
            TokenKind::Keyword(Keyword::Some) => QuantKind::Some,
            TokenKind::Keyword(Keyword::No) => QuantKind::No,
            TokenKind::Keyword(Keyword::Lone) => QuantKind::Lone,
            _ => QuantKind::One,
        };
        let disj = self.eat_kw(Keyword::Disj);
        let mut vars = Vec::new();
        loop {
            let mut names = vec![self.ident("a variable name")?];
            while self.eat(&TokenKind::Comma) {
                names.push(self.ident("a variable name")?);
            }
            self.expect(TokenKind::Colon, "`:`")?;
            if self.at_kw(Keyword::Disj) {
                return Err(self.unsupported("per-declaration `disj`"));
            }
            if field_mult(self.peek()).is_some() {
                return Err(self.unsupported("multiplicities in quantifier declarations"));
            }
            let domain = self.expr()?;
            for n in names {
                vars.push(QuantVar {
                    name: n.name,
                    domain: domain.clone(),
                    span: n.span,
                });
            }
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        let body = if self.eat(&TokenKind::Bar) {
            self.formula()?
        } else if *self.peek() == TokenKind::LBrace {
            self.block()?
        } else {
            return Err(self.expected("`|` or `{`"));
        };
        let span = start.to(body.span);
        Ok(Formula::new(
            FormulaKind::Quantified {
                kind,
                disj,
                vars,
                body: Box::new(body),
            },
            span,
        ))
    }

    fn continues_expression(&self) -> bool {
        matches!(
            self.peek(),
            TokenKind::Dot
                | TokenKind::Arrow
                | TokenKind::Plus
                | TokenKind::Minus
                | TokenKind::Amp
                | TokenKind::LBracket
                | TokenKind::Eq
                | TokenKind::NotEq
                | TokenKind::Keyword(Keyword::In)
        ) || (matches!(
            self.peek(),
            TokenKind::Bang | TokenKind::Keyword(Keyword::Not)
        ) && matches!(
            self.peek_at(1),
            TokenKind::Keyword(Keyword::In) | TokenKind::Eq
        ))
    }

    fn comparison_or_call(&mut self) -> PResult<Formula> {
        if let TokenKind::Ident(name) = self.peek().clone() {
            if *self.peek_at(1) == TokenKind::LBracket {
                let start = self.bump().span;
                self.bump();
                let mut args = Vec::new();
                while *self.peek() != TokenKind::RBracket {
                    args.push(self.expr()?);
                    if !self.eat(&TokenKind::Comma) {
                        break;
                    }
                }
                self.expect(TokenKind::RBracket, "`,` or `]`")?;
                let span = start.to(self.prev_span());
                if self.continues_expression() {
                    return Err(ParseError::Unsupported {
                        span,
                        feature: "box join (`e[x]`)".to_string(),
                    });
                }
                return Ok(Formula::new(FormulaKind::PredCall { name, args }, span));
            }
        }

        let lhs = self.expr()?;
        let negated = matches!(
            self.peek(),
            TokenKind::Bang | TokenKind::Keyword(Keyword::Not)
        ) && matches!(
            self.peek_at(1),
            TokenKind::Keyword(Keyword::In) | TokenKind::Eq
        );
        if negated {
            self.bump();
        }
        let op = match self.peek() {
            TokenKind::Keyword(Keyword::In) => CompareOp::Subset,
            TokenKind::Eq => CompareOp::Equal,
            TokenKind::NotEq => CompareOp::NotEqual,
            TokenKind::Lt | TokenKind::Gt | TokenKind::Le | TokenKind::Ge => {
                return Err(self.unsupported("integer comparisons"))
            }
            _ => {
                if let ExprKind::Name(name) = &lhs.kind {
                    return Ok(Formula::new(
                        FormulaKind::PredCall {
                            name: name.clone(),
                            args: Vec::new(),
                        },
                        lhs.span,
                    ));
                }
                return Err(self.expected("a comparison operator (`in`, `=`, `!=`)"));
            }
        };
        self.bump();
        let rhs = self.expr()?;
        let span = lhs.span.to(rhs.span);
        let cmp = Formula::new(FormulaKind::Compare(op, lhs, rhs), span);
        Ok(if negated {
            Formula::new(FormulaKind::Not(Box::new(cmp)), span)
        } else {
            cmp
        })
    }

    // ----- expressions -----

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.intersection()?;
        loop {
            let op = match self.peek() {
                TokenKind::Plus => BinaryOp::Union,
                TokenKind::Minus => BinaryOp::Difference,
                TokenKind::PlusPlus => return Err(self.unsupported("relational override (`++`)")),
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.intersection()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn intersection(&mut self) -> PResult<Expr> {
        let mut lhs = self.product()?;
        while self.eat(&TokenKind::Amp) {
            let rhs = self.product()?;
            lhs = binary(BinaryOp::Intersection, lhs, rhs);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut lhs = self.join()?;
        loop {
            if field_mult(self.peek()).is_some() && *self.peek_at(1) == TokenKind::Arrow {
                return Err(self.unsupported("arrow multiplicities in expressions"));
            }
            if !self.eat(&TokenKind::Arrow) {
                return Ok(lhs);
            }
            if field_mult(self.peek()).is_some() {
                return Err(self.unsupported("arrow multiplicities in expressions"));
            }
            let rhs = self.join()?;
            lhs = binary(BinaryOp::Product, lhs, rhs);
        }
    }

    fn join(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                TokenKind::Dot => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = binary(BinaryOp::Join, lhs, rhs);
                }
                TokenKind::LBracket => return Err(self.unsupported("box join (`e[x]`)")),
                TokenKind::DomainRestrict | TokenKind::RangeRestrict => {
                    return Err(self.unsupported("domain/range restriction"))
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            TokenKind::Tilde => UnaryOp::Transpose,
            TokenKind::Caret => UnaryOp::Closure,
            TokenKind::Star => UnaryOp::ReflexiveClosure,
            TokenKind::Hash => return Err(self.unsupported("cardinality (`#`)")),
            _ => return self.primary(),
        };
        let start = self.bump().span;
        let inner = self.unary()?;
        let span = start.to(inner.span);
        Ok(Expr::new(ExprKind::Unary(op, Box::new(inner)), span))
    }

    fn primary(&mut self) -> PResult<Expr> {
        let kind = match self.peek().clone() {
            TokenKind::Ident(name) => ExprKind::Name(name),
            TokenKind::Keyword(Keyword::Univ) => ExprKind::Univ,
            TokenKind::Keyword(Keyword::Iden) => ExprKind::Iden,
            TokenKind::Keyword(Keyword::None) => ExprKind::None,
            TokenKind::LParen => {
                let start = self.bump().span;
                let mut inner = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                inner.span = start.to(self.prev_span());
                return Ok(inner);
            }
            TokenKind::Number(_) => return Err(self.unsupported("integer literals")),
            TokenKind::LBrace => return Err(self.unsupported("set comprehensions")),
            TokenKind::At => return Err(self.unsupported("`@` field references")),
            _ => return Err(self.expected("an expression")),
        };
        let span = self.bump().span;
        Ok(Expr::new(kind, span))
    }
}

fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = lhs.span.to(rhs.span);
    Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span)
}

fn logic(op: LogicOp, lhs: Formula, rhs: Formula) -> Formula {
    let span = lhs.span.to(rhs.span);
    Formula::new(FormulaKind::Logic(op, Box::new(lhs), Box::new(rhs)), span)
}
