//! Tokenizer for the supported Alloy subset.

use super::{ParseError, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Abstract,
    All,
    And,
    Assert,
    But,
    Check,
    Disj,
    Else,
    Exactly,
    Expect,
    Extends,
    Fact,
    For,
    Iden,
    Iff,
    Implies,
    In,
    Lone,
    No,
    None,
    Not,
    One,
    Or,
    Pred,
    Run,
    Set,
    Sig,
    Some,
    Univ,
    // Recognised so they can be rejected with a precise message.
    Enum,
    Fun,
    Int,
    Let,
    Module,
    Open,
    Private,
    Seq,
    Sum,
    This,
    Var,
}

impl Keyword {
    fn from_word(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Option::Some(match word {
            "abstract" => Abstract,
            "all" => All,
            "and" => And,
            "assert" => Assert,
            "but" => But,
            "check" => Check,
            "disj" => Disj,
            "else" => Else,
            "exactly" => Exactly,
            "expect" => Expect,
            "extends" => Extends,
            "fact" => Fact,
            "for" => For,
            "iden" => Iden,
            "iff" => Iff,
            "implies" => Implies,
            "in" => In,
            "lone" => Lone,
            "no" => No,
            "none" => None,
            "not" => Not,
            "one" => One,
            "or" => Or,
            "pred" => Pred,
            "run" => Run,
            "set" => Set,
            "sig" => Sig,
            "some" => Some,
            "univ" => Univ,
            "enum" => Enum,
            "fun" => Fun,
            "Int" | "int" => Int,
            "let" => Let,
            "module" => Module,
            "open" => Open,
            "private" => Private,
            "seq" => Seq,
            "sum" => Sum,
            "this" => This,
            "var" => Var,
            _ => return Option::None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Abstract => "abstract",
            All => "all",
            And => "and",
            Assert => "assert",
            But => "but",
            Check => "check",
            Disj => "disj",
            Else => "else",
            Exactly => "exactly",
            Expect => "expect",
            Extends => "extends",
            Fact => "fact",
            For => "for",
            Iden => "iden",
            Iff => "iff",
            Implies => "implies",
            In => "in",
            Lone => "lone",
            No => "no",
            None => "none",
            Not => "not",
            One => "one",
            Or => "or",
            Pred => "pred",
            Run => "run",
            Set => "set",
            Sig => "sig",
            Some => "some",
            Univ => "univ",
            Enum => "enum",
            Fun => "fun",
            Int => "Int",
            Let => "let",
            Module => "module",
            Open => "open",
            Private => "private",
            Seq => "seq",
            Sum => "sum",
            This => "this",
            Var => "var",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Number(u64),
    Keyword(Keyword),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    Bar,
    Dot,
    Tilde,
    Caret,
    Star,
    Plus,
    PlusPlus,
    Minus,
    Amp,
    Arrow,
    Eq,
    NotEq,
    Bang,
    FatArrow,
    IffArrow,
    AndAnd,
    OrOr,
    Hash,
    Lt,
    Gt,
    Le,
    Ge,
    DomainRestrict,
    RangeRestrict,
    At,
    Slash,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::Number(n) => format!("number `{n}`"),
            TokenKind::Keyword(kw) => format!("keyword `{}`", kw.as_str()),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        use TokenKind::*;
        match self {
            LBrace => "{",
            RBrace => "}",
            LBracket => "[",
            RBracket => "]",
            LParen => "(",
            RParen => ")",
            Comma => ",",
            Colon => ":",
            Bar => "|",
            Dot => ".",
            Tilde => "~",
            Caret => "^",
            Star => "*",
            Plus => "+",
            PlusPlus => "++",
            Minus => "-",
            Amp => "&",
            Arrow => "->",
            Eq => "=",
            NotEq => "!=",
            Bang => "!",
            FatArrow => "=>",
            IffArrow => "<=>",
            AndAnd => "&&",
            OrOr => "||",
            Hash => "#",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            DomainRestrict => "<:",
            RangeRestrict => ":>",
            At => "@",
            Slash => "/",
            Ident(_) | Number(_) | Keyword(_) | Eof => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.text[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.text[self.pos..].starts_with(s)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        text,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();

    loop {
        skip_trivia(&mut cur)?;
        let start = cur.pos;
        let (line, col) = (cur.line, cur.col);
        let Some(c) = cur.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span: Span::new(start, 0, line, col),
            });
            return Ok(tokens);
        };

        let kind = if is_ident_start(c) {
            while cur.peek().is_some_and(is_ident_continue) {
                cur.bump();
            }
            let word = &text[start..cur.pos];
            match Keyword::from_word(word) {
                Some(kw) => TokenKind::Keyword(kw),
                None => TokenKind::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            let digits = &text[start..cur.pos];
            let value = digits.parse().map_err(|_| ParseError::Syntax {
                span: Span::new(start, cur.pos - start, line, col),
                message: format!("integer literal `{digits}` is out of range"),
            })?;
            TokenKind::Number(value)
        } else {
            lex_symbol(&mut cur).ok_or_else(|| ParseError::Syntax {
                span: Span::new(start, c.len_utf8(), line, col),
                message: format!("unexpected character `{c}`"),
            })?
        };
        tokens.push(Token {
            kind,
            span: Span::new(start, cur.pos - start, line, col),
        });
    }
}

fn skip_trivia(cur: &mut Cursor<'_>) -> Result<(), ParseError> {
    loop {
        match cur.peek() {
            Some(c) if c.is_whitespace() => {
                cur.bump();
            }
            Some('/') if cur.peek_at(1) == Some('/') => skip_line(cur),
            Some('-') if cur.peek_at(1) == Some('-') => skip_line(cur),
            Some('/') if cur.peek_at(1) == Some('*') => {
                let (start, line, col) = (cur.pos, cur.line, cur.col);
                cur.bump();
                cur.bump();
                loop {
                    if cur.starts_with("*/") {
                        cur.bump();
                        cur.bump();
                        break;
                    }
                    if cur.bump().is_none() {
                        return Err(ParseError::Syntax {
                            span: Span::new(start, 2, line, col),
                            message: "unterminated block comment".to_string(),
                        });
                    }
                }
            }
            _ => return Ok(()),
        }
    }
}

fn skip_line(cur: &mut Cursor<'_>) {
    while let Some(c) = cur.bump() {
        if c == '\n' {
            break;
        }
    }
}

fn lex_symbol(cur: &mut Cursor<'_>) -> Option<TokenKind> {
    use TokenKind::*;
    const TABLE: &[(&str, TokenKind)] = &[
        ("<=>", IffArrow),
        ("->", Arrow),
        ("=>", FatArrow),
        ("!=", NotEq),
        ("&&", AndAnd),
        ("||", OrOr),
        ("++", PlusPlus),
        ("<=", Le),
        ("=<", Le),
        (">=", Ge),
        ("<:", DomainRestrict),
        (":>", RangeRestrict),
        ("{", LBrace),
        ("}", RBrace),
        ("[", LBracket),
        ("]", RBracket),
        ("(", LParen),
        (")", RParen),
        (",", Comma),
        (":", Colon),
        ("|", Bar),
        (".", Dot),
        ("~", Tilde),
        ("^", Caret),
        ("*", Star),
        ("+", Plus),
        ("-", Minus),
        ("&", Amp),
        ("=", Eq),
        ("!", Bang),
        ("#", Hash),
        ("<", Lt),
        (">", Gt),
        ("@", At),
        ("/", Slash),
    ];
    for (text, kind) in TABLE {
        if cur.starts_with(text) {
            for _ in 0..text.chars().count() {
                cur.bump();
            }
            return Some(kind.clone());
        }
    }
    None
}
