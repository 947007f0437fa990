//! Lexing, parsing and printing of the supported Alloy subset.

mod ast;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{parse_formula, parse_model};

/// Source location: byte offset and length, plus 1-based line and column.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(offset: usize, len: usize, line: u32, column: u32) -> Self {
        Span {
            offset,
            len,
            line,
            column,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        if other.offset + other.len <= self.offset {
            return self;
        }
        Span {
            len: other.offset + other.len - self.offset,
            ..self
        }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: unsupported feature: {feature}")]
    Unsupported { span: Span, feature: String },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Unsupported { span, .. } => *span,
        }
    }
}
