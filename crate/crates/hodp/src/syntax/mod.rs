//! Reading and writing the textual AFSM format.

mod lexer;
mod parser;
mod print;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_afsm, parse_term, TermScope};
pub use print::print_term;

/// A 1-based location in the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{span}: parse error: {message}")]
    Parse { span: SourceSpan, message: String },
    #[error("{span}: type error: {message}")]
    Type { span: SourceSpan, message: String },
    #[error("{span}: pattern error: {message}")]
    Pattern { span: SourceSpan, message: String },
}

impl SyntaxError {
    pub fn span(&self) -> SourceSpan {
        match self {
            SyntaxError::Parse { span, .. }
            | SyntaxError::Type { span, .. }
            | SyntaxError::Pattern { span, .. } => *span,
        }
    }
}
