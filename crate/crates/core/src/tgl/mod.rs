//! The rule language: syntax tree, parser, pretty-printer, static
//! validation and expression evaluation.

mod ast;
mod eval;
mod parse;
mod pretty;
mod sexpr;
mod validate;

pub use ast::*;
pub use eval::{eval_selector, eval_test, resolve_args, EvalError};
pub use parse::parse_grammar;
pub use pretty::{grammar_to_string, rule_to_string, selector_to_string, test_to_string};
pub use validate::{has_errors, validate_grammar, Diagnostic, DiagnosticKind, Severity};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TglError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate rule name \"{name}\"")]
    DuplicateRule { name: String, line: usize, col: usize },
}

impl TglError {
    pub(crate) fn syntax(pos: SourcePos, msg: impl Into<String>) -> Self {
        TglError::Syntax {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            TglError::Syntax { line, .. } | TglError::DuplicateRule { line, .. } => Some(*line),
        }
    }
}
