//! The textual format language: parse `.fmt` files, compile them to match
//! graphs or pairing policies, and pretty-print canonically.
//!
//! A file declares exactly one format. Bracket sugar and an optional
//! consolation statement expand through the builder; a policy statement
//! yields a dynamic format and cannot be mixed with match statements;
//! explicit match statements describe the flowchart directly.

mod compiler;
mod emitter;
mod lexer;
mod parser;

pub use compiler::{compile, Compiled};
pub use emitter::{emit_ast, emit_multibracket};
pub use parser::{parse, FormatAst, SinkNode, SrcNode, Statement, StatementNode};

use crate::builder::BuildError;
use crate::flowchart::ValidationReport;

#[derive(thiserror::Error, Clone, PartialEq, Debug)]
pub enum DslError {
    #[error("{line}:{col}: {expected}")]
    Syntax {
        line: u32,
        col: u32,
        expected: String,
    },
    #[error("{line}:{col}: identifier `{name}` is already declared")]
    DuplicateIdentifier { name: String, line: u32, col: u32 },
    #[error("{line}:{col}: reference to undeclared match or bracket `{name}`")]
    UnknownReference { name: String, line: u32, col: u32 },
    #[error("a policy statement must be the only statement in a file")]
    MixedKind,
    #[error("{line}:{col}: keyword `{keyword}` is reserved and not yet supported")]
    ReservedKeyword {
        keyword: String,
        line: u32,
        col: u32,
    },
    #[error("{1}:{2}: {0}")]
    Build(BuildError, u32, u32),
    #[error("compiled format failed validation:\n{0}")]
    ValidationFailed(ValidationReport),
}
