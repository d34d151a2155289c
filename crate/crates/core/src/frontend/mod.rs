//! Solidity frontend: tokenizer, parser and tree traversal.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod span;
pub mod visit;

pub use ast::SourceUnit;
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse, ParseError, SyntaxError};
pub use span::{LineIndex, Span};
pub use visit::{node_count, traverse, walk, NodeRef, TraceEntry, Visit};
