//! Lexer, parser and canonical printer for the supported Cypher subset.

pub mod ast;
mod error;
pub mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use error::{ParseError, ParseErrorKind};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{is_reserved_word, parse};
pub use printer::pretty_print;
