//! Formula syntax: AST, parser, printer, dialects and the FOPT-to-FO translation.

pub mod ast;
pub mod dialect;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod rename;
pub mod star;

pub use ast::{AstPath, Condition, Formula, Term, Var};
pub use dialect::{dialect_of, free_vars, needs_search, Dialect};
pub use parser::{parse, parse_condition, parse_spanned, Span, Spans};
pub use star::star_translate;
