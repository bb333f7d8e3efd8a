//! A small textual query language over named arrays.
//!
//! Every operator call maps one-to-one onto an algebra function, so
//! `select(cross(A, B), dim0 = dim1)` is literally `σ(A × B)`.

mod ast;
mod catalog;
mod eval;
mod lexer;
mod parser;
mod typecheck;

pub use ast::{print, Expr, LiteralText, PredText, SpecText};
pub use catalog::{is_valid_name, Catalog, InvalidName};
pub use eval::{evaluate, evaluate_any, EvalError, Evaluated};
pub use parser::{caret, parse, parse_predicate, parse_with_spans, ParseError, Span, KEYWORDS, OPERATORS};
pub use typecheck::{typecheck, Checked, Shape, TypeError};
