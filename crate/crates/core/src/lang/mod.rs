//! Program syntax: AST, parser, printer, gate tables and the type checker.

pub mod ast;
mod parser;
mod printer;
pub mod tables;
pub mod typecheck;

pub use ast::{Command, Pos, Var, VarContext, VarDecl, VarKind, DEFAULT_QUNIT_DIM};
pub use parser::{parse, parse_command, ParseError, ParseErrorKind};
pub use printer::{print, print_command};
pub use tables::{GateTable, MeasTable, TableError, Tables};
pub use typecheck::{context_after, typecheck, Dialect, TypeError, TypeErrorKind, TypedProgram};
