//! Graphical unit tests for a subset of the Alloy modeling language.
//!
//! A model is parsed and resolved into a [`ModelSchema`]. Test cases are
//! built as canvases of atoms and connections ([`TestCase`]), checked by the
//! [`guidance`] rules while they are edited, rendered into a command string by
//! the [`translate`] module, and executed by the native [`eval`] engine. The
//! [`oracle`] module is a brute-force model finder used to cross-check the
//! evaluator.

pub mod bench;
pub mod eval;
pub mod fixtures;
pub mod guidance;
pub mod oracle;
pub mod schema;
pub mod store;
pub mod syntax;
pub mod testcase;
pub mod translate;
pub mod valuation;

pub use eval::run::{run_test, RunOptions, RunResult, RunStatus};
pub use eval::{check_structural, eval_expr, eval_formula, Diagnostic, DiagnosticKind, Env, Instance, TupleSet};
pub use guidance::{GuidanceVerdict, PreRunReport, Violation, ViolationKind};
pub use oracle::{enumerate_satisfiable, OracleError, OracleOutcome, Scope};
pub use schema::{
    load_model, parse_formula_block, resolve, FieldDecl, FieldMultiplicity, ModelError, ModelSchema,
    PredDecl, ResolveError, SigDecl, SigKind,
};
pub use store::{Project, ProjectStore, StoreError};
pub use syntax::{parse_formula, parse_model, Expr, Formula, ParseError, SourceModel, Span};
pub use testcase::{Atom, CanvasError, Connection, ConnectionRef, PredState, PredicateExpectation, TestCase};
pub use translate::{aunit_file, generate_command_string, render_tuple, CommandString};
pub use valuation::Valuation;
