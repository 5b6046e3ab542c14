//! Predicate transformers, Hoare triples, proof outlines and probability
//! assertions.

mod assertion;
mod outline;
mod transform;
mod triple;

use thiserror::Error;

use crate::lang::{ParseError, TableError, TypeError};
use crate::linalg::LinalgError;
use crate::semantics::SemanticsError;

pub use assertion::{eval_assertion, AssertionReport, Comparison, ProbAssertion};
pub use outline::{
    check_outline, synthesize_outline, Branch, LoadedOutline, MatrixSource, OutlineReport, PredRef,
    ProofOutline, Step, StepVerdict, OUTLINE_SCHEMA,
};
pub use transform::{clamp_predicate, wlp, wp, Transformed};
pub use triple::{check_triple, HoareTriple, Mode, TripleReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoareOptions {
    /// Max-norm change between Kleene iterates at which a fixpoint is accepted.
    pub fix_eps: f64,
    pub fix_max_iters: usize,
    pub tol: f64,
}

impl Default for HoareOptions {
    fn default() -> Self {
        HoareOptions {
            fix_eps: 1e-9,
            fix_max_iters: 10_000,
            tol: crate::linalg::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Error)]
pub enum HoareError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("loop fixpoint did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { residual: f64, iterations: usize },
    #[error("{what} has dimension {found}, expected {expected}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{path}: {msg}")]
    Outline { path: String, msg: String },
    #[error("annotations do not chain at {path} (max difference {diff:.3e})")]
    NonChaining { path: String, diff: f64 },
    #[error("assertion: {0}")]
    Assertion(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("type errors: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Type(Vec<TypeError>),
    #[error(transparent)]
    Table(#[from] TableError),
}
