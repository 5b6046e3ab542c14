//! Denotational and operational semantics.
//!
//! Both the compositional Kraus construction ([`denote`]) and direct state
//! propagation ([`eval`]) are provided; they agree to rounding. The small-step
//! relation ([`step`], [`run_operational`]) expands the nondeterministic
//! configuration tree explicitly.

mod denote;
mod eval;
pub(crate) mod local;
mod operational;
mod report;

use thiserror::Error;

use crate::linalg::LinalgError;

pub use denote::{denote, denote_with_error, Denotation};
pub use eval::{eval, termination_probability, EvalOutcome, Termination};
pub use operational::{run_operational, step, step_with_rule, Config, OperationalRun, Rule, PATH_PRUNE};
pub use report::RunReport;

/// How loops are summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    /// Loops must resolve exactly (terminate or provably diverge) within the
    /// iteration cap; any leftover in-loop mass is an error.
    ExactKraus,
    /// The loop sum is cut once the in-loop mass falls below
    /// `loop_mass_eps`; the cut is reported as a truncation error.
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub loop_max_iters: usize,
    pub loop_mass_eps: f64,
    pub mode: LoopMode,
    /// Tolerance for matrix checks made along the way.
    pub tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            loop_max_iters: 1000,
            loop_mass_eps: 1e-9,
            mode: LoopMode::Truncated,
            tol: crate::linalg::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("loop did not converge: in-loop mass {mass:.3e} after {iters} iterations (eps {eps:.1e})")]
    LoopNotConverged { mass: f64, iters: usize, eps: f64 },
    #[error("variable `{0}` is not in the current context")]
    UnknownVariable(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("measurement `{name}` is unknown or does not act on dimension {dim}")]
    UnknownMeasurement { name: String, dim: usize },
    #[error("state has dimension {found}, context needs {expected}")]
    StateDimension { expected: usize, found: usize },
    #[error("input state has zero trace")]
    ZeroTrace,
    #[error("invalid options: {0}")]
    Options(&'static str),
}

impl EvalOptions {
    pub(crate) fn validate(&self) -> Result<(), SemanticsError> {
        if !(self.loop_mass_eps > 0.0 && self.loop_mass_eps.is_finite()) {
            return Err(SemanticsError::Options("loop_mass_eps must be positive"));
        }
        if self.loop_max_iters == 0 {
            return Err(SemanticsError::Options("loop_max_iters must be at least 1"));
        }
        Ok(())
    }
}
