use serde::Serialize;

use crate::linalg::exchange::MatrixDoc;

use super::EvalOutcome;

/// Summary of one evaluation, serialized as the `run` document.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub final_state: MatrixDoc,
    pub trace: f64,
    pub termination_probability: f64,
    pub truncation_error: f64,
    pub path_count: usize,
}

impl RunReport {
    /// `input_trace` is the trace of the state the program started from.
    pub fn new(outcome: &EvalOutcome, input_trace: f64) -> Self {
        let trace = outcome.state.trace();
        let (p, err) = if input_trace > 0.0 {
            ((trace / input_trace).clamp(0.0, 1.0), outcome.truncation_error / input_trace)
        } else {
            (0.0, 0.0)
        };
        RunReport {
            final_state: MatrixDoc::from_matrix(outcome.state.mat()),
            trace,
            termination_probability: p,
            truncation_error: err,
            path_count: outcome.paths,
        }
    }
}
