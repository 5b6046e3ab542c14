//! Dense complex linear algebra with the quantum-specific checks.

mod density;
mod eig;
mod embed;
pub mod exchange;
pub mod gates;
mod kraus;
mod matrix;
mod order;
mod random;

use thiserror::Error;

pub use density::{DensityMatrix, QuantumPredicate};
pub use eig::{eig_hermitian, eigh, spectral_map, HermitianEigen};
pub use embed::{allocate_front, bra_at, embed_at};
pub use kraus::{apply_kraus, KrausMap, PRUNE_NORM};
pub use matrix::{dagger, kron, kron_all, CMatrix, C64, ONE, ZERO};
pub use order::{is_psd, is_unitary, loewner_gap, loewner_leq, psd_check, PsdCheck};
pub use random::{
    density_from_rng, predicate_from_rng, random_density, random_ginibre, random_predicate,
    random_unitary, unitary_from_rng,
};

/// Tolerance used wherever no other value is supplied.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix shape must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{op}: dimension mismatch {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("predicate exceeds the identity (max eigenvalue {max_eigenvalue:.6})")]
    AboveIdentity { max_eigenvalue: f64 },
    #[error("trace {trace:.6} outside [0, 1]")]
    TraceOutOfRange { trace: f64 },
    #[error("position {position} out of range for {len} factors")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("position {position} selected twice")]
    DuplicatePosition { position: usize },
    #[error("Kraus map needs at least one operator")]
    EmptyKraus,
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("malformed matrix document: {0}")]
    Format(String),
}
