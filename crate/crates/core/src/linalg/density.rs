//! Validated state and predicate wrappers.

use super::matrix::CMatrix;
use super::order::psd_check;
use super::{LinalgError, DEFAULT_TOL};

/// A partial density operator: Hermitian, positive semidefinite, trace in
/// `[0, 1]` (traces below one encode subdistributions).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    tol: f64,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self, LinalgError> {
        Self::with_tol(mat, DEFAULT_TOL)
    }

    pub fn with_tol(mat: CMatrix, tol: f64) -> Result<Self, LinalgError> {
        let check = psd_check(&mat, tol)?;
        if !check.is_psd() {
            return Err(LinalgError::NotPositive {
                min_eigenvalue: check.min_eigenvalue,
            });
        }
        let tr = mat.trace().re;
        if tr < -tol || tr > 1.0 + tol {
            return Err(LinalgError::TraceOutOfRange { trace: tr });
        }
        Ok(Self { mat, tol })
    }

    /// Wraps a matrix produced by a trusted computation (Kraus application of
    /// a validated state) without re-running the eigensolver.
    pub(crate) fn trusted(mat: CMatrix, tol: f64) -> Self {
        Self { mat, tol }
    }

    /// |ψ⟩⟨ψ| for a normalized column vector.
    pub fn pure(ket: &CMatrix) -> Result<Self, LinalgError> {
        Self::new(CMatrix::ket_bra(ket))
    }

    /// |i⟩⟨i| in dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self::trusted(CMatrix::basis_projector(dim, i), DEFAULT_TOL)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(CMatrix::identity(dim).scale_real(1.0 / dim as f64), DEFAULT_TOL)
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }
}

/// An effect `0 ⊑ P ⊑ I`; `tr(Pρ)` is the degree to which `ρ` satisfies `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPredicate {
    mat: CMatrix,
    tol: f64,
}

impl QuantumPredicate {
    pub fn new(mat: CMatrix) -> Result<Self, LinalgError> {
        Self::with_tol(mat, DEFAULT_TOL)
    }

    pub fn with_tol(mat: CMatrix, tol: f64) -> Result<Self, LinalgError> {
        let lower = psd_check(&mat, tol)?;
        if !lower.is_psd() {
            return Err(LinalgError::NotPositive {
                min_eigenvalue: lower.min_eigenvalue,
            });
        }
        let top = lower.eigen.values.last().copied().unwrap_or(0.0);
        if top > 1.0 + tol * mat.max_abs().max(1.0) {
            return Err(LinalgError::AboveIdentity { max_eigenvalue: top });
        }
        Ok(Self { mat, tol })
    }

    pub(crate) fn trusted(mat: CMatrix, tol: f64) -> Self {
        Self { mat, tol }
    }

    pub fn identity(dim: usize) -> Self {
        Self::trusted(CMatrix::identity(dim), DEFAULT_TOL)
    }

    pub fn zero(dim: usize) -> Self {
        Self::trusted(CMatrix::zeros(dim, dim), DEFAULT_TOL)
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// tr(Pρ)
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        self.mat.trace_product(rho.mat()).re
    }
}
