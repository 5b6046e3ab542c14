//! Positivity, unitarity and the Löwner order.

use super::eig::{eigh, HermitianEigen};
use super::matrix::CMatrix;
use super::LinalgError;

/// Outcome of a positive-semidefiniteness test, keeping the spectrum so
/// callers can extract witnesses.
#[derive(Debug, Clone)]
pub struct PsdCheck {
    pub min_eigenvalue: f64,
    pub threshold: f64,
    pub eigen: HermitianEigen,
}

impl PsdCheck {
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= self.threshold
    }
}

/// Tests `a ⪰ 0` with threshold `−tol·max(1, ‖a‖_max)`.
pub fn psd_check(a: &CMatrix, tol: f64) -> Result<PsdCheck, LinalgError> {
    let eigen = eigh(a, tol)?;
    let min_eigenvalue = eigen.values.first().copied().unwrap_or(0.0);
    let threshold = -tol * a.max_abs().max(1.0);
    Ok(PsdCheck {
        min_eigenvalue,
        threshold,
        eigen,
    })
}

pub fn is_psd(a: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(psd_check(a, tol)?.is_psd())
}

fn require_square_hermitian(m: &CMatrix, tol: f64) -> Result<(), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = m.hermitian_defect();
    if defect > tol * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }
    Ok(())
}

/// Spectrum of `q − p`, after validating both operands.
pub fn loewner_gap(p: &CMatrix, q: &CMatrix, tol: f64) -> Result<PsdCheck, LinalgError> {
    require_square_hermitian(p, tol)?;
    require_square_hermitian(q, tol)?;
    if p.shape() != q.shape() {
        return Err(LinalgError::DimensionMismatch {
            op: "loewner_leq",
            left: p.shape(),
            right: q.shape(),
        });
    }
    psd_check(&(q - p), tol)
}

/// `p ⊑ q` in the Löwner order: `q − p` is positive semidefinite within `tol`.
pub fn loewner_leq(p: &CMatrix, q: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    Ok(loewner_gap(p, q, tol)?.is_psd())
}

/// ‖U†U − I‖_max ≤ tol.
pub fn is_unitary(u: &CMatrix, tol: f64) -> Result<bool, LinalgError> {
    if !u.is_square() {
        return Err(LinalgError::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let gram = u.dagger().matmul(u);
    Ok(gram.max_diff(&CMatrix::identity(u.rows())) <= tol)
}
