//! Hermitian eigensolver (cyclic complex Jacobi).

use super::matrix::{CMatrix, C64, ZERO};
use super::LinalgError;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues with the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Eigenvector for the `k`-th (ascending) eigenvalue as an n×1 column.
    pub fn vector(&self, k: usize) -> CMatrix {
        let n = self.vectors.rows();
        CMatrix::from_fn(n, 1, |i, _| self.vectors[(i, k)])
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eig_hermitian(a: &CMatrix, tol: f64) -> Result<Vec<f64>, LinalgError> {
    Ok(eigh(a, tol)?.values)
}

/// Full eigen-decomposition of a Hermitian matrix.
pub fn eigh(a: &CMatrix, tol: f64) -> Result<HermitianEigen, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let defect = a.hermitian_defect();
    if defect > tol * a.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }
    Ok(jacobi(a.hermitian_part()))
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: CMatrix) -> HermitianEigen {
    let n = a.rows();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 || r <= 1e-18 * scale {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, r);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |row, k| v[(row, order[k])]);
    HermitianEigen { values, vectors }
}

// One two-sided rotation A <- U† A U zeroing A[p][q]; U = D·R where D fixes
// the phase of A[p][q] and R is the classical real Jacobi rotation.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize, apq: C64, r: f64) {
    let n = a.rows();
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Rebuilds `Σ f(λ_k) v_k v_k†` from a decomposition.
pub fn spectral_map(e: &HermitianEigen, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = e.vectors.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in e.values.iter().enumerate() {
        let w = f(lambda);
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = e.vectors[(i, k)] * w;
            for j in 0..n {
                out[(i, j)] += vi * e.vectors[(j, k)].conj();
            }
        }
    }
    out
}
