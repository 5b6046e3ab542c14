//! Completely positive maps in Kraus form.

use super::density::DensityMatrix;
use super::eig::eigh;
use super::matrix::{kron, CMatrix, ZERO};
use super::LinalgError;

/// Operators with max-norm below this are dropped from Kraus lists.
pub const PRUNE_NORM: f64 = 1e-14;

/// `ρ ↦ Σ E_i ρ E_i†` with every `E_i` of shape `out_dim × in_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    ops: Vec<CMatrix>,
    in_dim: usize,
    out_dim: usize,
}

impl KrausMap {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self, LinalgError> {
        let first = ops.first().ok_or(LinalgError::EmptyKraus)?;
        let (out_dim, in_dim) = first.shape();
        if let Some(bad) = ops.iter().find(|e| e.shape() != (out_dim, in_dim)) {
            return Err(LinalgError::DimensionMismatch {
                op: "kraus",
                left: (out_dim, in_dim),
                right: bad.shape(),
            });
        }
        Ok(Self { ops, in_dim, out_dim })
    }

    /// The zero map between the given dimensions (a single zero operator).
    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self {
            ops: vec![CMatrix::zeros(out_dim, in_dim)],
            in_dim,
            out_dim,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![CMatrix::identity(dim)],
            in_dim: dim,
            out_dim: dim,
        }
    }

    pub fn single(op: CMatrix) -> Self {
        let (out_dim, in_dim) = op.shape();
        Self {
            ops: vec![op],
            in_dim,
            out_dim,
        }
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// Σ E_i† E_i
    pub fn completeness(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.in_dim, self.in_dim);
        for e in &self.ops {
            acc.add_assign_scaled(&e.dagger().matmul(e), super::ONE);
        }
        acc
    }

    pub fn is_trace_nonincreasing(&self, tol: f64) -> Result<bool, LinalgError> {
        super::order::loewner_leq(&self.completeness(), &CMatrix::identity(self.in_dim), tol)
    }

    pub fn is_admissible(&self, tol: f64) -> bool {
        self.completeness().approx_eq(&CMatrix::identity(self.in_dim), tol)
    }

    /// Σ E ρ E† on a raw matrix; panics on shape mismatch.
    pub fn apply_mat(&self, rho: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.out_dim, self.out_dim);
        for e in &self.ops {
            acc.add_assign_scaled(&e.sandwich(rho), super::ONE);
        }
        acc
    }

    /// Heisenberg-picture dual Σ E† Q E.
    pub fn dual(&self, q: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.in_dim, self.in_dim);
        for e in &self.ops {
            acc.add_assign_scaled(&e.adjoint_sandwich(q), super::ONE);
        }
        acc
    }

    /// `next ∘ self`: pairwise products, near-zero operators pruned.
    pub fn then(&self, next: &KrausMap) -> Result<KrausMap, LinalgError> {
        if next.in_dim != self.out_dim {
            return Err(LinalgError::DimensionMismatch {
                op: "kraus compose",
                left: (next.out_dim, next.in_dim),
                right: (self.out_dim, self.in_dim),
            });
        }
        let mut ops = Vec::with_capacity(self.ops.len() * next.ops.len());
        for b in &next.ops {
            for a in &self.ops {
                let p = b.matmul(a);
                if p.max_abs() >= PRUNE_NORM {
                    ops.push(p);
                }
            }
        }
        Ok(self.rebuilt(ops, next.out_dim))
    }

    /// Sum of two maps with equal shapes (union of Kraus lists).
    pub fn plus(&self, other: &KrausMap) -> Result<KrausMap, LinalgError> {
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim) {
            return Err(LinalgError::DimensionMismatch {
                op: "kraus sum",
                left: (self.out_dim, self.in_dim),
                right: (other.out_dim, other.in_dim),
            });
        }
        let ops = self
            .ops
            .iter()
            .chain(&other.ops)
            .filter(|e| e.max_abs() >= PRUNE_NORM)
            .cloned()
            .collect();
        Ok(self.rebuilt(ops, self.out_dim))
    }

    fn rebuilt(&self, ops: Vec<CMatrix>, out_dim: usize) -> KrausMap {
        if ops.is_empty() {
            KrausMap::zero(self.in_dim, out_dim)
        } else {
            KrausMap {
                ops,
                in_dim: self.in_dim,
                out_dim,
            }
        }
    }

    /// Transfer matrix `Σ E ⊗ Ē` acting on row-major vectorized states.
    pub fn transfer_matrix(&self) -> CMatrix {
        let mut acc = CMatrix::zeros(self.out_dim * self.out_dim, self.in_dim * self.in_dim);
        for e in &self.ops {
            acc.add_assign_scaled(&kron(e, &e.conj()), super::ONE);
        }
        acc
    }

    /// Recovers a minimal Kraus list (at most `in·out` operators) from a
    /// transfer matrix through the Choi matrix eigendecomposition.
    pub fn from_transfer(
        transfer: &CMatrix,
        in_dim: usize,
        out_dim: usize,
        tol: f64,
    ) -> Result<KrausMap, LinalgError> {
        if transfer.shape() != (out_dim * out_dim, in_dim * in_dim) {
            return Err(LinalgError::DimensionMismatch {
                op: "from_transfer",
                left: transfer.shape(),
                right: (out_dim * out_dim, in_dim * in_dim),
            });
        }
        let n = in_dim * out_dim;
        // C[(i,a),(j,b)] = Φ(|i⟩⟨j|)[a,b] = S[(a,b),(i,j)]
        let choi = CMatrix::from_fn(n, n, |row, col| {
            let (i, a) = (row / out_dim, row % out_dim);
            let (j, b) = (col / out_dim, col % out_dim);
            transfer[(a * out_dim + b, i * in_dim + j)]
        });
        let e = eigh(&choi.hermitian_part(), tol.max(1e-9))?;
        let scale = e.values.last().copied().unwrap_or(0.0).abs().max(1.0);
        let mut ops = Vec::new();
        for (k, &lambda) in e.values.iter().enumerate() {
            if lambda <= 1e-15 * scale {
                continue;
            }
            let w = lambda.sqrt();
            let op = CMatrix::from_fn(out_dim, in_dim, |a, i| e.vectors[(i * out_dim + a, k)] * w);
            if op.max_abs() >= PRUNE_NORM {
                ops.push(op);
            }
        }
        if ops.is_empty() {
            return Ok(KrausMap::zero(in_dim, out_dim));
        }
        KrausMap::new(ops)
    }

    /// Re-expresses the map with at most `in·out` operators.
    pub fn compressed(&self, tol: f64) -> Result<KrausMap, LinalgError> {
        if self.ops.len() <= self.in_dim * self.out_dim {
            return Ok(self.clone());
        }
        KrausMap::from_transfer(&self.transfer_matrix(), self.in_dim, self.out_dim, tol)
    }

    pub fn is_zero(&self) -> bool {
        self.ops.iter().all(|e| e.data().iter().all(|&z| z == ZERO))
    }
}

/// Applies a Kraus map to a validated state.
pub fn apply_kraus(k: &KrausMap, rho: &DensityMatrix) -> Result<DensityMatrix, LinalgError> {
    if rho.dim() != k.in_dim() {
        return Err(LinalgError::DimensionMismatch {
            op: "apply_kraus",
            left: (k.out_dim(), k.in_dim()),
            right: (rho.dim(), rho.dim()),
        });
    }
    Ok(DensityMatrix::trusted(k.apply_mat(rho.mat()), rho.tol()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, C64};

    #[test]
    fn measure_and_forget_kills_coherences() {
        let alpha = C64::new(0.6, 0.0);
        let beta = C64::new(0.0, 0.8);
        let rho = CMatrix::from_rows(&[
            &[alpha * alpha.conj(), alpha * beta.conj()],
            &[alpha.conj() * beta, beta * beta.conj()],
        ]);
        let rho = DensityMatrix::new(rho).unwrap();
        let k = KrausMap::new(vec![
            CMatrix::basis_projector(2, 0),
            CMatrix::basis_projector(2, 1),
        ])
        .unwrap();
        let out = apply_kraus(&k, &rho).unwrap();
        assert!(out.mat().approx_eq(&CMatrix::real_diag(&[0.36, 0.64]), 1e-12));
    }

    #[test]
    fn allocation_puts_state_in_top_left_block() {
        let e = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let k = KrausMap::single(e);
        assert!(k.is_admissible(1e-12));
        let rho = random_density(2, 3).unwrap();
        let out = apply_kraus(&k, &rho).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i < 2 && j < 2 { rho.mat()[(i, j)] } else { ZERO };
                assert_eq!(out.mat()[(i, j)], expected);
            }
        }
    }

    #[test]
    fn identity_map() {
        let rho = random_density(3, 11).unwrap();
        let out = apply_kraus(&KrausMap::identity(3), &rho).unwrap();
        assert_eq!(out.mat(), rho.mat());
    }

    #[test]
    fn dimension_mismatch() {
        let rho = random_density(3, 1).unwrap();
        assert!(apply_kraus(&KrausMap::identity(2), &rho).is_err());
        assert!(KrausMap::new(vec![CMatrix::identity(2), CMatrix::identity(3)]).is_err());
        assert!(KrausMap::new(vec![]).is_err());
    }

    #[test]
    fn choi_round_trip_preserves_action() {
        // amplitude-damping-like map plus a redundant copy to force compression
        let g: f64 = 0.3;
        let e0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - g).sqrt()]]);
        let e1 = CMatrix::from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]]);
        let half = |m: &CMatrix| m.scale_real(0.5f64.sqrt());
        let k = KrausMap::new(vec![half(&e0), half(&e1), half(&e0), half(&e1), half(&e1)]).unwrap();
        let c = k.compressed(1e-9).unwrap();
        assert!(c.len() <= 4);
        for seed in 0..5 {
            let rho = random_density(2, seed).unwrap();
            assert!(k.apply_mat(rho.mat()).max_diff(&c.apply_mat(rho.mat())) < 1e-12);
        }
    }

    #[test]
    fn non_square_compression() {
        let e = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let k = KrausMap::new(vec![e.scale_real(0.5), e.scale_real(0.5), e.scale_real(0.5f64.sqrt())]).unwrap();
        let back = KrausMap::from_transfer(&k.transfer_matrix(), 2, 4, 1e-9).unwrap();
        assert_eq!((back.in_dim(), back.out_dim()), (2, 4));
        let rho = random_density(2, 7).unwrap();
        assert!(k.apply_mat(rho.mat()).max_diff(&back.apply_mat(rho.mat())) < 1e-12);
    }
}
