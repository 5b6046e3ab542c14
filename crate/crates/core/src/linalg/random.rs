//! Seeded generators for property tests: Ginibre matrices, Haar-like
//! unitaries, random states and predicates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::density::{DensityMatrix, QuantumPredicate};
use super::matrix::{CMatrix, C64, ZERO};
use super::{LinalgError, DEFAULT_TOL};

/// Matrix with i.i.d. standard complex normal entries (each part variance ½).
pub fn random_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

pub fn density_from_rng<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix, LinalgError> {
    if dim == 0 {
        return Err(LinalgError::ZeroDimension);
    }
    let g = random_ginibre(dim, dim, rng);
    let w = g.matmul(&g.dagger());
    let tr = w.trace().re;
    Ok(DensityMatrix::trusted(w.scale_real(1.0 / tr).hermitian_part(), DEFAULT_TOL))
}

pub fn unitary_from_rng<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix, LinalgError> {
    if dim == 0 {
        return Err(LinalgError::ZeroDimension);
    }
    let g = random_ginibre(dim, dim, rng);
    Ok(orthonormalize_columns(&g))
}

/// Random predicate `U diag(u) U†` with `u_i` uniform in `[0, 1]`.
pub fn predicate_from_rng<R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<QuantumPredicate, LinalgError> {
    let u = unitary_from_rng(dim, rng)?;
    let spectrum: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let p = u.matmul(&CMatrix::real_diag(&spectrum)).matmul(&u.dagger());
    Ok(QuantumPredicate::trusted(p.hermitian_part(), DEFAULT_TOL))
}

/// `GG†/tr(GG†)` for a seeded Ginibre `G`.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityMatrix, LinalgError> {
    density_from_rng(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Gram–Schmidt orthonormalization of a seeded Ginibre matrix.
pub fn random_unitary(dim: usize, seed: u64) -> Result<CMatrix, LinalgError> {
    unitary_from_rng(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_predicate(dim: usize, seed: u64) -> Result<QuantumPredicate, LinalgError> {
    if dim == 0 {
        return Err(LinalgError::ZeroDimension);
    }
    predicate_from_rng(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

// Modified Gram–Schmidt, applied twice for stability.
fn orthonormalize_columns(g: &CMatrix) -> CMatrix {
    let n = g.rows();
    let mut cols: Vec<Vec<C64>> = (0..g.cols()).map(|j| g.column(j)).collect();
    for _ in 0..2 {
        for j in 0..cols.len() {
            for k in 0..j {
                let proj: C64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (head, tail) = cols.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[k]) {
                    *x -= proj * y;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for x in &mut cols[j] {
                *x /= norm;
            }
        }
    }
    let mut out = CMatrix::zeros(n, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            out[(i, j)] = if z.is_nan() { ZERO } else { z };
        }
    }
    out
}
