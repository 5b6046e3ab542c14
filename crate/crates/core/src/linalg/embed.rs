//! Placement of local operators inside a tensor-product space.
//!
//! The first entry of `dims` is the leftmost (most significant) tensor factor.

use super::matrix::{kron, CMatrix, ONE};
use super::LinalgError;

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

fn compose(digits: impl Iterator<Item = (usize, usize)>) -> usize {
    digits.fold(0, |acc, (digit, dim)| acc * dim + digit)
}

fn validate_positions(positions: &[usize], dims: &[usize]) -> Result<(), LinalgError> {
    for (k, &p) in positions.iter().enumerate() {
        if p >= dims.len() {
            return Err(LinalgError::PositionOutOfRange {
                position: p,
                len: dims.len(),
            });
        }
        if positions[..k].contains(&p) {
            return Err(LinalgError::DuplicatePosition { position: p });
        }
    }
    Ok(())
}

/// Lifts `op`, acting on the factors at `positions` (in that order), to the
/// whole space: `P·(op ⊗ I)·Pᵀ` with `P` the permutation bringing the selected
/// factors to the front.
pub fn embed_at(op: &CMatrix, positions: &[usize], dims: &[usize]) -> Result<CMatrix, LinalgError> {
    validate_positions(positions, dims)?;
    let sel_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
    let sel_total: usize = sel_dims.iter().product();
    if !op.is_square() || op.rows() != sel_total {
        return Err(LinalgError::DimensionMismatch {
            op: "embed_at",
            left: op.shape(),
            right: (sel_total, sel_total),
        });
    }
    let rest_positions: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let rest_dims: Vec<usize> = rest_positions.iter().map(|&p| dims[p]).collect();
    let rest_total: usize = rest_dims.iter().product();
    let total = sel_total * rest_total;

    // full[sel * rest_total + rest] -> index in the original ordering
    let mut full = vec![0usize; total];
    let mut split = vec![(0usize, 0usize); total];
    for (i, slot) in split.iter_mut().enumerate() {
        let dg = digits(i, dims);
        let s = compose(positions.iter().map(|&p| (dg[p], dims[p])));
        let r = compose(rest_positions.iter().map(|&p| (dg[p], dims[p])));
        *slot = (s, r);
        full[s * rest_total + r] = i;
    }

    let mut out = CMatrix::zeros(total, total);
    for i in 0..total {
        let (si, r) = split[i];
        for sj in 0..sel_total {
            let z = op[(si, sj)];
            if z.norm_sqr() == 0.0 {
                continue;
            }
            out[(i, full[sj * rest_total + r])] = z;
        }
    }
    Ok(out)
}

/// `⟨n|` on the factor at `position`, identity elsewhere: a map from the full
/// space onto the space with that factor removed.
pub fn bra_at(position: usize, n: usize, dims: &[usize]) -> Result<CMatrix, LinalgError> {
    validate_positions(&[position], dims)?;
    if n >= dims[position] {
        return Err(LinalgError::PositionOutOfRange {
            position: n,
            len: dims[position],
        });
    }
    let total: usize = dims.iter().product();
    let reduced: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|&(p, _)| p != position)
        .map(|(_, &d)| d)
        .collect();
    let out_total: usize = reduced.iter().product();
    let mut out = CMatrix::zeros(out_total, total);
    for i in 0..total {
        let dg = digits(i, dims);
        if dg[position] != n {
            continue;
        }
        let j = compose(
            dg.iter()
                .zip(dims)
                .enumerate()
                .filter(|&(p, _)| p != position)
                .map(|(_, (&d, &dim))| (d, dim)),
        );
        out[(j, i)] = ONE;
    }
    Ok(out)
}

/// `|0⟩ ⊗ I_rest`: allocation of a fresh `new_dim`-level factor in front.
pub fn allocate_front(new_dim: usize, rest_total: usize) -> CMatrix {
    kron(&CMatrix::basis_ket(new_dim, 0), &CMatrix::identity(rest_total))
}
