//! Full-space operators for the individual statements.

use crate::lang::{Tables, Var, VarContext};
use crate::linalg::{allocate_front, bra_at, embed_at, CMatrix};

use super::SemanticsError;

fn position(ctx: &VarContext, v: &Var) -> Result<usize, SemanticsError> {
    ctx.position(&v.name)
        .ok_or_else(|| SemanticsError::UnknownVariable(v.name.clone()))
}

fn positions(ctx: &VarContext, vars: &[Var]) -> Result<Vec<usize>, SemanticsError> {
    vars.iter().map(|v| position(ctx, v)).collect()
}

fn var_dim(ctx: &VarContext, p: usize) -> usize {
    ctx.vars()[p].kind.dim()
}

pub(crate) fn gate(
    ctx: &VarContext,
    vars: &[Var],
    name: &str,
    tables: &Tables,
) -> Result<CMatrix, SemanticsError> {
    let u = tables
        .gates
        .get(name)
        .ok_or_else(|| SemanticsError::UnknownGate(name.to_string()))?;
    Ok(embed_at(&u, &positions(ctx, vars)?, &ctx.dims())?)
}

pub(crate) fn measurement(
    ctx: &VarContext,
    vars: &[Var],
    name: &str,
    tables: &Tables,
) -> Result<Vec<CMatrix>, SemanticsError> {
    let ps = positions(ctx, vars)?;
    let dim: usize = ps.iter().map(|&p| var_dim(ctx, p)).product();
    let ops = tables
        .meas
        .get(name, dim)
        .ok_or_else(|| SemanticsError::UnknownMeasurement {
            name: name.to_string(),
            dim,
        })?;
    let dims = ctx.dims();
    ops.iter()
        .map(|m| embed_at(m, &ps, &dims).map_err(SemanticsError::from))
        .collect()
}

/// `{|value⟩⟨n| : n < d}` on `v`: reset (value 0) or bit set (value 1).
pub(crate) fn set_to(ctx: &VarContext, v: &Var, value: usize) -> Result<Vec<CMatrix>, SemanticsError> {
    let p = position(ctx, v)?;
    let d = var_dim(ctx, p);
    let dims = ctx.dims();
    (0..d)
        .map(|n| embed_at(&CMatrix::outer(d, value, n), &[p], &dims).map_err(SemanticsError::from))
        .collect()
}

/// Projectors onto the value-0 and value-1 subspaces of a two-level variable.
pub(crate) fn value_projectors(ctx: &VarContext, v: &Var) -> Result<[CMatrix; 2], SemanticsError> {
    let p = position(ctx, v)?;
    let dims = ctx.dims();
    let proj = |k| embed_at(&CMatrix::basis_projector(2, k), &[p], &dims);
    Ok([proj(0)?, proj(1)?])
}

/// `|0⟩ ⊗ I`: a fresh two-level variable prepended to the context.
pub(crate) fn allocate(ctx: &VarContext) -> CMatrix {
    allocate_front(2, ctx.total_dim())
}

/// `{⟨n| ⊗ I}` on the factor holding `v`.
pub(crate) fn discard(ctx: &VarContext, v: &Var) -> Result<Vec<CMatrix>, SemanticsError> {
    let p = position(ctx, v)?;
    let dims = ctx.dims();
    (0..dims[p])
        .map(|n| bra_at(p, n, &dims).map_err(SemanticsError::from))
        .collect()
}
