use crate::lang::{context_after, Command, Tables, VarContext};
use crate::linalg::{eigh, spectral_map, CMatrix, QuantumPredicate};
use crate::semantics::local;

use super::{HoareError, HoareOptions};

/// A transformed predicate with the numerical bookkeeping behind it.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub pred: QuantumPredicate,
    /// How far the raw result left `[0, I]` before clamping.
    pub clamp: f64,
    /// Largest final Kleene step over all loops (0 for loop-free programs).
    pub residual: f64,
    /// Kleene iterations summed over all loops.
    pub iterations: usize,
}

/// Weakest precondition of `c` for `post` (total correctness).
pub fn wp(
    ctx: &VarContext,
    c: &Command,
    post: &QuantumPredicate,
    tables: &Tables,
    opts: &HoareOptions,
) -> Result<Transformed, HoareError> {
    run(ctx, c, post, tables, opts, false)
}

/// Weakest liberal precondition (partial correctness).
pub fn wlp(
    ctx: &VarContext,
    c: &Command,
    post: &QuantumPredicate,
    tables: &Tables,
    opts: &HoareOptions,
) -> Result<Transformed, HoareError> {
    run(ctx, c, post, tables, opts, true)
}

fn run(
    ctx: &VarContext,
    c: &Command,
    post: &QuantumPredicate,
    tables: &Tables,
    opts: &HoareOptions,
    liberal: bool,
) -> Result<Transformed, HoareError> {
    let out_dim = context_after(ctx, c).total_dim();
    if post.dim() != out_dim {
        return Err(HoareError::Dimension {
            what: "postcondition",
            expected: out_dim,
            found: post.dim(),
        });
    }
    let mut t = Transformer {
        tables,
        opts,
        liberal,
        residual: 0.0,
        iterations: 0,
    };
    let raw = t.go(ctx, c, post.mat().clone())?;
    let (mat, clamp) = clamp_predicate(&raw, opts.tol)?;
    Ok(Transformed {
        pred: QuantumPredicate::trusted(mat, opts.tol),
        clamp,
        residual: t.residual,
        iterations: t.iterations,
    })
}

/// Symmetrizes `m` and clamps its spectrum to `[0, 1]`, returning the
/// clamped matrix and the largest eigenvalue correction.
pub fn clamp_predicate(m: &CMatrix, tol: f64) -> Result<(CMatrix, f64), HoareError> {
    let h = m.hermitian_part();
    let e = eigh(&h, tol)?;
    let lo = e.values.first().copied().unwrap_or(0.0);
    let hi = e.values.last().copied().unwrap_or(0.0);
    let clamp = (-lo).max(hi - 1.0).max(0.0);
    if clamp == 0.0 {
        return Ok((h, 0.0));
    }
    Ok((spectral_map(&e, |x| x.clamp(0.0, 1.0)), clamp))
}

/// `Σ E† Q E`
fn dual(ops: &[CMatrix], q: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(ops[0].cols(), ops[0].cols());
    for e in ops {
        acc = &acc + &e.adjoint_sandwich(q);
    }
    acc
}

pub(crate) struct Transformer<'a> {
    pub(crate) tables: &'a Tables,
    pub(crate) opts: &'a HoareOptions,
    pub(crate) liberal: bool,
    pub(crate) residual: f64,
    pub(crate) iterations: usize,
}

impl Transformer<'_> {
    pub(crate) fn go(&mut self, ctx: &VarContext, c: &Command, q: CMatrix) -> Result<CMatrix, HoareError> {
        Ok(match c {
            Command::Skip => q,
            Command::Seq(a, b) => {
                let mid = self.go(&context_after(ctx, a), b, q)?;
                self.go(ctx, a, mid)?
            }
            Command::InitZero(v) => dual(&local::set_to(ctx, v, 0)?, &q),
            Command::AssignBit(v, bit) => dual(&local::set_to(ctx, v, usize::from(*bit))?, &q),
            Command::ApplyU { vars, gate } => {
                local::gate(ctx, vars, gate, self.tables)?.adjoint_sandwich(&q)
            }
            Command::NewBit(_) | Command::NewQbit(_) => local::allocate(ctx).adjoint_sandwich(&q),
            Command::Discard(v) => dual(&local::discard(ctx, v)?, &q),
            Command::MeasureCase {
                meas,
                vars,
                branches,
            } => {
                let ms = local::measurement(ctx, vars, meas, self.tables)?;
                let mut acc = CMatrix::zeros(ctx.total_dim(), ctx.total_dim());
                for (m, branch) in ms.iter().zip(branches) {
                    let inner = self.go(ctx, branch, q.clone())?;
                    acc = &acc + &m.adjoint_sandwich(&inner);
                }
                acc
            }
            Command::IfBit {
                guard,
                then_branch,
                else_branch,
            }
            | Command::MeasureIf {
                guard,
                then_branch,
                else_branch,
            } => {
                let [p0, p1] = local::value_projectors(ctx, guard)?;
                let t = self.go(ctx, then_branch, q.clone())?;
                let e = self.go(ctx, else_branch, q)?;
                &p0.adjoint_sandwich(&e) + &p1.adjoint_sandwich(&t)
            }
            Command::While { meas, vars, body } => {
                let ms = local::measurement(ctx, vars, meas, self.tables)?;
                self.fixpoint(ctx, &ms[0], &ms[1], body, &q)?
            }
        })
    }

    /// Kleene iteration of `X ↦ M₀†QM₀ + M₁†·T(body, X)·M₁`, from 0 for the
    /// least fixpoint and from I for the greatest.
    pub(crate) fn fixpoint(
        &mut self,
        ctx: &VarContext,
        m0: &CMatrix,
        m1: &CMatrix,
        body: &Command,
        q: &CMatrix,
    ) -> Result<CMatrix, HoareError> {
        let dim = ctx.total_dim();
        let exit = m0.adjoint_sandwich(q);
        let mut x = if self.liberal {
            CMatrix::identity(dim)
        } else {
            CMatrix::zeros(dim, dim)
        };
        let mut diff = f64::INFINITY;
        for it in 1..=self.opts.fix_max_iters {
            let inner = self.go(ctx, body, x.clone())?;
            let next = (&exit + &m1.adjoint_sandwich(&inner)).hermitian_part();
            diff = next.max_diff(&x);
            x = next;
            if diff < self.opts.fix_eps {
                self.iterations += it;
                self.residual = self.residual.max(diff);
                return Ok(x);
            }
        }
        Err(HoareError::NotConverged {
            residual: diff,
            iterations: self.opts.fix_max_iters,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn pred(m: CMatrix) -> QuantumPredicate {
        QuantumPredicate::new(m).unwrap()
    }

    fn plus() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])
    }

    fn wp_src(src: &str, q: CMatrix, liberal: bool) -> Transformed {
        let (ctx, c) = parse(src).unwrap();
        let f = if liberal { wlp } else { wp };
        f(&ctx, &c, &pred(q), &Tables::builtin(), &HoareOptions::default()).unwrap()
    }

    #[test]
    fn hadamard_pulls_back_zero_to_plus() {
        let t = wp_src("var q: qbit; q *= H", CMatrix::basis_projector(2, 0), false);
        assert!(t.pred.mat().approx_eq(&plus(), 1e-12));
    }

    #[test]
    fn reset_preserves_identity() {
        let t = wp_src("var q: qunit[3]; q := 0", CMatrix::identity(3), false);
        assert!(t.pred.mat().approx_eq(&CMatrix::identity(3), 1e-12));
    }

    #[test]
    fn divergent_loop() {
        let src = "var q: qbit; while std(q) = 1 do skip od";
        let zero = CMatrix::basis_projector(2, 0);
        let w = wp_src(src, zero.clone(), false);
        assert!(w.pred.mat().approx_eq(&zero, 1e-12));
        let l = wp_src(src, zero, true);
        assert!(l.pred.mat().approx_eq(&CMatrix::identity(2), 1e-12));
    }

    #[test]
    fn allocation_and_discard_duals() {
        let q = crate::linalg::random_predicate(4, 5).unwrap().into_mat();
        let t = wp_src("var r: qbit; new qbit a", q.clone(), false);
        let top_left = CMatrix::from_fn(2, 2, |i, j| q[(i, j)]);
        assert!(t.pred.mat().approx_eq(&top_left, 1e-12));

        let small = crate::linalg::random_predicate(2, 6).unwrap().into_mat();
        let t = wp_src("var a: qbit, r: qbit; discard a", small.clone(), false);
        let expect = crate::linalg::kron(&CMatrix::identity(2), &small);
        assert!(t.pred.mat().approx_eq(&expect, 1e-12));
    }

    #[test]
    fn rejects_wrong_post_dimension() {
        let (ctx, c) = parse("var q: qbit; skip").unwrap();
        let r = wp(&ctx, &c, &QuantumPredicate::identity(4), &Tables::builtin(), &HoareOptions::default());
        assert!(matches!(r, Err(HoareError::Dimension { .. })));
    }

    #[test]
    fn non_convergence_is_reported() {
        let (ctx, c) = parse("var q: qbit; while std(q) = 1 do q *= H od").unwrap();
        let opts = HoareOptions {
            fix_max_iters: 3,
            ..HoareOptions::default()
        };
        let r = wp(&ctx, &c, &QuantumPredicate::identity(2), &Tables::builtin(), &opts);
        assert!(matches!(r, Err(HoareError::NotConverged { iterations: 3, .. })));
    }
}
