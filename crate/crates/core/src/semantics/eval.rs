use crate::lang::{context_after, Command, Tables, VarContext};
use crate::linalg::{CMatrix, DensityMatrix, PRUNE_NORM};

use super::{local, EvalOptions, LoopMode, SemanticsError};

/// Branch lists longer than this are merged into a single state.
const MAX_PATHS: usize = 4096;

/// Branch states with trace below this are dropped from the path count.
const PATH_MASS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct EvalOutcome {
    /// Context after the program.
    pub ctx: VarContext,
    pub state: DensityMatrix,
    /// Upper bound on the terminating mass lost by cutting loop sums.
    pub truncation_error: f64,
    /// Number of terminating branches with non-negligible mass. Each exiting
    /// loop iteration counts once; the count saturates at 4096.
    pub paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Termination {
    pub probability: f64,
    pub truncation_error: f64,
}

/// Runs `c` on `rho` by propagating branch states through the program.
pub fn eval(
    ctx: &VarContext,
    c: &Command,
    rho: &DensityMatrix,
    tables: &Tables,
    opts: &EvalOptions,
) -> Result<EvalOutcome, SemanticsError> {
    opts.validate()?;
    if rho.dim() != ctx.total_dim() {
        return Err(SemanticsError::StateDimension {
            expected: ctx.total_dim(),
            found: rho.dim(),
        });
    }
    let mut ev = Evaluator {
        tables,
        opts,
        truncation: 0.0,
    };
    let paths = ev.run(ctx, c, vec![rho.mat().clone()])?;
    let count = paths.iter().filter(|p| p.trace().re > PATH_MASS).count();
    let out_ctx = context_after(ctx, c);
    let state = merge(paths, out_ctx.total_dim());
    Ok(EvalOutcome {
        ctx: out_ctx,
        state: DensityMatrix::trusted(state.hermitian_part(), rho.tol()),
        truncation_error: ev.truncation,
        paths: count,
    })
}

/// `tr(eval(c, ρ)) / tr(ρ)`.
pub fn termination_probability(
    ctx: &VarContext,
    c: &Command,
    rho: &DensityMatrix,
    tables: &Tables,
    opts: &EvalOptions,
) -> Result<Termination, SemanticsError> {
    let t = rho.trace();
    if t <= PRUNE_NORM {
        return Err(SemanticsError::ZeroTrace);
    }
    let out = eval(ctx, c, rho, tables, opts)?;
    Ok(Termination {
        probability: (out.state.trace() / t).clamp(0.0, 1.0),
        truncation_error: out.truncation_error / t,
    })
}

fn merge(paths: Vec<CMatrix>, dim: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(dim, dim);
    for p in &paths {
        acc = &acc + p;
    }
    acc
}

struct Evaluator<'a> {
    tables: &'a Tables,
    opts: &'a EvalOptions,
    truncation: f64,
}

impl Evaluator<'_> {
    fn run(&mut self, ctx: &VarContext, c: &Command, paths: Vec<CMatrix>) -> Result<Vec<CMatrix>, SemanticsError> {
        let paths = if paths.len() > MAX_PATHS {
            vec![merge(paths, ctx.total_dim())]
        } else {
            paths
        };
        let map_all = |ops: &[CMatrix], paths: Vec<CMatrix>| -> Vec<CMatrix> {
            paths
                .into_iter()
                .map(|p| {
                    let mut acc = CMatrix::zeros(ops[0].rows(), ops[0].rows());
                    for e in ops {
                        acc = &acc + &e.sandwich(&p);
                    }
                    acc
                })
                .collect()
        };
        Ok(match c {
            Command::Skip => paths,
            Command::Seq(a, b) => {
                let mid = self.run(ctx, a, paths)?;
                self.run(&context_after(ctx, a), b, mid)?
            }
            Command::InitZero(v) => map_all(&local::set_to(ctx, v, 0)?, paths),
            Command::AssignBit(v, bit) => map_all(&local::set_to(ctx, v, usize::from(*bit))?, paths),
            Command::ApplyU { vars, gate } => {
                map_all(&[local::gate(ctx, vars, gate, self.tables)?], paths)
            }
            Command::NewBit(_) | Command::NewQbit(_) => map_all(&[local::allocate(ctx)], paths),
            Command::Discard(v) => map_all(&local::discard(ctx, v)?, paths),
            Command::MeasureCase {
                meas,
                vars,
                branches,
            } => {
                let ms = local::measurement(ctx, vars, meas, self.tables)?;
                let parts: Vec<(CMatrix, &Command)> = ms.into_iter().zip(branches).collect();
                self.branches(ctx, parts, paths)?
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
                self.branches(ctx, vec![(p0, &**else_branch), (p1, &**then_branch)], paths)?
            }
            Command::While { meas, vars, body } => {
                let ms = local::measurement(ctx, vars, meas, self.tables)?;
                let rho = merge(paths, ctx.total_dim());
                self.while_loop(ctx, &ms[0], &ms[1], body, rho)?
            }
        })
    }

    fn branches(
        &mut self,
        ctx: &VarContext,
        parts: Vec<(CMatrix, &Command)>,
        paths: Vec<CMatrix>,
    ) -> Result<Vec<CMatrix>, SemanticsError> {
        let mut out = Vec::new();
        for (m, branch) in parts {
            let entered: Vec<CMatrix> = paths.iter().map(|p| m.sandwich(p)).collect();
            out.extend(self.run(ctx, branch, entered)?);
        }
        Ok(out)
    }

    /// Iterates the loop on a single state. Each exit is one path; see the
    /// Kraus construction for the exact-divergence argument.
    fn while_loop(
        &mut self,
        ctx: &VarContext,
        m0: &CMatrix,
        m1: &CMatrix,
        body: &Command,
        mut rho: CMatrix,
    ) -> Result<Vec<CMatrix>, SemanticsError> {
        let dim = ctx.total_dim();
        let eps = match self.opts.mode {
            LoopMode::ExactKraus => PRUNE_NORM,
            LoopMode::Truncated => self.opts.loop_mass_eps,
        };
        let mut exits = Vec::new();
        let mut zero_run = 0;
        let mut mass = rho.trace().re;
        for _ in 0..self.opts.loop_max_iters {
            let exit = m0.sandwich(&rho);
            if exit.max_abs() <= PRUNE_NORM {
                zero_run += 1;
            } else {
                zero_run = 0;
                exits.push(exit);
            }
            let inside = self.run(ctx, body, vec![m1.sandwich(&rho)])?;
            rho = merge(inside, dim);
            mass = rho.trace().re;
            if zero_run >= dim * dim {
                return Ok(exits);
            }
            if mass < eps {
                self.truncation += mass.max(0.0);
                return Ok(exits);
            }
        }
        Err(SemanticsError::LoopNotConverged {
            mass,
            iters: self.opts.loop_max_iters,
            eps,
        })
    }
}
