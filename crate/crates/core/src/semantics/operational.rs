use crate::lang::{Command, Tables, VarContext};
use crate::linalg::{CMatrix, DensityMatrix};

use super::{local, SemanticsError};

/// Branches whose state trace falls below this are pruned.
pub const PATH_PRUNE: f64 = 1e-12;

/// A configuration `⟨c, ρ⟩`; `Skip` as the residual marks termination.
#[derive(Debug, Clone)]
pub struct Config {
    pub ctx: VarContext,
    pub residual: Command,
    pub state: DensityMatrix,
}

impl Config {
    pub fn new(ctx: VarContext, residual: Command, state: DensityMatrix) -> Self {
        Config {
            ctx,
            residual,
            state,
        }
    }

    pub fn is_done(&self) -> bool {
        self.residual == Command::Skip
    }
}

/// Transition rule at the leaf of a derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Init,
    Unit,
    /// Measurement with the given outcome.
    Meas(usize),
    Loop0,
    Loop1,
    /// `⟨skip; c, ρ⟩ → ⟨c, ρ⟩`
    Seq2,
    Alloc,
    Discard,
    Assign,
    /// Bit test or single-qubit measurement, with the value observed.
    Branch(usize),
}

/// One-step successors of `cfg`.
pub fn step(cfg: &Config, tables: &Tables) -> Result<Vec<Config>, SemanticsError> {
    Ok(step_with_rule(cfg, tables)?.into_iter().map(|(_, c)| c).collect())
}

/// One-step successors with the rule that produced each.
pub fn step_with_rule(cfg: &Config, tables: &Tables) -> Result<Vec<(Rule, Config)>, SemanticsError> {
    let ctx = &cfg.ctx;
    let rho = cfg.state.mat();
    let tol = cfg.state.tol();
    let done = |ctx: VarContext, rule: Rule, state: CMatrix| {
        (rule, Config::new(ctx, Command::Skip, DensityMatrix::trusted(state, tol)))
    };
    let apply = |ops: &[CMatrix]| {
        let mut acc = CMatrix::zeros(ops[0].rows(), ops[0].rows());
        for e in ops {
            acc = &acc + &e.sandwich(rho);
        }
        acc
    };
    Ok(match &cfg.residual {
        Command::Skip => Vec::new(),
        Command::Seq(a, b) => {
            if **a == Command::Skip {
                return Ok(vec![(
                    Rule::Seq2,
                    Config::new(ctx.clone(), (**b).clone(), cfg.state.clone()),
                )]);
            }
            let inner = Config::new(ctx.clone(), (**a).clone(), cfg.state.clone());
            step_with_rule(&inner, tables)?
                .into_iter()
                .map(|(rule, next)| {
                    let residual = Command::Seq(Box::new(next.residual), b.clone());
                    (rule, Config::new(next.ctx, residual, next.state))
                })
                .collect()
        }
        Command::InitZero(v) => vec![done(ctx.clone(), Rule::Init, apply(&local::set_to(ctx, v, 0)?))],
        Command::AssignBit(v, bit) => vec![done(
            ctx.clone(),
            Rule::Assign,
            apply(&local::set_to(ctx, v, usize::from(*bit))?),
        )],
        Command::ApplyU { vars, gate } => vec![done(
            ctx.clone(),
            Rule::Unit,
            apply(&[local::gate(ctx, vars, gate, tables)?]),
        )],
        Command::NewBit(_) | Command::NewQbit(_) => {
            let out = crate::lang::context_after(ctx, &cfg.residual);
            vec![done(out, Rule::Alloc, apply(&[local::allocate(ctx)]))]
        }
        Command::Discard(v) => vec![done(
            ctx.without(&v.name),
            Rule::Discard,
            apply(&local::discard(ctx, v)?),
        )],
        Command::MeasureCase {
            meas,
            vars,
            branches,
        } => local::measurement(ctx, vars, meas, tables)?
            .iter()
            .zip(branches)
            .enumerate()
            .map(|(m, (op, branch))| {
                let state = DensityMatrix::trusted(op.sandwich(rho), tol);
                (Rule::Meas(m), Config::new(ctx.clone(), branch.clone(), state))
            })
            .collect(),
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
            [(0, p0, else_branch), (1, p1, then_branch)]
                .into_iter()
                .map(|(k, p, branch)| {
                    let state = DensityMatrix::trusted(p.sandwich(rho), tol);
                    (Rule::Branch(k), Config::new(ctx.clone(), (**branch).clone(), state))
                })
                .collect()
        }
        Command::While { meas, vars, body } => {
            let ms = local::measurement(ctx, vars, meas, tables)?;
            let again = Command::Seq(body.clone(), Box::new(cfg.residual.clone()));
            vec![
                done(ctx.clone(), Rule::Loop0, ms[0].sandwich(rho)),
                (
                    Rule::Loop1,
                    Config::new(ctx.clone(), again, DensityMatrix::trusted(ms[1].sandwich(rho), tol)),
                ),
            ]
        }
    })
}

/// Result of exhaustive breadth-first expansion.
#[derive(Debug, Clone)]
pub struct OperationalRun {
    /// Terminal states, in discovery order.
    pub terminals: Vec<DensityMatrix>,
    /// Context of the terminal configurations (`None` if nothing terminated).
    pub terminal_ctx: Option<VarContext>,
    /// Total trace still inside unfinished configurations at the cap.
    pub unexplored_mass: f64,
    /// Total trace of branches dropped below [`PATH_PRUNE`].
    pub pruned_mass: f64,
    /// Transitions taken along the deepest explored path.
    pub depth_reached: usize,
}

impl OperationalRun {
    /// Sum of the terminal states (`None` if there are none).
    pub fn total(&self) -> Option<CMatrix> {
        let mut it = self.terminals.iter();
        let first = it.next()?.mat().clone();
        Some(it.fold(first, |acc, t| &acc + t.mat()))
    }

    pub fn terminated_mass(&self) -> f64 {
        self.terminals.iter().map(DensityMatrix::trace).sum()
    }
}

/// Applies free `⟨skip; c⟩ → ⟨c⟩` steps until the leading statement is real.
fn settle(mut cfg: Config, tables: &Tables) -> Result<Config, SemanticsError> {
    loop {
        if !matches!(&cfg.residual, Command::Seq(..)) {
            return Ok(cfg);
        }
        let mut next = step_with_rule(&cfg, tables)?;
        if next.len() == 1 && next[0].0 == Rule::Seq2 {
            cfg = next.pop().expect("one successor").1;
        } else {
            return Ok(cfg);
        }
    }
}

/// Expands every path from `⟨c, ρ⟩` for up to `depth_cap` transitions.
/// Skip-elimination steps are not counted towards the depth.
pub fn run_operational(
    ctx: &VarContext,
    c: &Command,
    rho: &DensityMatrix,
    tables: &Tables,
    depth_cap: usize,
) -> Result<OperationalRun, SemanticsError> {
    if rho.dim() != ctx.total_dim() {
        return Err(SemanticsError::StateDimension {
            expected: ctx.total_dim(),
            found: rho.dim(),
        });
    }
    let mut run = OperationalRun {
        terminals: Vec::new(),
        terminal_ctx: None,
        unexplored_mass: 0.0,
        pruned_mass: 0.0,
        depth_reached: 0,
    };
    let mut frontier = vec![settle(Config::new(ctx.clone(), c.clone(), rho.clone()), tables)?];
    for depth in 0..depth_cap {
        let mut next = Vec::new();
        for cfg in frontier {
            if cfg.is_done() {
                run.terminal_ctx.get_or_insert_with(|| cfg.ctx.clone());
                run.terminals.push(cfg.state);
                continue;
            }
            for succ in step(&cfg, tables)? {
                let mass = succ.state.trace();
                if mass < PATH_PRUNE {
                    run.pruned_mass += mass.max(0.0);
                } else {
                    next.push(settle(succ, tables)?);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
        run.depth_reached = depth + 1;
    }
    for cfg in frontier {
        if cfg.is_done() {
            run.terminal_ctx.get_or_insert_with(|| cfg.ctx.clone());
            run.terminals.push(cfg.state);
        } else {
            run.unexplored_mass += cfg.state.trace();
        }
    }
    Ok(run)
}
