use crate::lang::{context_after, Command, Tables, VarContext};
use crate::linalg::{CMatrix, KrausMap, PRUNE_NORM};

use super::{local, EvalOptions, LoopMode, SemanticsError};

/// Longest Kraus list kept before re-expressing the map through its Choi matrix.
const MAX_KRAUS_LEN: usize = 4096;

/// A Kraus map together with the mass a truncated loop sum may have dropped.
#[derive(Debug, Clone)]
pub struct Denotation {
    pub map: KrausMap,
    pub truncation_error: f64,
}

/// Compositional Kraus map of `c` from the context `ctx`.
pub fn denote(
    ctx: &VarContext,
    c: &Command,
    tables: &Tables,
    opts: &EvalOptions,
) -> Result<KrausMap, SemanticsError> {
    denote_with_error(ctx, c, tables, opts).map(|d| d.map)
}

pub fn denote_with_error(
    ctx: &VarContext,
    c: &Command,
    tables: &Tables,
    opts: &EvalOptions,
) -> Result<Denotation, SemanticsError> {
    opts.validate()?;
    let (map, truncation_error) = go(ctx, c, tables, opts)?;
    Ok(Denotation {
        map,
        truncation_error,
    })
}

fn tidy(k: KrausMap, tol: f64) -> Result<KrausMap, SemanticsError> {
    if k.len() > k.in_dim() * k.out_dim() || k.len() > MAX_KRAUS_LEN {
        Ok(k.compressed(tol)?)
    } else {
        Ok(k)
    }
}

fn compose(first: &KrausMap, second: &KrausMap, tol: f64) -> Result<KrausMap, SemanticsError> {
    tidy(first.then(second)?, tol)
}

fn go(
    ctx: &VarContext,
    c: &Command,
    tables: &Tables,
    opts: &EvalOptions,
) -> Result<(KrausMap, f64), SemanticsError> {
    let dim = ctx.total_dim();
    Ok(match c {
        Command::Skip => (KrausMap::identity(dim), 0.0),
        Command::Seq(a, b) => {
            let (ka, ea) = go(ctx, a, tables, opts)?;
            let mid = context_after(ctx, a);
            let (kb, eb) = go(&mid, b, tables, opts)?;
            (compose(&ka, &kb, opts.tol)?, ea + eb)
        }
        Command::InitZero(v) => (KrausMap::new(local::set_to(ctx, v, 0)?)?, 0.0),
        Command::AssignBit(v, bit) => (
            KrausMap::new(local::set_to(ctx, v, usize::from(*bit))?)?,
            0.0,
        ),
        Command::ApplyU { vars, gate } => {
            (KrausMap::single(local::gate(ctx, vars, gate, tables)?), 0.0)
        }
        Command::NewBit(_) | Command::NewQbit(_) => (KrausMap::single(local::allocate(ctx)), 0.0),
        Command::Discard(v) => (KrausMap::new(local::discard(ctx, v)?)?, 0.0),
        Command::MeasureCase {
            meas,
            vars,
            branches,
        } => {
            let ms = local::measurement(ctx, vars, meas, tables)?;
            let parts: Vec<(CMatrix, &Command)> = ms.into_iter().zip(branches).collect();
            branch_sum(ctx, parts, tables, opts)?
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
            branch_sum(
                ctx,
                vec![(p0, &**else_branch), (p1, &**then_branch)],
                tables,
                opts,
            )?
        }
        Command::While { meas, vars, body } => {
            let ms = local::measurement(ctx, vars, meas, tables)?;
            let (kb, eb) = go(ctx, body, tables, opts)?;
            loop_map(dim, &ms[0], &ms[1], &kb, eb, opts)?
        }
    })
}

fn branch_sum(
    ctx: &VarContext,
    parts: Vec<(CMatrix, &Command)>,
    tables: &Tables,
    opts: &EvalOptions,
) -> Result<(KrausMap, f64), SemanticsError> {
    let mut acc: Option<KrausMap> = None;
    let mut err = 0.0;
    for (m, branch) in parts {
        let (kb, eb) = go(ctx, branch, tables, opts)?;
        let term = KrausMap::single(m).then(&kb)?;
        err += eb;
        acc = Some(match acc {
            None => term,
            Some(a) => tidy(a.plus(&term)?, opts.tol)?,
        });
    }
    let dim = ctx.total_dim();
    Ok((acc.unwrap_or_else(|| KrausMap::zero(dim, dim)), err))
}

/// `Σ_n S₀·S₁ⁿ` on transfer matrices, with `S₀ = M₀·M₀†` and
/// `S₁ = body ∘ (M₁·M₁†)`.
///
/// The sum stops when the probe state `I/d` has less than the mass threshold
/// left inside the loop. It also stops, with no truncation, once the exit term
/// has vanished for `d²` consecutive iterations: every later power of `S₁` is
/// a combination of the previous `d²` ones, so all later exit terms vanish too.
fn loop_map(
    dim: usize,
    m0: &CMatrix,
    m1: &CMatrix,
    body: &KrausMap,
    body_err: f64,
    opts: &EvalOptions,
) -> Result<(KrausMap, f64), SemanticsError> {
    let s0 = KrausMap::single(m0.clone()).transfer_matrix();
    let s1 = KrausMap::single(m1.clone()).then(body)?.transfer_matrix();
    let n2 = dim * dim;
    let eps = match opts.mode {
        LoopMode::ExactKraus => PRUNE_NORM,
        LoopMode::Truncated => opts.loop_mass_eps,
    };

    let mut power = CMatrix::identity(n2);
    let mut acc = CMatrix::zeros(n2, n2);
    let mut zero_run = 0usize;
    let mut mass = 1.0;
    let mut iters = 0usize;
    let mut truncation = None;
    while iters < opts.loop_max_iters {
        iters += 1;
        let exit = s0.matmul(&power);
        if exit.max_abs() <= PRUNE_NORM {
            zero_run += 1;
        } else {
            zero_run = 0;
            acc = &acc + &exit;
        }
        power = s1.matmul(&power);
        mass = probe_mass(&power, dim);
        if zero_run >= n2 {
            truncation = Some(0.0);
            break;
        }
        if mass < eps {
            truncation = Some(mass.max(0.0));
            break;
        }
    }
    let Some(truncation) = truncation else {
        return Err(SemanticsError::LoopNotConverged {
            mass,
            iters,
            eps,
        });
    };
    let map = KrausMap::from_transfer(&acc, dim, dim, opts.tol)?;
    let err = (truncation + body_err * iters as f64).min(1.0);
    Ok((map, err))
}

/// Trace of `T(I/d)` for a transfer matrix `T` on row-major vectorized states.
pub(crate) fn probe_mass(t: &CMatrix, dim: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..dim {
        for i in 0..dim {
            s += t[(a * dim + a, i * dim + i)].re;
        }
    }
    s / dim as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;
    use crate::linalg::{random_density, CMatrix};

    fn run(src: &str, rho: &CMatrix) -> CMatrix {
        let (ctx, c) = parse(src).unwrap();
        denote(&ctx, &c, &Tables::builtin(), &EvalOptions::default())
            .unwrap()
            .apply_mat(rho)
    }

    #[test]
    fn skip_is_identity() {
        let rho = random_density(4, 7).unwrap().into_mat();
        assert!(run("var a: qbit, b: qbit; skip", &rho).approx_eq(&rho, 1e-12));
    }

    #[test]
    fn reset_from_one() {
        let out = run("var q: qbit; q := 0", &CMatrix::basis_projector(2, 1));
        assert!(out.approx_eq(&CMatrix::basis_projector(2, 0), 1e-12));
    }

    #[test]
    fn allocation_puts_state_top_left() {
        let rho = random_density(2, 3).unwrap().into_mat();
        let out = run("var r: qbit; new qbit q", &rho);
        assert_eq!(out.shape(), (4, 4));
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i < 2 && j < 2 { rho[(i, j)] } else { crate::linalg::ZERO };
                assert!((out[(i, j)] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn measure_and_forget() {
        let plus = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let out = run("var q: qbit; measure std(q) { case 0: skip case 1: skip }", &plus);
        assert!(out.approx_eq(&CMatrix::real_diag(&[0.5, 0.5]), 1e-12));
    }

    #[test]
    fn divergent_loop_is_exactly_zero_on_one() {
        let (ctx, c) = parse("var q: qbit; while std(q) = 1 do skip od").unwrap();
        let d = denote_with_error(&ctx, &c, &Tables::builtin(), &EvalOptions::default()).unwrap();
        assert_eq!(d.truncation_error, 0.0);
        let out = d.map.apply_mat(&CMatrix::basis_projector(2, 1));
        assert!(out.max_abs() < 1e-12);
        let plus = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let out = d.map.apply_mat(&plus);
        assert!(out.approx_eq(&CMatrix::real_diag(&[0.5, 0.0]), 1e-12));
    }

    #[test]
    fn geometric_loop_needs_truncation() {
        let (ctx, c) = parse("var q: qbit; while std(q) = 1 do q *= H od").unwrap();
        let t = Tables::builtin();
        let d = denote_with_error(&ctx, &c, &t, &EvalOptions::default()).unwrap();
        assert!(d.truncation_error < 1e-9);
        let out = d.map.apply_mat(&CMatrix::basis_projector(2, 1));
        assert!((out.trace().re - 1.0).abs() < 1e-8);
        let exact = EvalOptions {
            mode: LoopMode::ExactKraus,
            loop_max_iters: 20,
            ..EvalOptions::default()
        };
        assert!(matches!(
            denote(&ctx, &c, &t, &exact),
            Err(SemanticsError::LoopNotConverged { .. })
        ));
    }
}
