use crate::lang::{Command, Tables, VarContext};
use crate::linalg::{loewner_gap, CMatrix, DensityMatrix, QuantumPredicate};

use super::{wlp, wp, HoareError, HoareOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Total,
    Partial,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tot" | "total" => Ok(Mode::Total),
            "par" | "partial" => Ok(Mode::Partial),
            other => Err(format!("unknown mode `{other}` (expected tot or par)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HoareTriple {
    pub ctx: VarContext,
    pub prog: Command,
    pub pre: QuantumPredicate,
    pub post: QuantumPredicate,
    pub mode: Mode,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Valid,
    /// `witness` is a pure state with `tr(pre·ρ) > tr(transformer·ρ)`; the
    /// violation is the size of that gap.
    Invalid { witness: DensityMatrix, violation: f64 },
    /// A loop fixpoint did not converge.
    Inconclusive { residual: f64 },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::Invalid { .. } => "invalid",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TripleReport {
    pub verdict: Verdict,
    /// wp or wlp of the postcondition, when it could be computed.
    pub transformed: Option<CMatrix>,
    /// Smallest eigenvalue of `transformed − pre`.
    pub min_gap: f64,
    pub clamp: f64,
    pub residual: f64,
}

/// Decides `pre ⊑ wp(prog, post)` (total) or `pre ⊑ wlp(prog, post)` (partial).
pub fn check_triple(
    t: &HoareTriple,
    tables: &Tables,
    opts: &HoareOptions,
) -> Result<TripleReport, HoareError> {
    let in_dim = t.ctx.total_dim();
    if t.pre.dim() != in_dim {
        return Err(HoareError::Dimension {
            what: "precondition",
            expected: in_dim,
            found: t.pre.dim(),
        });
    }
    let transformer = match t.mode {
        Mode::Total => wp,
        Mode::Partial => wlp,
    };
    let tr = match transformer(&t.ctx, &t.prog, &t.post, tables, opts) {
        Ok(tr) => tr,
        Err(HoareError::NotConverged { residual, .. }) => {
            return Ok(TripleReport {
                verdict: Verdict::Inconclusive { residual },
                transformed: None,
                min_gap: f64::NAN,
                clamp: 0.0,
                residual,
            })
        }
        Err(e) => return Err(e),
    };
    let gap = loewner_gap(t.pre.mat(), tr.pred.mat(), opts.tol)?;
    let verdict = if gap.is_psd() {
        Verdict::Valid
    } else {
        let v = gap.eigen.vector(0);
        Verdict::Invalid {
            witness: DensityMatrix::pure(&v)?,
            violation: -gap.min_eigenvalue,
        }
    };
    Ok(TripleReport {
        verdict,
        transformed: Some(tr.pred.into_mat()),
        min_gap: gap.min_eigenvalue,
        clamp: tr.clamp,
        residual: tr.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn triple(src: &str, pre: CMatrix, post: CMatrix, mode: Mode) -> TripleReport {
        let (ctx, prog) = parse(src).unwrap();
        let t = HoareTriple {
            ctx,
            prog,
            pre: QuantumPredicate::new(pre).unwrap(),
            post: QuantumPredicate::new(post).unwrap(),
            mode,
        };
        check_triple(&t, &Tables::builtin(), &HoareOptions::default()).unwrap()
    }

    #[test]
    fn hadamard_triple_is_valid() {
        let plus = CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let r = triple("var q: qbit; q *= H", plus, CMatrix::basis_projector(2, 0), Mode::Total);
        assert!(r.verdict.is_valid());
    }

    #[test]
    fn divergent_loop_partial_vs_total() {
        let src = "var q: qbit; while std(q) = 1 do skip od";
        let zero = CMatrix::basis_projector(2, 0);
        let par = triple(src, CMatrix::identity(2), zero.clone(), Mode::Partial);
        assert!(par.verdict.is_valid());
        let tot = triple(src, CMatrix::identity(2), zero, Mode::Total);
        match tot.verdict {
            Verdict::Invalid { witness, violation } => {
                assert!(witness.mat().approx_eq(&CMatrix::basis_projector(2, 1), 1e-9));
                assert!((violation - 1.0).abs() < 1e-9);
            }
            other => panic!("expected invalid, got {other:?}"),
        }
    }

    #[test]
    fn zero_precondition_always_holds() {
        for mode in [Mode::Total, Mode::Partial] {
            let r = triple(
                "var q: qbit; q *= H; while std(q) = 1 do q *= H od",
                CMatrix::zeros(2, 2),
                CMatrix::basis_projector(2, 1),
                mode,
            );
            assert!(r.verdict.is_valid());
        }
    }

    #[test]
    fn inconclusive_when_fixpoint_stalls() {
        let (ctx, prog) = parse("var q: qbit; while std(q) = 1 do q *= H od").unwrap();
        let t = HoareTriple {
            ctx,
            prog,
            pre: QuantumPredicate::identity(2),
            post: QuantumPredicate::identity(2),
            mode: Mode::Total,
        };
        let opts = HoareOptions {
            fix_max_iters: 2,
            ..HoareOptions::default()
        };
        let r = check_triple(&t, &Tables::builtin(), &opts).unwrap();
        assert!(matches!(r.verdict, Verdict::Inconclusive { .. }));
    }
}
