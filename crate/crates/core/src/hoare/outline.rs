//! qPD proof outlines: a JSON document pairing a program with annotations,
//! checked rule by rule.
//!
//! Annotations are written once each. A step's precondition is the previous
//! annotation (or the outline's `pre`), so consecutive steps chain by
//! construction; an explicit `pre` on a step must agree with it. `Skip`
//! statements may be left without a step.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::lang::{parse, typecheck, Command, Dialect, Tables, VarContext, VarKind};
use crate::linalg::exchange::{read_matrix_file, MatrixDoc};
use crate::linalg::{loewner_gap, CMatrix, QuantumPredicate};
use crate::semantics::local;

use super::transform::Transformer;
use super::{HoareError, HoareOptions};

pub const OUTLINE_SCHEMA: &str = "qhl-outline/1";

/// An annotation: a matrix name (`I`, `0` or a key of `matrices`) or an
/// inline matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredRef {
    Name(String),
    Inline(MatrixDoc),
}

/// A named matrix: a path to a matrix file or an inline matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Path(String),
    Inline(MatrixDoc),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branch {
    pub pre: PredRef,
    #[serde(default)]
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "rule", deny_unknown_fields)]
pub enum Step {
    Skip {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        post: PredRef,
    },
    AsgnB {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        post: PredRef,
    },
    AsgnN {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        post: PredRef,
    },
    Unit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        post: PredRef,
    },
    /// Groups consecutive steps; its conclusion is the chained one.
    Seq {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        steps: Vec<Step>,
    },
    Measure {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        post: PredRef,
        branches: Vec<Branch>,
    },
    While {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        post: PredRef,
        invariant: PredRef,
        body: Vec<Step>,
    },
    /// Implication `pre ⊑ post`, used to strengthen a precondition or weaken
    /// a postcondition.
    Cons {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pre: Option<PredRef>,
        post: PredRef,
    },
}

impl Step {
    pub fn rule(&self) -> &'static str {
        match self {
            Step::Skip { .. } => "Skip",
            Step::AsgnB { .. } => "AsgnB",
            Step::AsgnN { .. } => "AsgnN",
            Step::Unit { .. } => "Unit",
            Step::Seq { .. } => "Seq",
            Step::Measure { .. } => "Measure",
            Step::While { .. } => "While",
            Step::Cons { .. } => "Cons",
        }
    }

    fn pre(&self) -> Option<&PredRef> {
        match self {
            Step::Skip { pre, .. }
            | Step::AsgnB { pre, .. }
            | Step::AsgnN { pre, .. }
            | Step::Unit { pre, .. }
            | Step::Seq { pre, .. }
            | Step::Measure { pre, .. }
            | Step::While { pre, .. }
            | Step::Cons { pre, .. } => pre.as_ref(),
        }
    }

    fn post(&self) -> Option<&PredRef> {
        match self {
            Step::Seq { .. } => None,
            Step::Skip { post, .. }
            | Step::AsgnB { post, .. }
            | Step::AsgnN { post, .. }
            | Step::Unit { post, .. }
            | Step::Measure { post, .. }
            | Step::While { post, .. }
            | Step::Cons { post, .. } => Some(post),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofOutline {
    pub schema: String,
    /// Program file, relative to the outline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program: Option<String>,
    /// Inline program text, used when `program` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Gate/measurement sidecar, relative to the outline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<String>,
    #[serde(default)]
    pub matrices: BTreeMap<String, MatrixSource>,
    pub pre: PredRef,
    pub post: PredRef,
    #[serde(default)]
    pub steps: Vec<Step>,
}

impl ProofOutline {
    pub fn from_json(text: &str) -> Result<Self, HoareError> {
        let o: ProofOutline = serde_json::from_str(text).map_err(|e| HoareError::Outline {
            path: "outline".into(),
            msg: e.to_string(),
        })?;
        if o.schema != OUTLINE_SCHEMA {
            return Err(HoareError::Outline {
                path: "schema".into(),
                msg: format!("expected `{OUTLINE_SCHEMA}`, found `{}`", o.schema),
            });
        }
        Ok(o)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("outline serializes")
    }
}

/// An outline with its program, tables and named matrices resolved.
#[derive(Debug, Clone)]
pub struct LoadedOutline {
    pub outline: ProofOutline,
    pub ctx: VarContext,
    pub command: Command,
    pub tables: Tables,
    pub matrices: BTreeMap<String, CMatrix>,
}

fn outline_err(path: &str, msg: impl Into<String>) -> HoareError {
    HoareError::Outline {
        path: path.to_string(),
        msg: msg.into(),
    }
}

impl LoadedOutline {
    /// Reads an outline file; relative paths inside it are resolved against
    /// its directory.
    pub fn load(path: impl AsRef<Path>, tol: f64) -> Result<Self, HoareError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| outline_err(&path.display().to_string(), e.to_string()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::resolve(ProofOutline::from_json(&text)?, &base, tol)
    }

    pub fn resolve(outline: ProofOutline, base: &Path, tol: f64) -> Result<Self, HoareError> {
        Self::resolve_with(outline, base, Tables::builtin(), tol)
    }

    /// Like [`Self::resolve`], starting from `tables` instead of the builtins.
    pub fn resolve_with(outline: ProofOutline, base: &Path, mut tables: Tables, tol: f64) -> Result<Self, HoareError> {
        let rel = |p: &str| -> PathBuf { base.join(p) };
        let text = match (&outline.program, &outline.source) {
            (Some(p), _) => std::fs::read_to_string(rel(p))
                .map_err(|e| outline_err("program", format!("{p}: {e}")))?,
            (None, Some(s)) => s.clone(),
            (None, None) => return Err(outline_err("program", "neither `program` nor `source` given")),
        };
        if let Some(s) = &outline.sidecar {
            tables.load_sidecar(rel(s), tol)?;
        }
        let (ctx, command) = parse(&text)?;
        typecheck(&ctx, &command, Dialect::YingCore, &tables).map_err(HoareError::Type)?;
        let mut matrices = BTreeMap::new();
        for (name, src) in &outline.matrices {
            let m = match src {
                MatrixSource::Path(p) => read_matrix_file(rel(p)),
                MatrixSource::Inline(doc) => doc.to_matrix(),
            }
            .map_err(|e| outline_err(&format!("matrices.{name}"), e.to_string()))?;
            matrices.insert(name.clone(), m);
        }
        Ok(LoadedOutline {
            outline,
            ctx,
            command,
            tables,
            matrices,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepVerdict {
    /// Location in the outline, e.g. `steps[2].branches[1].steps[0]`.
    pub path: String,
    pub rule: &'static str,
    pub valid: bool,
    /// Max-norm schema mismatch, or the Löwner gap for `Cons`.
    pub residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlineReport {
    pub steps: Vec<StepVerdict>,
    pub valid: bool,
}

/// Checks every step of `lo` against its rule schema.
pub fn check_outline(lo: &LoadedOutline, opts: &HoareOptions) -> Result<OutlineReport, HoareError> {
    let mut ck = Checker {
        lo,
        opts,
        dim: lo.ctx.total_dim(),
        verdicts: Vec::new(),
    };
    let pre = ck.resolve(&lo.outline.pre, "pre")?;
    let post = ck.resolve(&lo.outline.post, "post")?;
    let end = ck.block(pre, &lo.command, &lo.outline.steps, "steps")?;
    ck.chain(&end, &post, "post")?;
    let valid = ck.verdicts.iter().all(|v| v.valid);
    Ok(OutlineReport {
        steps: ck.verdicts,
        valid,
    })
}

struct Checker<'a> {
    lo: &'a LoadedOutline,
    opts: &'a HoareOptions,
    dim: usize,
    verdicts: Vec<StepVerdict>,
}

impl Checker<'_> {
    fn scale_tol(&self, m: &CMatrix) -> f64 {
        self.opts.tol * m.max_abs().max(1.0)
    }

    fn resolve(&self, r: &PredRef, path: &str) -> Result<CMatrix, HoareError> {
        let m = match r {
            PredRef::Name(n) if n == "I" => CMatrix::identity(self.dim),
            PredRef::Name(n) if n == "0" => CMatrix::zeros(self.dim, self.dim),
            PredRef::Name(n) => self
                .lo
                .matrices
                .get(n)
                .cloned()
                .ok_or_else(|| outline_err(path, format!("unknown matrix `{n}`")))?,
            PredRef::Inline(doc) => doc.to_matrix().map_err(|e| outline_err(path, e.to_string()))?,
        };
        if m.shape() != (self.dim, self.dim) {
            return Err(outline_err(
                path,
                format!("annotation is {}x{}, program needs {}x{}", m.rows(), m.cols(), self.dim, self.dim),
            ));
        }
        QuantumPredicate::with_tol(m.clone(), self.opts.tol)
            .map_err(|e| outline_err(path, format!("not a predicate: {e}")))?;
        Ok(m)
    }

    fn chain(&self, have: &CMatrix, want: &CMatrix, path: &str) -> Result<(), HoareError> {
        let diff = have.max_diff(want);
        if diff > self.scale_tol(want) {
            return Err(HoareError::NonChaining {
                path: path.to_string(),
                diff,
            });
        }
        Ok(())
    }

    fn block(&mut self, pre: CMatrix, cmd: &Command, steps: &[Step], path: &str) -> Result<CMatrix, HoareError> {
        let stmts = cmd.spine();
        let mut j = 0;
        let end = self.seq(pre, &stmts, &mut j, steps, path)?;
        while j < stmts.len() && *stmts[j] == Command::Skip {
            j += 1;
        }
        if j < stmts.len() {
            return Err(outline_err(
                path,
                format!("{} statement(s) left without a step, starting with {}", stmts.len() - j, stmts[j].name()),
            ));
        }
        Ok(end)
    }

    fn seq(
        &mut self,
        mut cur: CMatrix,
        stmts: &[&Command],
        j: &mut usize,
        steps: &[Step],
        path: &str,
    ) -> Result<CMatrix, HoareError> {
        for (k, step) in steps.iter().enumerate() {
            let spath = format!("{path}[{k}]");
            if let Some(pre) = step.pre() {
                let given = self.resolve(pre, &format!("{spath}.pre"))?;
                self.chain(&cur, &given, &format!("{spath}.pre"))?;
            }
            cur = match step {
                Step::Cons { post, .. } => {
                    let p = self.resolve(post, &format!("{spath}.post"))?;
                    let gap = loewner_gap(&cur, &p, self.opts.tol)?;
                    self.verdicts.push(StepVerdict {
                        path: spath,
                        rule: "Cons",
                        valid: gap.is_psd(),
                        residual: (-gap.min_eigenvalue).max(0.0),
                        detail: format!("min eigenvalue of post − pre: {:.3e}", gap.min_eigenvalue),
                    });
                    p
                }
                Step::Seq { steps, .. } => {
                    let slot = self.verdicts.len();
                    self.verdicts.push(StepVerdict {
                        path: spath.clone(),
                        rule: "Seq",
                        valid: true,
                        residual: 0.0,
                        detail: String::new(),
                    });
                    let end = self.seq(cur, stmts, j, steps, &format!("{spath}.steps"))?;
                    let ok = self.verdicts[slot + 1..].iter().all(|v| v.valid);
                    self.verdicts[slot].valid = ok;
                    self.verdicts[slot].detail = format!("{} sub-step(s) chained", steps.len());
                    end
                }
                _ => {
                    if !matches!(step, Step::Skip { .. }) {
                        while *j < stmts.len() && *stmts[*j] == Command::Skip {
                            *j += 1;
                        }
                    }
                    let Some(stmt) = stmts.get(*j) else {
                        return Err(outline_err(&spath, format!("no statement left for rule {}", step.rule())));
                    };
                    *j += 1;
                    self.axiom(cur, stmt, step, &spath)?
                }
            };
        }
        Ok(cur)
    }

    fn axiom(&mut self, cur: CMatrix, stmt: &Command, step: &Step, path: &str) -> Result<CMatrix, HoareError> {
        let ctx = &self.lo.ctx;
        let tables = &self.lo.tables;
        let post_ref = step.post().expect("rule steps carry a post");
        let post = self.resolve(post_ref, &format!("{path}.post"))?;
        let mismatch = || {
            outline_err(
                path,
                format!("rule {} does not match the {} statement", step.rule(), stmt.name()),
            )
        };
        let slot = self.verdicts.len();
        self.verdicts.push(StepVerdict {
            path: path.to_string(),
            rule: step.rule(),
            valid: false,
            residual: 0.0,
            detail: String::new(),
        });
        let mut extra_ok = true;
        let mut detail = String::new();
        let schema = match (step, stmt) {
            (Step::Skip { .. }, Command::Skip) => post.clone(),
            (Step::AsgnB { .. } | Step::AsgnN { .. }, Command::InitZero(v)) => {
                let qunit = matches!(ctx.kind(&v.name), Some(VarKind::Qunit(_)));
                if qunit != matches!(step, Step::AsgnN { .. }) {
                    return Err(mismatch());
                }
                let mut acc = CMatrix::zeros(self.dim, self.dim);
                for e in local::set_to(ctx, v, 0)? {
                    acc = &acc + &e.adjoint_sandwich(&post);
                }
                acc
            }
            (Step::Unit { .. }, Command::ApplyU { vars, gate }) => {
                local::gate(ctx, vars, gate, tables)?.adjoint_sandwich(&post)
            }
            (
                Step::Measure { branches, .. },
                Command::MeasureCase {
                    meas,
                    vars,
                    branches: cmds,
                },
            ) => {
                if branches.len() != cmds.len() {
                    return Err(outline_err(
                        path,
                        format!("{} branch outline(s) for {} outcome(s)", branches.len(), cmds.len()),
                    ));
                }
                let ms = local::measurement(ctx, vars, meas, tables)?;
                let mut acc = CMatrix::zeros(self.dim, self.dim);
                for (m, (b, cmd)) in branches.iter().zip(cmds).enumerate() {
                    let bpath = format!("{path}.branches[{m}]");
                    let pre_b = self.resolve(&b.pre, &format!("{bpath}.pre"))?;
                    let end = self.block(pre_b.clone(), cmd, &b.steps, &format!("{bpath}.steps"))?;
                    self.chain(&end, &post, &format!("{bpath} end"))?;
                    acc = &acc + &ms[m].adjoint_sandwich(&pre_b);
                }
                acc
            }
            (
                Step::While { invariant, body, .. },
                Command::While {
                    meas,
                    vars,
                    body: cmd,
                },
            ) => {
                let ms = local::measurement(ctx, vars, meas, tables)?;
                let q = self.resolve(invariant, &format!("{path}.invariant"))?;
                let target = &ms[0].adjoint_sandwich(&post) + &ms[1].adjoint_sandwich(&q);
                let end = self.block(q, cmd, body, &format!("{path}.body"))?;
                let body_diff = end.max_diff(&target);
                if body_diff > self.scale_tol(&target) {
                    extra_ok = false;
                    detail = format!("body ends {body_diff:.3e} away from M0†·post·M0 + M1†·inv·M1; ");
                }
                target
            }
            _ => return Err(mismatch()),
        };
        let diff = cur.max_diff(&schema);
        let ok = diff <= self.scale_tol(&schema) && extra_ok;
        detail.push_str(&format!("precondition differs from the rule schema by {diff:.3e}"));
        self.verdicts[slot].valid = ok;
        self.verdicts[slot].residual = diff;
        self.verdicts[slot].detail = detail;
        Ok(post)
    }
}

/// Builds an outline whose annotations are weakest liberal preconditions of
/// `post`. With `pre` given, a leading `Cons` step connects it to the
/// computed precondition.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_outline(
    ctx: &VarContext,
    c: &Command,
    post: &CMatrix,
    pre: Option<&CMatrix>,
    tables: &Tables,
    opts: &HoareOptions,
    program: Option<String>,
    sidecar: Option<String>,
) -> Result<ProofOutline, HoareError> {
    let tight = HoareOptions {
        fix_eps: opts.fix_eps.min(1e-12),
        ..*opts
    };
    let mut s = Synth {
        t: Transformer {
            tables,
            opts: &tight,
            liberal: true,
            residual: 0.0,
            iterations: 0,
        },
        names: Vec::new(),
    };
    let (p0, mut steps) = s.block(ctx, c, post)?;
    let pre_ref = match pre {
        Some(p) => {
            let start = s.name(p);
            let target = s.name(&p0);
            steps.insert(0, Step::Cons { pre: None, post: target });
            start
        }
        None => s.name(&p0),
    };
    let post_ref = s.name(post);
    let source = if program.is_none() {
        Some(crate::lang::print(ctx, c))
    } else {
        None
    };
    Ok(ProofOutline {
        schema: OUTLINE_SCHEMA.to_string(),
        program,
        source,
        sidecar,
        matrices: s
            .names
            .into_iter()
            .map(|(n, m)| (n, MatrixSource::Inline(MatrixDoc::from_matrix(&m))))
            .collect(),
        pre: pre_ref,
        post: post_ref,
        steps,
    })
}

struct Synth<'a> {
    t: Transformer<'a>,
    names: Vec<(String, CMatrix)>,
}

impl Synth<'_> {
    fn name(&mut self, m: &CMatrix) -> PredRef {
        let dim = m.rows();
        if m.approx_eq(&CMatrix::identity(dim), 0.0) {
            return PredRef::Name("I".into());
        }
        if m.max_abs() == 0.0 {
            return PredRef::Name("0".into());
        }
        if let Some((n, _)) = self.names.iter().find(|(_, x)| x.approx_eq(m, 1e-15)) {
            return PredRef::Name(n.clone());
        }
        let n = format!("A{}", self.names.len());
        self.names.push((n.clone(), m.clone()));
        PredRef::Name(n)
    }

    fn block(&mut self, ctx: &VarContext, c: &Command, post: &CMatrix) -> Result<(CMatrix, Vec<Step>), HoareError> {
        let mut cur = post.clone();
        let mut rev = Vec::new();
        for stmt in c.spine().into_iter().rev() {
            let (pre, step) = self.stmt(ctx, stmt, &cur)?;
            rev.push(step);
            cur = pre;
        }
        rev.reverse();
        Ok((cur, rev))
    }

    fn stmt(&mut self, ctx: &VarContext, stmt: &Command, post: &CMatrix) -> Result<(CMatrix, Step), HoareError> {
        let post_ref = self.name(post);
        Ok(match stmt {
            Command::Skip => (
                post.clone(),
                Step::Skip {
                    pre: None,
                    post: post_ref,
                },
            ),
            Command::InitZero(v) => {
                let pre = self.t.go(ctx, stmt, post.clone())?;
                let step = if matches!(ctx.kind(&v.name), Some(VarKind::Qunit(_))) {
                    Step::AsgnN { pre: None, post: post_ref }
                } else {
                    Step::AsgnB { pre: None, post: post_ref }
                };
                (pre, step)
            }
            Command::ApplyU { .. } => (
                self.t.go(ctx, stmt, post.clone())?,
                Step::Unit {
                    pre: None,
                    post: post_ref,
                },
            ),
            Command::MeasureCase {
                meas,
                vars,
                branches,
            } => {
                let ms = local::measurement(ctx, vars, meas, self.t.tables)?;
                let mut acc = CMatrix::zeros(ctx.total_dim(), ctx.total_dim());
                let mut outs = Vec::new();
                for (m, b) in ms.iter().zip(branches) {
                    let (pre_b, steps) = self.block(ctx, b, post)?;
                    acc = &acc + &m.adjoint_sandwich(&pre_b);
                    outs.push(Branch {
                        pre: self.name(&pre_b),
                        steps,
                    });
                }
                (
                    acc,
                    Step::Measure {
                        pre: None,
                        post: post_ref,
                        branches: outs,
                    },
                )
            }
            Command::While { meas, vars, body } => {
                let ms = local::measurement(ctx, vars, meas, self.t.tables)?;
                let w = self.t.fixpoint(ctx, &ms[0], &ms[1], body, post)?;
                let (q, body_steps) = self.block(ctx, body, &w)?;
                let pre = &ms[0].adjoint_sandwich(post) + &ms[1].adjoint_sandwich(&q);
                (
                    pre,
                    Step::While {
                        pre: None,
                        post: post_ref,
                        invariant: self.name(&q),
                        body: body_steps,
                    },
                )
            }
            other => {
                return Err(outline_err(
                    "synthesis",
                    format!("{} is outside the qPD rule set", other.name()),
                ))
            }
        })
    }
}
