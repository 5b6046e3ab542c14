//! Typing discipline for the two dialects.
//!
//! Ying-core has quantum variables only and a fixed context. The QPL dialect
//! adds bits, allocation (`new` prepends to the context), `discard`, bit
//! assignment and classical/quantum branching; branches must agree on their
//! final context and loop bodies must restore the context they started with.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::ast::{Command, Pos, Var, VarContext, VarDecl, VarKind};
use super::tables::Tables;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    YingCore,
    Qpl,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::YingCore => "ying-core",
            Dialect::Qpl => "qpl",
        })
    }
}

impl std::str::FromStr for Dialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ying-core" | "ying" | "qpd" => Ok(Dialect::YingCore),
            "qpl" => Ok(Dialect::Qpl),
            other => Err(format!("unknown dialect `{other}` (expected ying-core or qpl)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeErrorKind {
    #[error("undeclared variable `{0}`")]
    Undeclared(String),
    #[error("variable `{0}` used after discard")]
    UseAfterDiscard(String),
    #[error("`{name}` has kind {found}, but {construct} needs {expected}")]
    KindMismatch {
        name: String,
        construct: &'static str,
        expected: &'static str,
        found: VarKind,
    },
    #[error("gate `{gate}` acts on dimension {gate_dim}, targets have dimension {target_dim}")]
    ArityMismatch {
        gate: String,
        gate_dim: usize,
        target_dim: usize,
    },
    #[error("measurement `{meas}` does not act on dimension {dim}")]
    MeasurementDimension { meas: String, dim: usize },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("measurement `{meas}` has {outcomes} outcomes but {branches} branches were given")]
    BranchCount {
        meas: String,
        outcomes: usize,
        branches: usize,
    },
    #[error("loop measurement `{meas}` must have exactly 2 outcomes, has {outcomes}")]
    LoopOutcomes { meas: String, outcomes: usize },
    #[error("variable `{0}` listed twice")]
    DuplicateTarget(String),
    #[error("variable `{0}` already in scope")]
    AlreadyDeclared(String),
    #[error("{construct} branches end in different contexts: {left} vs {right}")]
    ContextMismatch {
        construct: &'static str,
        left: VarContext,
        right: VarContext,
    },
    #[error("{0} is not part of the ying-core dialect")]
    NotInDialect(&'static str),
    #[error("bit variable `{0}` is not allowed in the ying-core dialect")]
    BitInYingCore(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub pos: Option<Pos>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl std::error::Error for TypeError {}

/// A program that passed the checker, with its input and output contexts.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedProgram {
    pub dialect: Dialect,
    pub input: VarContext,
    pub output: VarContext,
    pub command: Command,
}

/// Checks `c` under `ctx`; on failure returns every error found.
pub fn typecheck(
    ctx: &VarContext,
    c: &Command,
    dialect: Dialect,
    tables: &Tables,
) -> Result<TypedProgram, Vec<TypeError>> {
    let mut checker = Checker {
        dialect,
        tables,
        errors: Vec::new(),
        discarded: HashSet::new(),
    };
    if dialect == Dialect::YingCore {
        for v in ctx.vars() {
            if v.kind == VarKind::Bit {
                checker.errors.push(TypeError {
                    kind: TypeErrorKind::BitInYingCore(v.name.clone()),
                    pos: None,
                });
            }
        }
    }
    let output = checker.check(ctx, c);
    if checker.errors.is_empty() {
        Ok(TypedProgram {
            dialect,
            input: ctx.clone(),
            output,
            command: c.clone(),
        })
    } else {
        Err(checker.errors)
    }
}

/// Context after running `c` from `ctx`, for programs known to be well typed.
pub fn context_after(ctx: &VarContext, c: &Command) -> VarContext {
    match c {
        Command::Seq(a, b) => context_after(&context_after(ctx, a), b),
        Command::NewBit(v) => ctx.prepend(VarDecl::new(v.name.clone(), VarKind::Bit)),
        Command::NewQbit(v) => ctx.prepend(VarDecl::new(v.name.clone(), VarKind::Qbit)),
        Command::Discard(v) => ctx.without(&v.name),
        Command::MeasureCase { branches, .. } => branches
            .first()
            .map_or_else(|| ctx.clone(), |b| context_after(ctx, b)),
        Command::IfBit { then_branch, .. } | Command::MeasureIf { then_branch, .. } => {
            context_after(ctx, then_branch)
        }
        _ => ctx.clone(),
    }
}

struct Checker<'a> {
    dialect: Dialect,
    tables: &'a Tables,
    errors: Vec<TypeError>,
    discarded: HashSet<String>,
}

impl Checker<'_> {
    fn err(&mut self, kind: TypeErrorKind, pos: Option<Pos>) {
        self.errors.push(TypeError { kind, pos });
    }

    fn qpl_only(&mut self, c: &Command, pos: Option<Pos>) -> bool {
        if self.dialect == Dialect::YingCore {
            self.err(TypeErrorKind::NotInDialect(c.name()), pos);
            false
        } else {
            true
        }
    }

    fn lookup(&mut self, ctx: &VarContext, v: &Var) -> Option<VarKind> {
        match ctx.kind(&v.name) {
            Some(k) => Some(k),
            None => {
                let kind = if self.discarded.contains(&v.name) {
                    TypeErrorKind::UseAfterDiscard(v.name.clone())
                } else {
                    TypeErrorKind::Undeclared(v.name.clone())
                };
                self.err(kind, v.pos);
                None
            }
        }
    }

    fn expect_kind(
        &mut self,
        ctx: &VarContext,
        v: &Var,
        construct: &'static str,
        expected: &'static str,
        ok: impl Fn(VarKind) -> bool,
    ) -> Option<VarKind> {
        let kind = self.lookup(ctx, v)?;
        if !ok(kind) {
            self.err(
                TypeErrorKind::KindMismatch {
                    name: v.name.clone(),
                    construct,
                    expected,
                    found: kind,
                },
                v.pos,
            );
            return None;
        }
        Some(kind)
    }

    /// Resolves a target list, returning the product of dimensions when every
    /// variable is well formed.
    fn targets(
        &mut self,
        ctx: &VarContext,
        vars: &[Var],
        construct: &'static str,
        allow_bits: bool,
    ) -> Option<usize> {
        let mut seen = HashSet::new();
        let mut dim = Some(1usize);
        for v in vars {
            if !seen.insert(v.name.as_str()) {
                self.err(TypeErrorKind::DuplicateTarget(v.name.clone()), v.pos);
                dim = None;
                continue;
            }
            let expected = if allow_bits {
                "a bit, qubit or qunit"
            } else {
                "a qubit or qunit"
            };
            match self.expect_kind(ctx, v, construct, expected, |k| allow_bits || k.is_quantum()) {
                Some(k) => dim = dim.map(|d| d * k.dim()),
                None => dim = None,
            }
        }
        dim
    }

    fn agree(&mut self, construct: &'static str, outs: Vec<VarContext>, fallback: &VarContext, pos: Option<Pos>) -> VarContext {
        let mut iter = outs.into_iter();
        let Some(first) = iter.next() else {
            return fallback.clone();
        };
        for other in iter {
            if other != first {
                self.err(
                    TypeErrorKind::ContextMismatch {
                        construct,
                        left: first.clone(),
                        right: other,
                    },
                    pos,
                );
            }
        }
        first
    }

    fn branch(&mut self, ctx: &VarContext, c: &Command) -> VarContext {
        let saved = self.discarded.clone();
        let out = self.check(ctx, c);
        self.discarded = saved;
        out
    }

    fn check(&mut self, ctx: &VarContext, c: &Command) -> VarContext {
        match c {
            Command::Skip => ctx.clone(),
            Command::Seq(a, b) => {
                let mid = self.check(ctx, a);
                self.check(&mid, b)
            }
            Command::InitZero(v) => {
                if self.dialect == Dialect::YingCore {
                    self.expect_kind(ctx, v, "initialization", "a qubit or qunit", VarKind::is_quantum);
                } else {
                    self.lookup(ctx, v);
                }
                ctx.clone()
            }
            Command::ApplyU { vars, gate } => {
                let target_dim = self.targets(ctx, vars, "unitary application", false);
                let first_pos = vars.first().and_then(|v| v.pos);
                match self.tables.gates.get(gate) {
                    None => self.err(TypeErrorKind::UnknownGate(gate.clone()), first_pos),
                    Some(u) => {
                        if let Some(d) = target_dim {
                            if u.rows() != d {
                                self.err(
                                    TypeErrorKind::ArityMismatch {
                                        gate: gate.clone(),
                                        gate_dim: u.rows(),
                                        target_dim: d,
                                    },
                                    first_pos,
                                );
                            }
                        }
                    }
                }
                ctx.clone()
            }
            Command::MeasureCase {
                meas,
                vars,
                branches,
            } => {
                let pos = vars.first().and_then(|v| v.pos);
                let allow_bits = self.dialect == Dialect::Qpl;
                if let Some(d) = self.targets(ctx, vars, "measurement", allow_bits) {
                    if let Some(outcomes) = self.measurement_outcomes(meas, d, pos) {
                        if outcomes != branches.len() {
                            self.err(
                                TypeErrorKind::BranchCount {
                                    meas: meas.clone(),
                                    outcomes,
                                    branches: branches.len(),
                                },
                                pos,
                            );
                        }
                    }
                }
                let outs: Vec<VarContext> = branches.iter().map(|b| self.branch(ctx, b)).collect();
                self.agree("measurement", outs, ctx, pos)
            }
            Command::While { meas, vars, body } => {
                let pos = vars.first().and_then(|v| v.pos);
                let allow_bits = self.dialect == Dialect::Qpl;
                if let Some(d) = self.targets(ctx, vars, "loop guard", allow_bits) {
                    if let Some(outcomes) = self.measurement_outcomes(meas, d, pos) {
                        if outcomes != 2 {
                            self.err(
                                TypeErrorKind::LoopOutcomes {
                                    meas: meas.clone(),
                                    outcomes,
                                },
                                pos,
                            );
                        }
                    }
                }
                let out = self.branch(ctx, body);
                if out != *ctx {
                    self.err(
                        TypeErrorKind::ContextMismatch {
                            construct: "loop body",
                            left: ctx.clone(),
                            right: out,
                        },
                        pos,
                    );
                }
                ctx.clone()
            }
            Command::NewBit(v) | Command::NewQbit(v) => {
                if !self.qpl_only(c, v.pos) {
                    return ctx.clone();
                }
                if ctx.get(&v.name).is_some() {
                    self.err(TypeErrorKind::AlreadyDeclared(v.name.clone()), v.pos);
                    return ctx.clone();
                }
                self.discarded.remove(&v.name);
                let kind = if matches!(c, Command::NewBit(_)) {
                    VarKind::Bit
                } else {
                    VarKind::Qbit
                };
                ctx.prepend(VarDecl::new(v.name.clone(), kind))
            }
            Command::Discard(v) => {
                if !self.qpl_only(c, v.pos) {
                    return ctx.clone();
                }
                if self.lookup(ctx, v).is_none() {
                    return ctx.clone();
                }
                self.discarded.insert(v.name.clone());
                ctx.without(&v.name)
            }
            Command::AssignBit(v, _) => {
                if self.qpl_only(c, v.pos) {
                    self.expect_kind(ctx, v, "bit assignment", "a bit", |k| k == VarKind::Bit);
                }
                ctx.clone()
            }
            Command::IfBit {
                guard,
                then_branch,
                else_branch,
            } => {
                if self.qpl_only(c, guard.pos) {
                    self.expect_kind(ctx, guard, "if", "a bit", |k| k == VarKind::Bit);
                }
                let t = self.branch(ctx, then_branch);
                let e = self.branch(ctx, else_branch);
                self.agree("if", vec![t, e], ctx, guard.pos)
            }
            Command::MeasureIf {
                guard,
                then_branch,
                else_branch,
            } => {
                if self.qpl_only(c, guard.pos) {
                    self.expect_kind(ctx, guard, "measure-if", "a qubit", |k| k == VarKind::Qbit);
                }
                let t = self.branch(ctx, then_branch);
                let e = self.branch(ctx, else_branch);
                self.agree("measure-if", vec![t, e], ctx, guard.pos)
            }
        }
    }

    fn measurement_outcomes(&mut self, meas: &str, dim: usize, pos: Option<Pos>) -> Option<usize> {
        if !self.tables.meas.contains(meas) {
            self.err(TypeErrorKind::UnknownMeasurement(meas.to_string()), pos);
            return None;
        }
        if let Some(fixed) = self.tables.meas.fixed_dim(meas) {
            if fixed != dim {
                self.err(
                    TypeErrorKind::MeasurementDimension {
                        meas: meas.to_string(),
                        dim,
                    },
                    pos,
                );
                return None;
            }
        }
        self.tables.meas.outcomes(meas, dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn check(src: &str, dialect: Dialect) -> Result<TypedProgram, Vec<TypeError>> {
        let (ctx, c) = parse(src).unwrap();
        typecheck(&ctx, &c, dialect, &Tables::builtin())
    }

    fn first_kind(src: &str, dialect: Dialect) -> TypeErrorKind {
        check(src, dialect).unwrap_err().remove(0).kind
    }

    #[test]
    fn if_over_qubit_is_kind_mismatch() {
        let k = first_kind("var q: qbit; if q then skip else skip fi", Dialect::Qpl);
        assert!(matches!(k, TypeErrorKind::KindMismatch { construct: "if", .. }));
    }

    #[test]
    fn use_after_discard() {
        let k = first_kind("new qbit q; discard q; q *= H", Dialect::Qpl);
        assert_eq!(k, TypeErrorKind::UseAfterDiscard("q".into()));
    }

    #[test]
    fn gate_arity() {
        let k = first_kind("var q1: qbit, q2: qbit; q1, q2 *= H", Dialect::YingCore);
        assert!(matches!(
            k,
            TypeErrorKind::ArityMismatch {
                gate_dim: 2,
                target_dim: 4,
                ..
            }
        ));
    }

    #[test]
    fn ying_core_rejects_qpl_constructs() {
        assert!(matches!(
            first_kind("new qbit q", Dialect::YingCore),
            TypeErrorKind::NotInDialect("new qbit")
        ));
        assert!(matches!(
            first_kind("var b: bit; skip", Dialect::YingCore),
            TypeErrorKind::BitInYingCore(_)
        ));
        assert!(check("new qbit q; q *= H; discard q", Dialect::Qpl).is_ok());
    }

    #[test]
    fn branch_contexts_must_agree() {
        let k = first_kind(
            "var q: qbit; measure q then new bit b else skip fi",
            Dialect::Qpl,
        );
        assert!(matches!(k, TypeErrorKind::ContextMismatch { .. }));
    }

    #[test]
    fn loop_body_must_restore_context() {
        let k = first_kind(
            "var b: bit; while std(b) = 1 do new qbit q od",
            Dialect::Qpl,
        );
        assert!(matches!(k, TypeErrorKind::ContextMismatch { construct: "loop body", .. }));
        assert!(check("var b: bit; while std(b) = 1 do new qbit q; discard q; b := 0 od", Dialect::Qpl).is_ok());
    }

    #[test]
    fn loop_needs_two_outcomes() {
        let k = first_kind("var q: qbit, r: qbit; while std(q, r) = 1 do skip od", Dialect::YingCore);
        assert!(matches!(k, TypeErrorKind::LoopOutcomes { outcomes: 4, .. }));
    }

    #[test]
    fn branch_count_must_match_outcomes() {
        let k = first_kind("var q: qbit; measure std(q) { case 0: skip }", Dialect::YingCore);
        assert!(matches!(k, TypeErrorKind::BranchCount { outcomes: 2, branches: 1, .. }));
    }

    #[test]
    fn output_context_tracks_allocation() {
        let t = check("new qbit a; new bit b; discard a", Dialect::Qpl).unwrap();
        assert_eq!(t.output.vars().len(), 1);
        assert_eq!(t.output.vars()[0].name, "b");
        assert_eq!(context_after(&t.input, &t.command), t.output);
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            first_kind("var q: qbit; q *= Nope", Dialect::YingCore),
            TypeErrorKind::UnknownGate(_)
        ));
        assert!(matches!(
            first_kind("var q: qbit; measure nope(q) { case 0: skip }", Dialect::YingCore),
            TypeErrorKind::UnknownMeasurement(_)
        ));
    }
}
