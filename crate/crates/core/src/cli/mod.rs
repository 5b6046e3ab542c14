//! The `qhl` command line.
//!
//! Exit codes: 0 success or valid, 1 invalid (with witness), 2 malformed
//! input or usage, 3 inconclusive (a loop did not converge).

mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::casestudy::{all_promise_oracles, dj_verify, BooleanOracle, CaseError};
use crate::hoare::{
    check_outline, check_triple, eval_assertion, wlp, wp, HoareError, HoareOptions, HoareTriple,
    LoadedOutline, Mode, ProbAssertion, Verdict,
};
use crate::lang::{context_after, parse, typecheck, Command, Dialect, Tables, VarContext};
use crate::linalg::exchange::{read_matrix_file, MatrixDoc};
use crate::linalg::{CMatrix, DensityMatrix, QuantumPredicate, DEFAULT_TOL};
use crate::semantics::{eval, EvalOptions, LoopMode, RunReport, SemanticsError};

pub use render::{matrix as render_matrix, ZERO_THRESHOLD};

/// Version tag carried by every machine-format document.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "QHL_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Tot,
    Par,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DialectArg {
    YingCore,
    Qpl,
}

#[derive(Debug, Parser)]
#[command(name = "qhl", version, about = "Quantum Hoare logic toolkit: run, transform and verify quantum while-programs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Args)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sidecar file with user gates and measurements.
    #[arg(long, global = true)]
    gates: Option<PathBuf>,
    /// Numerical tolerance (default 1e-9, or $QHL_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Dialect used to typecheck programs (default: qpl, which includes ying-core).
    #[arg(long, value_enum, global = true)]
    dialect: Option<DialectArg>,
    /// Iteration cap for loop sums during evaluation.
    #[arg(long, global = true)]
    loop_max_iters: Option<usize>,
    /// In-loop mass below which a loop sum is cut.
    #[arg(long, global = true)]
    loop_mass_eps: Option<f64>,
    /// Require loops to resolve exactly instead of truncating.
    #[arg(long, global = true)]
    exact_loops: bool,
    /// Convergence threshold for wp/wlp loop fixpoints.
    #[arg(long, global = true)]
    fix_eps: Option<f64>,
    /// Iteration cap for wp/wlp loop fixpoints.
    #[arg(long, global = true)]
    fix_max_iters: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate a program on a state.
    Run {
        program: PathBuf,
        /// Input state (default |0…0⟩⟨0…0|).
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Weakest precondition of a postcondition.
    Wp {
        program: PathBuf,
        #[arg(long)]
        post: String,
    },
    /// Weakest liberal precondition of a postcondition.
    Wlp {
        program: PathBuf,
        #[arg(long)]
        post: String,
    },
    /// Decide a Hoare triple; predicates are matrix files or `I` / `0`.
    Check {
        program: PathBuf,
        #[arg(long)]
        pre: String,
        #[arg(long)]
        post: String,
        #[arg(long, value_enum, default_value = "tot")]
        mode: ModeArg,
    },
    /// Check a proof outline step by step.
    Prove { outline: PathBuf },
    /// Classify Deutsch–Jozsa oracles.
    Dj {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// constant0 | constant1 | balanced:<bits> | all
        #[arg(long)]
        f: String,
    },
    /// Evaluate a probability assertion on the final state of a program.
    Assert {
        program: PathBuf,
        #[arg(long)]
        rho: Option<PathBuf>,
        #[arg(long)]
        expr: String,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

fn malformed(msg: impl ToString) -> Failure {
    Failure {
        code: EXIT_MALFORMED,
        msg: msg.to_string(),
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        let code = match e {
            SemanticsError::LoopNotConverged { .. } => EXIT_INCONCLUSIVE,
            _ => EXIT_MALFORMED,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<HoareError> for Failure {
    fn from(e: HoareError) -> Self {
        match e {
            HoareError::Semantics(s) => s.into(),
            HoareError::NotConverged { .. } => Failure {
                code: EXIT_INCONCLUSIVE,
                msg: e.to_string(),
            },
            other => malformed(other),
        }
    }
}

impl From<CaseError> for Failure {
    fn from(e: CaseError) -> Self {
        match e {
            CaseError::Semantics(s) => s.into(),
            other => malformed(other),
        }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// the report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_MALFORMED
                }
            };
        }
    };
    let ctx = match Session::new(&cli.global) {
        Ok(s) => s,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            return f.code;
        }
    };
    let (code, report) = match ctx.dispatch(&cli.cmd) {
        Ok(r) => r,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            return f.code;
        }
    };
    let write_result = match &cli.global.out {
        Some(path) => std::fs::write(path, report.as_bytes()),
        None => out.write_all(report.as_bytes()),
    };
    if let Err(e) = write_result {
        let _ = writeln!(err, "error: cannot write report: {e}");
        return EXIT_MALFORMED;
    }
    code
}

/// Resolved options shared by every subcommand.
struct Session {
    format: Format,
    tol: f64,
    dialect: Dialect,
    tables: Tables,
    eval: EvalOptions,
    hoare: HoareOptions,
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(malformed(format!("{name} must be a positive number, got {x}")))
    }
}

fn positive_count(name: &str, n: usize) -> Result<usize, Failure> {
    if n > 0 {
        Ok(n)
    } else {
        Err(malformed(format!("{name} must be at least 1")))
    }
}

impl Session {
    fn new(g: &Global) -> Result<Self, Failure> {
        let tol = match (g.tol, std::env::var(TOL_ENV)) {
            (Some(t), _) => positive("--tol", t)?,
            (None, Ok(v)) => positive(
                TOL_ENV,
                v.trim()
                    .parse()
                    .map_err(|_| malformed(format!("{TOL_ENV}: not a number: `{v}`")))?,
            )?,
            (None, Err(_)) => DEFAULT_TOL,
        };
        let mut tables = Tables::builtin();
        if let Some(p) = &g.gates {
            tables.load_sidecar(p, tol).map_err(malformed)?;
        }
        let defaults = EvalOptions::default();
        let eval = EvalOptions {
            loop_max_iters: positive_count("--loop-max-iters", g.loop_max_iters.unwrap_or(defaults.loop_max_iters))?,
            loop_mass_eps: positive("--loop-mass-eps", g.loop_mass_eps.unwrap_or(defaults.loop_mass_eps))?,
            mode: if g.exact_loops {
                LoopMode::ExactKraus
            } else {
                LoopMode::Truncated
            },
            tol,
        };
        let hd = HoareOptions::default();
        let hoare = HoareOptions {
            fix_eps: positive("--fix-eps", g.fix_eps.unwrap_or(hd.fix_eps))?,
            fix_max_iters: positive_count("--fix-max-iters", g.fix_max_iters.unwrap_or(hd.fix_max_iters))?,
            tol,
        };
        Ok(Session {
            format: g.format,
            tol,
            dialect: match g.dialect {
                Some(DialectArg::YingCore) => Dialect::YingCore,
                _ => Dialect::Qpl,
            },
            tables,
            eval,
            hoare,
        })
    }

    fn dispatch(&self, cmd: &Cmd) -> Result<(i32, String), Failure> {
        match cmd {
            Cmd::Run { program, rho } => self.cmd_run(program, rho.as_deref()),
            Cmd::Wp { program, post } => self.cmd_transform(program, post, false),
            Cmd::Wlp { program, post } => self.cmd_transform(program, post, true),
            Cmd::Check {
                program,
                pre,
                post,
                mode,
            } => self.cmd_check(program, pre, post, *mode),
            Cmd::Prove { outline } => self.cmd_prove(outline),
            Cmd::Dj { k, f } => self.cmd_dj(*k, f),
            Cmd::Assert { program, rho, expr } => self.cmd_assert(program, rho.as_deref(), expr),
        }
    }

    fn program(&self, path: &Path) -> Result<(VarContext, Command), Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
        let (ctx, c) = parse(&text).map_err(|e| malformed(format!("{}:{e}", path.display())))?;
        typecheck(&ctx, &c, self.dialect, &self.tables).map_err(|errs| {
            let lines: Vec<String> = errs.iter().map(|e| format!("{}:{e}", path.display())).collect();
            malformed(lines.join("\n"))
        })?;
        Ok((ctx, c))
    }

    fn matrix_arg(&self, arg: &str, dim: usize) -> Result<CMatrix, Failure> {
        let m = match arg {
            "I" if !Path::new(arg).exists() => CMatrix::identity(dim),
            "0" if !Path::new(arg).exists() => CMatrix::zeros(dim, dim),
            path => read_matrix_file(path).map_err(|e| malformed(format!("{path}: {e}")))?,
        };
        if m.shape() != (dim, dim) {
            return Err(malformed(format!(
                "{arg}: matrix is {}x{}, program needs {dim}x{dim}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(m)
    }

    fn predicate(&self, arg: &str, dim: usize) -> Result<QuantumPredicate, Failure> {
        let m = self.matrix_arg(arg, dim)?;
        QuantumPredicate::with_tol(m, self.tol).map_err(|e| malformed(format!("{arg}: not a predicate: {e}")))
    }

    fn state(&self, arg: Option<&Path>, dim: usize) -> Result<DensityMatrix, Failure> {
        match arg {
            None => Ok(DensityMatrix::basis(dim, 0)),
            Some(p) => {
                let m = self.matrix_arg(&p.to_string_lossy(), dim)?;
                DensityMatrix::with_tol(m, self.tol)
                    .map_err(|e| malformed(format!("{}: not a density matrix: {e}", p.display())))
            }
        }
    }

    fn machine(&self, command: &str, mut body: Value) -> String {
        let obj = body.as_object_mut().expect("report bodies are objects");
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        obj.insert("command".into(), json!(command));
        let mut s = serde_json::to_string_pretty(&body).expect("json serializes");
        s.push('\n');
        s
    }

    fn cmd_run(&self, program: &Path, rho: Option<&Path>) -> Result<(i32, String), Failure> {
        let (ctx, c) = self.program(program)?;
        let rho = self.state(rho, ctx.total_dim())?;
        let out = eval(&ctx, &c, &rho, &self.tables, &self.eval)?;
        let report = RunReport::new(&out, rho.trace());
        let names: Vec<&str> = out.ctx.vars().iter().map(|v| v.name.as_str()).collect();
        let text = match self.format {
            Format::Machine => {
                let mut v = serde_json::to_value(&report).expect("report serializes");
                v["context"] = json!(names);
                self.machine("run", v)
            }
            Format::Human => format!(
                "context: {}\nfinal_state:\n{}trace: {:.12}\ntermination_probability: {:.12}\ntruncation_error: {}\npath_count: {}\n",
                out.ctx,
                render::matrix(out.state.mat(), 2),
                report.trace,
                report.termination_probability,
                render::sci(report.truncation_error),
                report.path_count
            ),
        };
        Ok((EXIT_OK, text))
    }

    fn cmd_transform(&self, program: &Path, post: &str, liberal: bool) -> Result<(i32, String), Failure> {
        let (ctx, c) = self.program(program)?;
        let out_dim = context_after(&ctx, &c).total_dim();
        let post = self.predicate(post, out_dim)?;
        let f = if liberal { wlp } else { wp };
        let t = f(&ctx, &c, &post, &self.tables, &self.hoare)?;
        let name = if liberal { "wlp" } else { "wp" };
        let text = match self.format {
            Format::Machine => self.machine(
                name,
                json!({
                    "predicate": MatrixDoc::from_matrix(t.pred.mat()),
                    "clamp": t.clamp,
                    "residual": t.residual,
                    "iterations": t.iterations,
                }),
            ),
            Format::Human => format!(
                "{name}:\n{}clamp: {}\nresidual: {}\niterations: {}\n",
                render::matrix(t.pred.mat(), 2),
                render::sci(t.clamp),
                render::sci(t.residual),
                t.iterations
            ),
        };
        Ok((EXIT_OK, text))
    }

    fn cmd_check(&self, program: &Path, pre: &str, post: &str, mode: ModeArg) -> Result<(i32, String), Failure> {
        let (ctx, prog) = self.program(program)?;
        let out_dim = context_after(&ctx, &prog).total_dim();
        let triple = HoareTriple {
            pre: self.predicate(pre, ctx.total_dim())?,
            post: self.predicate(post, out_dim)?,
            ctx,
            prog,
            mode: match mode {
                ModeArg::Tot => Mode::Total,
                ModeArg::Par => Mode::Partial,
            },
        };
        let r = check_triple(&triple, &self.tables, &self.hoare)?;
        let mode_name = match mode {
            ModeArg::Tot => "tot",
            ModeArg::Par => "par",
        };
        let code = match r.verdict {
            Verdict::Valid => EXIT_OK,
            Verdict::Invalid { .. } => EXIT_INVALID,
            Verdict::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        };
        let text = match self.format {
            Format::Machine => {
                let (witness, violation) = match &r.verdict {
                    Verdict::Invalid { witness, violation } => {
                        (json!(MatrixDoc::from_matrix(witness.mat())), json!(violation))
                    }
                    _ => (Value::Null, Value::Null),
                };
                self.machine(
                    "check",
                    json!({
                        "mode": mode_name,
                        "verdict": r.verdict.label(),
                        "min_gap": if r.min_gap.is_finite() { json!(r.min_gap) } else { Value::Null },
                        "clamp": r.clamp,
                        "residual": r.residual,
                        "witness": witness,
                        "violation": violation,
                    }),
                )
            }
            Format::Human => {
                let mut s = format!("verdict: {} ({mode_name})\n", r.verdict.label());
                if r.min_gap.is_finite() {
                    s.push_str(&format!("min eigenvalue of transformer - pre: {}\n", render::sci(r.min_gap)));
                }
                s.push_str(&format!("residual: {}\nclamp: {}\n", render::sci(r.residual), render::sci(r.clamp)));
                if let Verdict::Invalid { witness, violation } = &r.verdict {
                    s.push_str(&format!(
                        "witness (tr(pre·ρ) exceeds tr(transformer·ρ) by {}):\n{}",
                        render::sci(*violation),
                        render::matrix(witness.mat(), 2)
                    ));
                }
                s
            }
        };
        Ok((code, text))
    }

    fn cmd_prove(&self, outline: &Path) -> Result<(i32, String), Failure> {
        let lo = LoadedOutline::load(outline, self.tol)?;
        let r = check_outline(&lo, &self.hoare)?;
        let code = if r.valid { EXIT_OK } else { EXIT_INVALID };
        let verdict = if r.valid { "valid" } else { "invalid" };
        let text = match self.format {
            Format::Machine => {
                let steps: Vec<Value> = r
                    .steps
                    .iter()
                    .map(|s| {
                        json!({
                            "path": s.path,
                            "rule": s.rule,
                            "valid": s.valid,
                            "residual": s.residual,
                            "detail": s.detail,
                        })
                    })
                    .collect();
                self.machine("prove", json!({ "verdict": verdict, "steps": steps }))
            }
            Format::Human => {
                let width = r.steps.iter().map(|s| s.path.len()).max().unwrap_or(0);
                let mut s = String::new();
                for st in &r.steps {
                    s.push_str(&format!(
                        "{:<width$}  {:<7}  {:<7}  {}\n",
                        st.path,
                        st.rule,
                        if st.valid { "ok" } else { "FAILED" },
                        st.detail
                    ));
                }
                s.push_str(&format!("verdict: {verdict}\n"));
                s
            }
        };
        Ok((code, text))
    }

    fn cmd_dj(&self, k: usize, f: &str) -> Result<(i32, String), Failure> {
        let oracles = if f == "all" {
            all_promise_oracles(k)?
        } else {
            vec![BooleanOracle::parse(f, k)?]
        };
        let mut rows = Vec::new();
        for o in &oracles {
            let r = dj_verify(o)?;
            rows.push((o.spec(), o.class(), r.p00, r.classification));
        }
        let text = match self.format {
            Format::Machine => {
                let results: Vec<Value> = rows
                    .iter()
                    .map(|(spec, class, p00, cls)| {
                        json!({
                            "oracle": spec,
                            "class": class.to_string(),
                            "p00": p00,
                            "classification": cls.to_string(),
                            "correct": class == cls,
                        })
                    })
                    .collect();
                self.machine("dj", json!({ "k": k, "results": results }))
            }
            Format::Human => {
                let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
                let mut s = format!("{:<width$}  {:>12}  classification\n", "oracle", "p(0…0)");
                for (spec, _, p00, cls) in &rows {
                    s.push_str(&format!("{spec:<width$}  {p00:>12.9}  {cls}\n"));
                }
                s
            }
        };
        Ok((EXIT_OK, text))
    }

    fn cmd_assert(&self, program: &Path, rho: Option<&Path>, expr: &str) -> Result<(i32, String), Failure> {
        let (ctx, c) = self.program(program)?;
        let rho = self.state(rho, ctx.total_dim())?;
        let a = ProbAssertion::parse(expr)?;
        let out = eval(&ctx, &c, &rho, &self.tables, &self.eval)?;
        let r = eval_assertion(&a, &out.ctx, &out.state, self.tol)?;
        let code = if r.holds { EXIT_OK } else { EXIT_INVALID };
        let text = match self.format {
            Format::Machine => {
                let conj: Vec<Value> = r
                    .details
                    .iter()
                    .map(|(t, l, rr, ok)| json!({ "text": t, "lhs": l, "rhs": rr, "holds": ok }))
                    .collect();
                self.machine(
                    "assert",
                    json!({
                        "holds": r.holds,
                        "conjuncts": conj,
                        "truncation_error": out.truncation_error,
                    }),
                )
            }
            Format::Human => {
                let mut s = String::new();
                for (t, l, rr, ok) in &r.details {
                    s.push_str(&format!(
                        "{}  {t}   (lhs {l:.12}, rhs {rr:.12})\n",
                        if *ok { "holds " } else { "FAILS " }
                    ));
                }
                s.push_str(&format!("assertion: {}\n", if r.holds { "holds" } else { "fails" }));
                s
            }
        };
        Ok((code, text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["qhl"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, EXIT_MALFORMED);
        assert_eq!(call(&["dj"]).0, EXIT_MALFORMED);
        assert_eq!(call(&["dj", "--f", "constant1", "--tol", "-1"]).0, EXIT_MALFORMED);
    }

    #[test]
    fn help_succeeds() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("prove"));
    }

    #[test]
    fn dj_machine_report() {
        let (code, out, _) = call(&["dj", "--k", "2", "--f", "constant1", "--format", "machine"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert!((v["results"][0]["p00"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(v["results"][0]["classification"], "constant");
    }
}
