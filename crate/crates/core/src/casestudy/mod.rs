//! Deutsch–Jozsa: oracles, the two program forms, and the classification run.

use std::fmt;

use thiserror::Error;

use crate::lang::{Command, Dialect, TableError, Tables, Var, VarContext};
use crate::linalg::{kron, CMatrix, DensityMatrix, ONE};
use crate::semantics::{eval, EvalOptions, SemanticsError};

/// Largest number of oracle input bits accepted by the builders.
pub const MAX_K: usize = 6;

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {0} exceeds the limit of {MAX_K}")]
    KTooLarge(usize),
    #[error("bad oracle spec `{0}` (expected constant0, constant1 or balanced:<bits>)")]
    BadSpec(String),
    #[error("oracle table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("oracle is neither constant nor balanced")]
    NotPromise,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleClass {
    Constant,
    Balanced,
    Other,
}

impl fmt::Display for OracleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleClass::Constant => "constant",
            OracleClass::Balanced => "balanced",
            OracleClass::Other => "other",
        })
    }
}

/// `f : {0,1}^k → {0,1}` as a truth table indexed by the input read as a
/// binary number with the first bit most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanOracle {
    k: usize,
    table: Vec<bool>,
}

fn check_k(k: usize) -> Result<(), CaseError> {
    match k {
        0 => Err(CaseError::ZeroK),
        k if k > MAX_K => Err(CaseError::KTooLarge(k)),
        _ => Ok(()),
    }
}

impl BooleanOracle {
    pub fn from_table(k: usize, table: Vec<bool>) -> Result<Self, CaseError> {
        check_k(k)?;
        if table.len() != 1 << k {
            return Err(CaseError::TableLength {
                expected: 1 << k,
                found: table.len(),
            });
        }
        Ok(BooleanOracle { k, table })
    }

    pub fn constant(k: usize, value: bool) -> Result<Self, CaseError> {
        check_k(k)?;
        Self::from_table(k, vec![value; 1 << k])
    }

    /// Parses `constant0`, `constant1` or `balanced:<bits>`. The bit string
    /// must have `2^k` characters; a non-balanced string parses but has class
    /// [`OracleClass::Other`].
    pub fn parse(spec: &str, k: usize) -> Result<Self, CaseError> {
        match spec {
            "constant0" => Self::constant(k, false),
            "constant1" => Self::constant(k, true),
            _ => {
                let bits = spec
                    .strip_prefix("balanced:")
                    .ok_or_else(|| CaseError::BadSpec(spec.to_string()))?;
                let table = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(CaseError::BadSpec(spec.to_string())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Self::from_table(k, table)
            }
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn class(&self) -> OracleClass {
        let ones = self.table.iter().filter(|&&b| b).count();
        if ones == 0 || ones == self.table.len() {
            OracleClass::Constant
        } else if 2 * ones == self.table.len() {
            OracleClass::Balanced
        } else {
            OracleClass::Other
        }
    }

    pub fn spec(&self) -> String {
        match (self.class(), self.table[0]) {
            (OracleClass::Constant, false) => "constant0".into(),
            (OracleClass::Constant, true) => "constant1".into(),
            _ => format!(
                "balanced:{}",
                self.table.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()
            ),
        }
    }

    fn promise(&self) -> Result<(), CaseError> {
        if self.class() == OracleClass::Other {
            Err(CaseError::NotPromise)
        } else {
            Ok(())
        }
    }
}

/// Both constant oracles and every balanced one on `k` bits.
pub fn all_promise_oracles(k: usize) -> Result<Vec<BooleanOracle>, CaseError> {
    check_k(k)?;
    let n = 1usize << k;
    let mut out = vec![BooleanOracle::constant(k, false)?, BooleanOracle::constant(k, true)?];
    if n <= 16 {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize * 2 == n {
                out.push(BooleanOracle::from_table(k, (0..n).map(|x| mask >> x & 1 == 1).collect())?);
            }
        }
    }
    Ok(out)
}

/// `H^⊗k`.
pub fn build_hadamard(k: usize) -> Result<CMatrix, CaseError> {
    if k == 0 {
        return Err(CaseError::ZeroK);
    }
    Ok(crate::linalg::gates::hadamard_power(k))
}

/// `U_f |x⟩|b⟩ = |x⟩|b ⊕ f(x)⟩` as a permutation matrix.
pub fn build_uf(f: &BooleanOracle) -> CMatrix {
    let n = 2 << f.k;
    let mut u = CMatrix::zeros(n, n);
    for x in 0..(1 << f.k) {
        for b in 0..2 {
            let target = x * 2 + (b ^ usize::from(f.eval(x)));
            u[(target, x * 2 + b)] = ONE;
        }
    }
    u
}

/// `|0…0⟩⟨0…0| ⊗ I₂`: all input qubits read zero, the ancilla is unconstrained.
pub fn dj_postcondition(k: usize) -> CMatrix {
    kron(&CMatrix::basis_projector(1 << k, 0), &CMatrix::identity(2))
}

#[derive(Debug, Clone)]
pub struct DjProgram {
    pub ctx: VarContext,
    pub command: Command,
    /// Built-in gates plus `Uf`.
    pub tables: Tables,
    pub dialect: Dialect,
}

fn input_names(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("q{i}")).collect()
}

/// The algorithm as a program. The ying-core form starts from
/// `q1 … qk, qe` and stops before measuring; the qpl form starts from the
/// empty context, allocates, discards the ancilla and records the outcomes in
/// bits `b1 … bk`.
pub fn dj_program(f: &BooleanOracle, dialect: Dialect) -> Result<DjProgram, CaseError> {
    f.promise()?;
    let k = f.k;
    let mut tables = Tables::builtin();
    tables.gates.insert("Uf", build_uf(f), 1e-12)?;

    let qs = input_names(k);
    let mut all: Vec<&str> = qs.iter().map(String::as_str).collect();
    all.push("qe");
    let inputs = &all[..k];
    let core_tail = [
        Command::apply(&["qe"], "N"),
        Command::apply(&all, &format!("H{}", k + 1)),
        Command::apply(&all, "Uf"),
        Command::apply(inputs, &format!("H{k}")),
    ];

    let (ctx, command) = match dialect {
        Dialect::YingCore => {
            let mut cmds: Vec<Command> = all.iter().map(|q| Command::init(q)).collect();
            cmds.extend(core_tail);
            (VarContext::qubits(&all), Command::seq(cmds))
        }
        Dialect::Qpl => {
            let mut cmds: Vec<Command> = all.iter().rev().map(|q| Command::NewQbit(Var::new(*q))).collect();
            cmds.extend(core_tail);
            cmds.push(Command::Discard(Var::new("qe")));
            for i in (1..=k).rev() {
                cmds.push(Command::NewBit(Var::new(format!("b{i}"))));
            }
            for i in 1..=k {
                let b = Var::new(format!("b{i}"));
                cmds.push(Command::MeasureIf {
                    guard: Var::new(format!("q{i}")),
                    then_branch: Box::new(Command::AssignBit(b.clone(), true)),
                    else_branch: Box::new(Command::AssignBit(b, false)),
                });
            }
            (VarContext::empty(), Command::seq(cmds))
        }
    };
    Ok(DjProgram {
        ctx,
        command,
        tables,
        dialect,
    })
}

#[derive(Debug, Clone)]
pub struct DjReport {
    pub oracle: BooleanOracle,
    /// Probability that every input qubit reads 0.
    pub p00: f64,
    pub classification: OracleClass,
    /// Final state of the ying-core form over `q1 … qk, qe`.
    pub final_state: DensityMatrix,
}

/// Runs the ying-core form from `|0…0⟩` and classifies `f` as constant iff
/// the all-zero outcome has probability above ½.
pub fn dj_verify(f: &BooleanOracle) -> Result<DjReport, CaseError> {
    let prog = dj_program(f, Dialect::YingCore)?;
    let dim = prog.ctx.total_dim();
    let rho = DensityMatrix::basis(dim, 0);
    let out = eval(&prog.ctx, &prog.command, &rho, &prog.tables, &EvalOptions::default())?;
    let p00 = out.state.mat()[(0, 0)].re + out.state.mat()[(1, 1)].re;
    Ok(DjReport {
        oracle: f.clone(),
        p00,
        classification: if p00 > 0.5 {
            OracleClass::Constant
        } else {
            OracleClass::Balanced
        },
        final_state: out.state,
    })
}
