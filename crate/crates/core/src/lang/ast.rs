use std::fmt;

/// Source position (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A variable occurrence. Equality ignores the source position.
#[derive(Debug, Clone, Eq)]
pub struct Var {
    pub name: String,
    pub pos: Option<Pos>,
}

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            pos: None,
        }
    }

    pub fn at(name: impl Into<String>, pos: Pos) -> Self {
        Var {
            name: name.into(),
            pos: Some(pos),
        }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Bit,
    Qbit,
    /// Quantum integer truncated to `d` levels.
    Qunit(usize),
}

pub const DEFAULT_QUNIT_DIM: usize = 8;

impl VarKind {
    pub fn dim(self) -> usize {
        match self {
            VarKind::Bit | VarKind::Qbit => 2,
            VarKind::Qunit(d) => d,
        }
    }

    pub fn is_quantum(self) -> bool {
        !matches!(self, VarKind::Bit)
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Bit => f.write_str("bit"),
            VarKind::Qbit => f.write_str("qbit"),
            VarKind::Qunit(d) => write!(f, "qunit[{d}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, kind: VarKind) -> Self {
        VarDecl {
            name: name.into(),
            kind,
        }
    }
}

/// Ordered typing context. The first variable is the leftmost tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarContext {
    vars: Vec<VarDecl>,
}

impl VarContext {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a context, returning the first repeated name on failure.
    pub fn new(vars: Vec<VarDecl>) -> Result<Self, String> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(v.name.clone());
            }
        }
        Ok(VarContext { vars })
    }

    /// Convenience constructor for all-qubit contexts.
    pub fn qubits(names: &[&str]) -> Self {
        VarContext::new(names.iter().map(|n| VarDecl::new(*n, VarKind::Qbit)).collect())
            .expect("distinct qubit names")
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&VarDecl> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn kind(&self, name: &str) -> Option<VarKind> {
        self.get(name).map(|v| v.kind)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.vars.iter().map(|v| v.kind.dim()).collect()
    }

    /// Product of the per-variable dimensions (1 for the empty context).
    pub fn total_dim(&self) -> usize {
        self.vars.iter().map(|v| v.kind.dim()).product()
    }

    /// Positions of `names` in this context, in the order given.
    pub fn positions<'a>(&self, names: impl IntoIterator<Item = &'a Var>) -> Option<Vec<usize>> {
        names.into_iter().map(|v| self.position(&v.name)).collect()
    }

    pub fn prepend(&self, decl: VarDecl) -> Self {
        let mut vars = Vec::with_capacity(self.vars.len() + 1);
        vars.push(decl);
        vars.extend(self.vars.iter().cloned());
        VarContext { vars }
    }

    pub fn without(&self, name: &str) -> Self {
        VarContext {
            vars: self.vars.iter().filter(|v| v.name != name).cloned().collect(),
        }
    }
}

impl fmt::Display for VarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", v.name, v.kind)?;
        }
        f.write_str("]")
    }
}

/// Abstract syntax shared by both dialects.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Skip,
    Seq(Box<Command>, Box<Command>),
    /// `q := 0`
    InitZero(Var),
    /// `q1, q2 *= U`
    ApplyU { vars: Vec<Var>, gate: String },
    /// `measure M(q…) { case 0: … case 1: … }`
    MeasureCase {
        meas: String,
        vars: Vec<Var>,
        branches: Vec<Command>,
    },
    /// `while M(q…) = 1 do … od`; outcome 0 exits, outcome 1 runs the body.
    While {
        meas: String,
        vars: Vec<Var>,
        body: Box<Command>,
    },
    NewBit(Var),
    NewQbit(Var),
    Discard(Var),
    /// `b := 1` (and `b := 0`, which the parser reads as `InitZero`).
    AssignBit(Var, bool),
    /// `if b then … else … fi`; the then-branch runs on `b = 1`.
    IfBit {
        guard: Var,
        then_branch: Box<Command>,
        else_branch: Box<Command>,
    },
    /// `measure q then … else … fi`; the then-branch runs on outcome 1.
    MeasureIf {
        guard: Var,
        then_branch: Box<Command>,
        else_branch: Box<Command>,
    },
}

impl Command {
    /// Right-leaning sequence of `cmds`; `Skip` for an empty list.
    pub fn seq(cmds: impl IntoIterator<Item = Command>) -> Command {
        let mut items: Vec<Command> = cmds.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Command::Skip;
        };
        while let Some(prev) = items.pop() {
            acc = Command::Seq(Box::new(prev), Box::new(acc));
        }
        acc
    }

    pub fn apply(vars: &[&str], gate: &str) -> Command {
        Command::ApplyU {
            vars: vars.iter().map(|v| Var::new(*v)).collect(),
            gate: gate.to_string(),
        }
    }

    pub fn init(var: &str) -> Command {
        Command::InitZero(Var::new(var))
    }

    /// Flattens nested `Seq` nodes into statement order.
    pub fn spine(&self) -> Vec<&Command> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Command, out: &mut Vec<&'a Command>) {
            match c {
                Command::Seq(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Normal form used for structural comparison: right-leaning `Seq`
    /// spines and `AssignBit(b, false)` written as `InitZero(b)`.
    pub fn canonical(&self) -> Command {
        match self {
            Command::Seq(..) => Command::seq(self.spine().into_iter().map(|c| c.canonical())),
            Command::AssignBit(b, false) => Command::InitZero(b.clone()),
            Command::MeasureCase { meas, vars, branches } => Command::MeasureCase {
                meas: meas.clone(),
                vars: vars.clone(),
                branches: branches.iter().map(Command::canonical).collect(),
            },
            Command::While { meas, vars, body } => Command::While {
                meas: meas.clone(),
                vars: vars.clone(),
                body: Box::new(body.canonical()),
            },
            Command::IfBit {
                guard,
                then_branch,
                else_branch,
            } => Command::IfBit {
                guard: guard.clone(),
                then_branch: Box::new(then_branch.canonical()),
                else_branch: Box::new(else_branch.canonical()),
            },
            Command::MeasureIf {
                guard,
                then_branch,
                else_branch,
            } => Command::MeasureIf {
                guard: guard.clone(),
                then_branch: Box::new(then_branch.canonical()),
                else_branch: Box::new(else_branch.canonical()),
            },
            other => other.clone(),
        }
    }

    pub fn contains_loop(&self) -> bool {
        match self {
            Command::While { .. } => true,
            Command::Seq(a, b) => a.contains_loop() || b.contains_loop(),
            Command::MeasureCase { branches, .. } => branches.iter().any(Command::contains_loop),
            Command::IfBit {
                then_branch,
                else_branch,
                ..
            }
            | Command::MeasureIf {
                then_branch,
                else_branch,
                ..
            } => then_branch.contains_loop() || else_branch.contains_loop(),
            _ => false,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Command::Seq(a, b) => a.size() + b.size(),
            Command::MeasureCase { branches, .. } => branches.iter().map(Command::size).sum(),
            Command::While { body, .. } => body.size(),
            Command::IfBit {
                then_branch,
                else_branch,
                ..
            }
            | Command::MeasureIf {
                then_branch,
                else_branch,
                ..
            } => then_branch.size() + else_branch.size(),
            _ => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Skip => "skip",
            Command::Seq(..) => "sequence",
            Command::InitZero(_) => "initialization",
            Command::ApplyU { .. } => "unitary",
            Command::MeasureCase { .. } => "measure-case",
            Command::While { .. } => "while",
            Command::NewBit(_) => "new bit",
            Command::NewQbit(_) => "new qbit",
            Command::Discard(_) => "discard",
            Command::AssignBit(..) => "bit assignment",
            Command::IfBit { .. } => "if",
            Command::MeasureIf { .. } => "measure-if",
        }
    }
}
