//! Seeded random programs for property tests and benchmark corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{Command, Var, VarContext, VarDecl, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    /// Number of qubits in the context (1 to 3 keeps matrices at most 8×8).
    pub qubits: usize,
    /// Maximum nesting depth of the AST, counting a flat block as depth 1.
    pub max_depth: usize,
    /// Maximum statements per block.
    pub max_block: usize,
    /// Upper bound on AST nodes; larger draws are retried.
    pub max_nodes: usize,
    /// Emit `while` loops (guarded by a single-qubit measurement).
    pub loops: bool,
    /// Emit the QPL-only constructs and bit/qunit variables. Such programs
    /// parse and print but are not meant for evaluation.
    pub qpl: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            qubits: 3,
            max_depth: 5,
            max_block: 3,
            max_nodes: 60,
            loops: false,
            qpl: false,
        }
    }
}

/// A program from a seed; the same seed always yields the same program.
pub fn random_program(seed: u64, opts: &GenOptions) -> (VarContext, Command) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    program_from_rng(&mut rng, opts)
}

/// `n` programs from consecutive draws of one generator.
pub fn corpus(seed: u64, n: usize, opts: &GenOptions) -> Vec<(VarContext, Command)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| program_from_rng(&mut rng, opts)).collect()
}

pub fn program_from_rng<R: Rng>(rng: &mut R, opts: &GenOptions) -> (VarContext, Command) {
    assert!(opts.qubits >= 1 && opts.max_depth >= 1 && opts.max_block >= 1);
    let mut vars: Vec<VarDecl> = (0..opts.qubits)
        .map(|i| VarDecl::new(format!("q{i}"), VarKind::Qbit))
        .collect();
    if opts.qpl {
        vars.push(VarDecl::new("b", VarKind::Bit));
        vars.push(VarDecl::new("n", VarKind::Qunit(3)));
    }
    let ctx = VarContext::new(vars).expect("distinct names");
    loop {
        let mut g = Gen {
            rng: &mut *rng,
            opts,
            qubits: (0..opts.qubits).map(|i| format!("q{i}")).collect(),
            fresh: 0,
        };
        let c = g.block(opts.max_depth);
        if c.size() <= opts.max_nodes {
            return (ctx, c);
        }
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    opts: &'a GenOptions,
    qubits: Vec<String>,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn block(&mut self, depth: usize) -> Command {
        let n = self.rng.gen_range(1..=self.opts.max_block);
        Command::seq((0..n).map(|_| self.stmt(depth)))
    }

    fn pick_qubits(&mut self, k: usize) -> Vec<Var> {
        self.qubits
            .choose_multiple(self.rng, k)
            .map(|s| Var::new(s.as_str()))
            .collect()
    }

    fn gate_application(&mut self) -> Command {
        let max = self.qubits.len();
        let arities: Vec<usize> = [1, 1, 1, 2, 2, 3].into_iter().filter(|&a| a <= max).collect();
        let arity = *arities.choose(self.rng).expect("arity 1 always fits");
        let gate = match arity {
            1 => *["H", "X", "Y", "Z", "S"].choose(self.rng).expect("nonempty"),
            2 => *["CNOT", "H2"].choose(self.rng).expect("nonempty"),
            _ => "H3",
        };
        Command::ApplyU {
            vars: self.pick_qubits(arity),
            gate: gate.to_string(),
        }
    }

    fn stmt(&mut self, depth: usize) -> Command {
        let compound = depth > 1 && self.rng.gen_bool(0.35);
        if !compound {
            return self.simple();
        }
        let sub = depth - 1;
        let mut choices = vec![0, 0];
        if self.opts.loops {
            choices.push(1);
        }
        if self.opts.qpl {
            choices.extend([2, 3]);
        }
        match *choices.choose(self.rng).expect("nonempty") {
            0 => {
                let arity = if self.qubits.len() >= 2 && self.rng.gen_bool(0.3) { 2 } else { 1 };
                let vars = self.pick_qubits(arity);
                let branches = (0..1usize << arity).map(|_| self.block(sub)).collect();
                Command::MeasureCase {
                    meas: "std".into(),
                    vars,
                    branches,
                }
            }
            1 => Command::While {
                meas: "std".into(),
                vars: self.pick_qubits(1),
                body: Box::new(self.block(sub)),
            },
            2 => Command::IfBit {
                guard: Var::new("b"),
                then_branch: Box::new(self.block(sub)),
                else_branch: Box::new(self.block(sub)),
            },
            _ => Command::MeasureIf {
                guard: self.pick_qubits(1).remove(0),
                then_branch: Box::new(self.block(sub)),
                else_branch: Box::new(self.block(sub)),
            },
        }
    }

    fn simple(&mut self) -> Command {
        let roll = self.rng.gen_range(0..10);
        if self.opts.qpl && roll >= 7 {
            return match roll {
                7 => Command::AssignBit(Var::new("b"), self.rng.gen_bool(0.5)),
                8 => Command::InitZero(Var::new("n")),
                _ => {
                    self.fresh += 1;
                    let name = format!("t{}", self.fresh);
                    let alloc = if self.rng.gen_bool(0.5) {
                        Command::NewQbit(Var::new(name.as_str()))
                    } else {
                        Command::NewBit(Var::new(name.as_str()))
                    };
                    Command::seq([alloc, Command::Discard(Var::new(name))])
                }
            };
        }
        match roll {
            0 => Command::Skip,
            1 | 2 => Command::InitZero(self.pick_qubits(1).remove(0)),
            _ => self.gate_application(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{typecheck, Dialect, Tables};

    fn depth(c: &Command) -> usize {
        c.spine()
            .into_iter()
            .map(|s| {
                1 + match s {
                    Command::MeasureCase { branches, .. } => branches.iter().map(depth).max().unwrap_or(0),
                    Command::While { body, .. } => depth(body),
                    Command::IfBit {
                        then_branch,
                        else_branch,
                        ..
                    }
                    | Command::MeasureIf {
                        then_branch,
                        else_branch,
                        ..
                    } => depth(then_branch).max(depth(else_branch)),
                    _ => 0,
                }
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn deterministic_and_bounded() {
        let o = GenOptions::default();
        assert_eq!(random_program(4, &o), random_program(4, &o));
        for (ctx, c) in corpus(1, 200, &o) {
            assert!(depth(&c) <= 5);
            assert!(c.size() <= o.max_nodes);
            assert!(!c.contains_loop());
            typecheck(&ctx, &c, Dialect::YingCore, &Tables::builtin()).unwrap();
        }
    }

    #[test]
    fn qpl_programs_typecheck() {
        let o = GenOptions {
            qpl: true,
            loops: true,
            ..GenOptions::default()
        };
        for (ctx, c) in corpus(2, 100, &o) {
            typecheck(&ctx, &c, Dialect::Qpl, &Tables::builtin()).unwrap();
        }
    }
}
