//! Decide Hoare triples and show the counterexample state for an invalid one.

use qhl::cli::render_matrix;
use qhl::hoare::{check_triple, HoareOptions, HoareTriple, Mode, Verdict};
use qhl::lang::{parse, Tables};
use qhl::linalg::{CMatrix, QuantumPredicate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = Tables::builtin();
    let opts = HoareOptions::default();
    let (ctx, prog) = parse("var q: qbit; q *= X")?;
    let p0 = QuantumPredicate::new(CMatrix::basis_projector(2, 0))?;
    let p1 = QuantumPredicate::new(CMatrix::basis_projector(2, 1))?;

    let cases = [
        ("{|1><1|} X {|0><0|}", p1.clone(), p0.clone(), Mode::Total),
        ("{I} X {|0><0|}", QuantumPredicate::identity(2), p0.clone(), Mode::Total),
    ];
    for (name, pre, post, mode) in cases {
        let t = HoareTriple {
            ctx: ctx.clone(),
            prog: prog.clone(),
            pre,
            post,
            mode,
        };
        let r = check_triple(&t, &tables, &opts)?;
        println!("{name}: {}", r.verdict.label());
        if let Verdict::Invalid { witness, violation } = &r.verdict {
            println!("  violated by {violation:.3} on\n{}", render_matrix(witness.mat(), 4));
        }
    }

    // Partial correctness accepts anything after a loop that never exits.
    let (ctx, prog) = parse("var q: qbit; q := 0; q *= X; while std(q) = 1 do skip od")?;
    for mode in [Mode::Partial, Mode::Total] {
        let t = HoareTriple {
            ctx: ctx.clone(),
            prog: prog.clone(),
            pre: QuantumPredicate::identity(2),
            post: QuantumPredicate::zero(2),
            mode,
        };
        println!("{{I}} diverge {{0}} in {mode:?} mode: {}", check_triple(&t, &tables, &opts)?.verdict.label());
    }
    Ok(())
}
