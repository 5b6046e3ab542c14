//! Probability assertions over measurement outcomes of a final state.

use qhl::hoare::{eval_assertion, ProbAssertion};
use qhl::lang::{parse, Tables};
use qhl::linalg::DensityMatrix;
use qhl::semantics::{eval, EvalOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (ctx, c) = parse("var a: qbit, b: qbit, c: qbit; a *= H; a, b *= CNOT; b, c *= CNOT")?;
    let out = eval(&ctx, &c, &DensityMatrix::basis(8, 0), &Tables::builtin(), &EvalOptions::default())?;
    for src in [
        "Pr(a=0 & b=0 & c=0) = 0.5 and Pr(a=1 & c=1) = 0.5",
        "Pr(a=0 & c=1) <= 0",
        "Pr(a=0) + Pr(b=1) = 1; tr >= 0.99",
        "2*Pr(c=1) >= 1.5",
    ] {
        let a = ProbAssertion::parse(src)?;
        let r = eval_assertion(&a, &out.ctx, &out.state, 1e-9)?;
        println!("{} {src}", if r.holds { "holds:" } else { "fails:" });
        for (text, lhs, rhs, ok) in r.details {
            println!("    {text}  [{lhs:.4} vs {rhs:.4}] {}", if ok { "ok" } else { "violated" });
        }
    }
    Ok(())
}
