//! Weakest and weakest liberal preconditions, and the duality with eval.

use qhl::cli::render_matrix;
use qhl::hoare::{wlp, wp, HoareOptions};
use qhl::lang::{parse, Tables};
use qhl::linalg::{random_density, CMatrix, QuantumPredicate};
use qhl::semantics::{eval, EvalOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = Tables::builtin();
    let hopts = HoareOptions::default();

    let (ctx, c) = parse("var q: qbit, r: qbit; q *= H; q, r *= CNOT")?;
    let post = QuantumPredicate::new(CMatrix::basis_projector(4, 3))?;
    let pre = wp(&ctx, &c, &post, &tables, &hopts)?;
    println!("wp(bell, |11><11|):\n{}", render_matrix(pre.pred.mat(), 2));

    // tr(wp(c, Q) ρ) = tr(Q eval(c, ρ)) for every ρ.
    let rho = random_density(4, 7)?;
    let lhs = pre.pred.expectation(&rho);
    let out = eval(&ctx, &c, &rho, &tables, &EvalOptions::default())?;
    let rhs = post.expectation(&out.state);
    println!("duality on a random state: {lhs:.12} vs {rhs:.12}\n");

    // On a divergent loop wp and wlp differ by the non-termination mass.
    let (ctx, c) = parse("var q: qbit; while std(q) = 1 do skip od")?;
    let zero = QuantumPredicate::zero(2);
    let total = wp(&ctx, &c, &zero, &tables, &hopts)?;
    let partial = wlp(&ctx, &c, &zero, &tables, &hopts)?;
    println!("wp(diverge, 0):\n{}", render_matrix(total.pred.mat(), 2));
    println!("wlp(diverge, 0):\n{}", render_matrix(partial.pred.mat(), 2));
    println!("fixpoint iterations: {} / {}", total.iterations, partial.iterations);
    Ok(())
}
