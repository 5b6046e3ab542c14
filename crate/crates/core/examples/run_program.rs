//! Evaluate programs on density matrices, including a probabilistic loop.

use qhl::cli::render_matrix;
use qhl::lang::{parse, Tables};
use qhl::linalg::DensityMatrix;
use qhl::semantics::{denote, eval, termination_probability, EvalOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = Tables::builtin();
    let opts = EvalOptions::default();

    // Bell pair, then measure the second qubit and correct.
    let (ctx, c) = parse(
        "var q: qbit, r: qbit;
         q *= H; q, r *= CNOT;
         measure std(r) { case 0: skip case 1: r *= X }",
    )?;
    let rho = DensityMatrix::basis(ctx.total_dim(), 0);
    let out = eval(&ctx, &c, &rho, &tables, &opts)?;
    println!("bell + measure, {} paths:\n{}", out.paths, render_matrix(out.state.mat(), 2));

    // The same program as one Kraus map agrees with path propagation.
    let map = denote(&ctx, &c, &tables, &opts)?;
    let diff = map.apply_mat(rho.mat()).max_diff(out.state.mat());
    println!("denotation vs eval: max difference {diff:.1e} ({} Kraus operators)\n", map.len());

    // Repeat-until-success coin: terminates with probability 1.
    let (ctx, c) = parse("var q: qbit; q *= H; while std(q) = 1 do q *= H od")?;
    let rho = DensityMatrix::basis(2, 0);
    let t = termination_probability(&ctx, &c, &rho, &tables, &opts)?;
    println!(
        "coin loop: termination probability {:.10} (truncation bound {:.1e})",
        t.probability, t.truncation_error
    );

    // A loop that never exits on |1⟩.
    let (ctx, c) = parse("var q: qbit; while std(q) = 1 do skip od")?;
    let t = termination_probability(&ctx, &c, &DensityMatrix::basis(2, 1), &tables, &opts)?;
    println!("divergent loop from |1>: termination probability {}", t.probability);
    Ok(())
}
