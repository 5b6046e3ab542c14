//! Seeded random programs: print a few and check the wp/eval duality on them.

use qhl::gen::{corpus, GenOptions};
use qhl::hoare::{wp, HoareOptions};
use qhl::lang::{print, Tables};
use qhl::linalg::{random_density, random_predicate};
use qhl::semantics::{eval, EvalOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let opts = GenOptions {
        qubits: 2,
        max_depth: 3,
        ..GenOptions::default()
    };
    let tables = Tables::builtin();
    let mut worst = 0.0f64;
    for (i, (ctx, c)) in corpus(seed, 50, &opts).into_iter().enumerate() {
        if i < 3 {
            println!("program {i}:\n{}", print(&ctx, &c));
        }
        let d = ctx.total_dim();
        let q = random_predicate(d, seed + i as u64)?;
        let pre = wp(&ctx, &c, &q, &tables, &HoareOptions::default())?;
        for j in 0..5 {
            let rho = random_density(d, 1000 * seed + 10 * i as u64 + j)?;
            let out = eval(&ctx, &c, &rho, &tables, &EvalOptions::default())?;
            worst = worst.max((pre.pred.expectation(&rho) - q.expectation(&out.state)).abs());
        }
    }
    println!("50 programs x 5 states: worst |tr(wp rho) - tr(Q eval rho)| = {worst:.2e}");
    Ok(())
}
