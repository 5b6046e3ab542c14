//! Deutsch-Jozsa for every constant and balanced oracle on k input qubits.
//!
//! `cargo run --example deutsch_jozsa [k]`

use qhl::casestudy::{all_promise_oracles, dj_postcondition, dj_program, dj_verify, BooleanOracle};
use qhl::hoare::{wp, HoareOptions};
use qhl::lang::{print, Dialect};
use qhl::linalg::{CMatrix, QuantumPredicate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2);
    let oracles = all_promise_oracles(k)?;
    println!("{} oracles on {k} qubits", oracles.len());
    for f in &oracles {
        let r = dj_verify(f)?;
        println!("  {:<24} p(0..0) = {:.9}  -> {}", f.spec(), r.p00, r.classification);
    }

    let f = BooleanOracle::constant(k, true)?;
    let dj = dj_program(&f, Dialect::Qpl)?;
    println!("\nallocating form:\n{}", print(&dj.ctx, &dj.command));

    // For f = 1 the whole input space reaches the all-zero outcome.
    let core = dj_program(&f, Dialect::YingCore)?;
    let post = QuantumPredicate::new(dj_postcondition(k))?;
    let pre = wp(&core.ctx, &core.command, &post, &core.tables, &HoareOptions::default())?;
    let dim = core.ctx.total_dim();
    println!("wp(program, T) = I_{dim}: max deviation {:.1e}", pre.pred.mat().max_diff(&CMatrix::identity(dim)));
    Ok(())
}
