//! Generate a proof outline for the Deutsch-Jozsa program, check it, then
//! break one annotation and check again.

use qhl::casestudy::{dj_postcondition, dj_program, BooleanOracle};
use qhl::hoare::{check_outline, synthesize_outline, HoareOptions, LoadedOutline, PredRef, ProofOutline, Step};
use qhl::lang::{print, Dialect};
use qhl::linalg::exchange::MatrixDoc;
use qhl::linalg::CMatrix;

fn report(title: &str, lo: &LoadedOutline, opts: &HoareOptions) -> Result<(), Box<dyn std::error::Error>> {
    let r = check_outline(lo, opts)?;
    println!("{title}: {}", if r.valid { "valid" } else { "invalid" });
    for s in &r.steps {
        println!("  {:<9} {:<6} {:<5} {}", s.path, s.rule, if s.valid { "ok" } else { "FAIL" }, s.detail);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = HoareOptions::default();
    let f = BooleanOracle::constant(2, true)?;
    let dj = dj_program(&f, Dialect::YingCore)?;
    let outline = synthesize_outline(
        &dj.ctx,
        &dj.command,
        &dj_postcondition(2),
        Some(&CMatrix::identity(8)),
        &dj.tables,
        &opts,
        None,
        None,
    )?;
    let mut outline = outline;
    outline.source = Some(print(&dj.ctx, &dj.command));
    let json = outline.to_json();
    println!("outline: {} steps, {} bytes of JSON", outline.steps.len(), json.len());

    let base = std::env::temp_dir();
    let with_tables = |o: ProofOutline| LoadedOutline::resolve_with(o, &base, dj.tables.clone(), 1e-9);
    report("synthesized", &with_tables(ProofOutline::from_json(&json)?)?, &opts)?;

    // Drop the explicit preconditions (each step inherits the previous
    // post), then claim the oracle step ends in the identity.
    let mut broken = ProofOutline::from_json(&json)?;
    for step in broken.steps.iter_mut() {
        if let Step::Cons { pre, .. } | Step::AsgnB { pre, .. } | Step::Unit { pre, .. } = step {
            *pre = None;
        }
    }
    if let Some(Step::Unit { post, .. }) = broken.steps.iter_mut().rev().nth(1) {
        *post = PredRef::Inline(MatrixDoc::from_matrix(&CMatrix::identity(8)));
    }
    report("tampered", &with_tables(broken)?, &opts)?;
    Ok(())
}
