use std::path::Path;

use qhl::gen::{random_program, GenOptions};
use qhl::hoare::{
    check_outline, check_triple, synthesize_outline, wlp, HoareError, HoareOptions, HoareTriple, LoadedOutline, Mode,
    ProofOutline,
};
use qhl::lang::{print, Tables};
use qhl::linalg::{random_predicate, CMatrix, QuantumPredicate};

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn load_inline(o: ProofOutline) -> Result<LoadedOutline, HoareError> {
    LoadedOutline::resolve_with(o, Path::new("."), Tables::builtin(), 1e-9)
}

#[test]
fn shipped_outlines() {
    let opts = HoareOptions::default();
    let dj = LoadedOutline::load(data("dj_outline.json"), 1e-9).unwrap();
    assert!(check_outline(&dj, &opts).unwrap().valid);
    let coin = LoadedOutline::load(data("coin_outline.json"), 1e-9).unwrap();
    assert!(check_outline(&coin, &opts).unwrap().valid);
    let bad = LoadedOutline::load(data("flip_outline_bad.json"), 1e-9).unwrap();
    let r = check_outline(&bad, &opts).unwrap();
    assert!(!r.valid);
    assert!((r.steps[0].residual - 1.0).abs() < 1e-12);
}

#[test]
fn outline_json_round_trips() {
    let text = std::fs::read_to_string(data("coin_outline.json")).unwrap();
    let o = ProofOutline::from_json(&text).unwrap();
    let again = ProofOutline::from_json(&o.to_json()).unwrap();
    assert_eq!(again.to_json(), o.to_json());
}

// An outline that checks is a proof: the triple it concludes must be valid.
#[test]
fn synthesized_outlines_agree_with_triple_checking() {
    let tables = Tables::builtin();
    let opts = HoareOptions::default();
    for seed in 0..40u64 {
        let gopts = GenOptions {
            qubits: 1 + (seed % 2) as usize,
            max_depth: 3,
            loops: seed % 3 == 0,
            ..GenOptions::default()
        };
        let (ctx, c) = random_program(seed, &gopts);
        let d = ctx.total_dim();
        let post = random_predicate(d, seed).unwrap();
        // half the time ask for a precondition that is too strong to hold
        let weakest = wlp(&ctx, &c, &post, &tables, &opts).unwrap().pred;
        let pre = if seed % 2 == 0 {
            weakest.mat().scale_real(0.9)
        } else {
            let bump = &weakest.mat().scale_real(0.5) + &CMatrix::identity(d).scale_real(0.5);
            bump
        };
        let mut o = synthesize_outline(&ctx, &c, post.mat(), Some(&pre), &tables, &opts, None, None).unwrap();
        o.source = Some(print(&ctx, &c));
        let r = check_outline(&load_inline(o).unwrap(), &opts).unwrap();
        let triple = HoareTriple {
            ctx,
            prog: c,
            pre: QuantumPredicate::new(pre).unwrap(),
            post,
            mode: Mode::Partial,
        };
        let verdict = check_triple(&triple, &tables, &opts).unwrap().verdict;
        assert_eq!(r.valid, verdict.is_valid(), "seed {seed}");
        if r.valid {
            assert!(r.steps.iter().all(|s| s.valid));
        }
    }
}

#[test]
fn structural_errors_are_reported() {
    let opts = HoareOptions::default();
    let wrong_rule = r#"{"schema":"qhl-outline/1","source":"var q: qbit; q *= X","pre":"I","post":"I",
        "steps":[{"rule":"AsgnB","post":"I"}]}"#;
    let lo = load_inline(ProofOutline::from_json(wrong_rule).unwrap()).unwrap();
    assert!(matches!(check_outline(&lo, &opts), Err(HoareError::Outline { .. })));

    let missing = r#"{"schema":"qhl-outline/1","source":"var q: qbit; q *= X; q *= H","pre":"I","post":"I",
        "steps":[{"rule":"Unit","post":"I"}]}"#;
    let lo = load_inline(ProofOutline::from_json(missing).unwrap()).unwrap();
    assert!(matches!(check_outline(&lo, &opts), Err(HoareError::Outline { .. })));

    let gap = r#"{"schema":"qhl-outline/1","source":"var q: qbit; q *= X","pre":"I","post":"I",
        "steps":[{"rule":"Unit","pre":"0","post":"I"}]}"#;
    let lo = load_inline(ProofOutline::from_json(gap).unwrap()).unwrap();
    assert!(matches!(check_outline(&lo, &opts), Err(HoareError::NonChaining { .. })));

    assert!(ProofOutline::from_json(r#"{"schema":"other/2","source":"skip","pre":"I","post":"I","steps":[]}"#).is_err());
}
