//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use qhl::casestudy::{all_promise_oracles, dj_postcondition, dj_program, dj_verify, BooleanOracle, OracleClass};
use qhl::gen::{corpus, random_program, GenOptions};
use qhl::hoare::{check_triple, wlp, wp, HoareOptions, HoareTriple, Mode};
use qhl::lang::{parse, print, typecheck, Command, Dialect, Tables, Var, VarContext};
use qhl::linalg::{
    allocate_front, eigh, loewner_leq, random_density, random_predicate, random_unitary, spectral_map, CMatrix,
    DensityMatrix, KrausMap, QuantumPredicate, C64,
};
use qhl::semantics::{eval, run_operational, termination_probability, EvalOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(format!("{detail} in {took:.2?}"))
}

fn dj_classification() -> Outcome {
    timed(Duration::from_secs(1), || {
        let oracles = all_promise_oracles(2).map_err(err)?;
        ensure(oracles.len() == 8, || format!("{} oracles", oracles.len()))?;
        for f in &oracles {
            let r = dj_verify(f).map_err(err)?;
            let want = if f.class() == OracleClass::Constant { 1.0 } else { 0.0 };
            ensure((r.p00 - want).abs() <= 1e-9, || format!("{}: p00 = {}", f.spec(), r.p00))?;
            ensure(r.classification == f.class(), || format!("{}: misclassified", f.spec()))?;
        }
        Ok("8 oracles classified".into())
    })
}

fn dj_proof() -> Outcome {
    timed(Duration::from_secs(1), || {
        let f = BooleanOracle::constant(2, true).map_err(err)?;
        let dj = dj_program(&f, Dialect::YingCore).map_err(err)?;
        let t = QuantumPredicate::new(dj_postcondition(2)).map_err(err)?;
        let opts = HoareOptions::default();
        let pre = wp(&dj.ctx, &dj.command, &t, &dj.tables, &opts).map_err(err)?;
        let dev = pre.pred.mat().max_diff(&CMatrix::identity(8));
        ensure(dev <= 1e-9, || format!("wp deviates from I8 by {dev:e}"))?;
        let triple = HoareTriple {
            ctx: dj.ctx.clone(),
            prog: dj.command.clone(),
            pre: QuantumPredicate::identity(8),
            post: t,
            mode: Mode::Total,
        };
        let r = check_triple(&triple, &dj.tables, &opts).map_err(err)?;
        ensure(r.verdict.is_valid(), || format!("verdict {}", r.verdict.label()))?;
        Ok(format!("wp = I8 within {dev:.1e}, triple valid"))
    })
}

fn measurement_superoperator() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let meas = KrausMap::new(vec![CMatrix::basis_projector(2, 0), CMatrix::basis_projector(2, 1)]).map_err(err)?;
    let (ctx, prog) = parse("var q: qbit; measure std(q) { case 0: skip case 1: skip }").map_err(err)?;
    let tables = Tables::builtin();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        let rho = CMatrix::from_rows(&[&[a * a.conj(), a * b.conj()], &[b * a.conj(), b * b.conj()]]);
        let want = CMatrix::real_diag(&[a.norm_sqr(), b.norm_sqr()]);
        worst = worst.max(meas.apply_mat(&rho).max_diff(&want));
        let state = DensityMatrix::new(rho).map_err(err)?;
        let out = eval(&ctx, &prog, &state, &tables, &EvalOptions::default()).map_err(err)?;
        worst = worst.max(out.state.mat().max_diff(&want));
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 states, max deviation {worst:.1e}"))
}

fn allocation() -> Outcome {
    let e = KrausMap::single(allocate_front(2, 2));
    let (ctx, prog) = parse("var q: qbit; new qbit p").map_err(err)?;
    let tables = Tables::builtin();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let rho = random_density(2, seed).map_err(err)?;
        let mut want = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                want[(i, j)] = rho.mat()[(i, j)];
            }
        }
        worst = worst.max(e.apply_mat(rho.mat()).max_diff(&want));
        let out = eval(&ctx, &prog, &rho, &tables, &EvalOptions::default()).map_err(err)?;
        worst = worst.max(out.state.mat().max_diff(&want));
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("100 states, max deviation {worst:.1e}"))
}

fn loop_free_corpus() -> Vec<(VarContext, Command)> {
    (0..200u64)
        .map(|i| {
            let opts = GenOptions {
                qubits: 1 + (i % 3) as usize,
                max_depth: 5,
                ..GenOptions::default()
            };
            random_program(10_000 + i, &opts)
        })
        .collect()
}

fn divergent_loop(ctx: &VarContext) -> Command {
    Command::While {
        meas: "std".into(),
        vars: vec![Var::new(ctx.vars()[0].name.clone())],
        body: Box::new(Command::Skip),
    }
}

fn wp_duality() -> Outcome {
    timed(Duration::from_secs(30), || {
        let tables = Tables::builtin();
        let (hopts, eopts) = (HoareOptions::default(), EvalOptions::default());
        let mut worst = 0.0f64;
        for (i, (ctx, c)) in loop_free_corpus().into_iter().enumerate() {
            let d = ctx.total_dim();
            let q = random_predicate(d, i as u64).map_err(err)?;
            let pre = wp(&ctx, &c, &q, &tables, &hopts).map_err(err)?;
            for j in 0..20 {
                let rho = random_density(d, (i * 100 + j) as u64).map_err(err)?;
                let out = eval(&ctx, &c, &rho, &tables, &eopts).map_err(err)?;
                worst = worst.max((pre.pred.expectation(&rho) - q.expectation(&out.state)).abs());
            }
        }
        ensure(worst <= 1e-9, || format!("max gap {worst:e}"))?;
        Ok(format!("200 programs x 20 states, max gap {worst:.1e}"))
    })
}

fn wlp_duality() -> Outcome {
    let tables = Tables::builtin();
    let (hopts, eopts) = (HoareOptions::default(), EvalOptions::default());
    let mut cases = Vec::new();
    for (ctx, c) in loop_free_corpus() {
        let lp = divergent_loop(&ctx);
        cases.push((ctx.clone(), lp.clone()));
        cases.push((ctx.clone(), Command::seq([c.clone(), lp])));
        cases.push((ctx, c));
    }
    let mut worst = 0.0f64;
    for (i, (ctx, c)) in cases.iter().enumerate() {
        let d = ctx.total_dim();
        let q = random_predicate(d, 7 + i as u64).map_err(err)?;
        let pre = wlp(ctx, c, &q, &tables, &hopts).map_err(err)?;
        for j in 0..5 {
            let rho = random_density(d, (i * 10 + j) as u64).map_err(err)?;
            let out = eval(ctx, c, &rho, &tables, &eopts).map_err(err)?;
            let gap = pre.pred.expectation(&rho) - q.expectation(&out.state) - rho.trace() + out.state.trace();
            worst = worst.max(gap.abs());
        }
    }
    ensure(worst <= 1e-9, || format!("max gap {worst:e}"))?;
    Ok(format!("{} programs x 5 states, max gap {worst:.1e}", cases.len()))
}

fn operational_agreement() -> Outcome {
    let tables = Tables::builtin();
    let mut worst = 0.0f64;
    for (i, (ctx, c)) in loop_free_corpus().into_iter().enumerate().take(100) {
        let rho = random_density(ctx.total_dim(), 500 + i as u64).map_err(err)?;
        let run = run_operational(&ctx, &c, &rho, &tables, 10_000).map_err(err)?;
        let out = eval(&ctx, &c, &rho, &tables, &EvalOptions::default()).map_err(err)?;
        let total = run
            .total()
            .unwrap_or_else(|| CMatrix::zeros(out.state.dim(), out.state.dim()));
        worst = worst.max(total.max_diff(out.state.mat()));
    }
    ensure(worst <= 1e-9, || format!("operational vs eval gap {worst:e}"))?;

    let (ctx, c) = parse("var q: qbit; while std(q) = 1 do q := 0 od").map_err(err)?;
    let rho = DensityMatrix::basis(2, 1);
    let run = run_operational(&ctx, &c, &rho, &tables, 3).map_err(err)?;
    ensure((run.terminated_mass() - 1.0).abs() <= 1e-9, || {
        format!("terminated mass at depth 3: {}", run.terminated_mass())
    })?;
    let short = run_operational(&ctx, &c, &rho, &tables, 2).map_err(err)?;
    ensure(short.terminated_mass() <= 1e-12, || "terminated before depth 3".into())?;
    let t = termination_probability(&ctx, &c, &rho, &tables, &EvalOptions::default()).map_err(err)?;
    ensure((t.probability - 1.0).abs() <= 1e-9, || format!("termination probability {}", t.probability))?;
    Ok(format!("100 programs, max gap {worst:.1e}; reset loop terminates at depth 3"))
}

fn psd_sqrt(m: &CMatrix) -> Result<CMatrix, String> {
    Ok(spectral_map(&eigh(m, 1e-12).map_err(err)?, |x| x.max(0.0).sqrt()))
}

fn loewner_laws() -> Outcome {
    const TOL: f64 = 1e-9;
    let tables = Tables::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut refl, mut anti, mut conj, mut mono) = (0, 0, 0, 0);
    for i in 0..100u64 {
        let d = [2, 4, 8][(i % 3) as usize];
        let p = random_predicate(d, 2 * i).map_err(err)?;
        let q = random_predicate(d, 2 * i + 1).map_err(err)?;
        ensure(loewner_leq(p.mat(), p.mat(), TOL).map_err(err)?, || "reflexivity".into())?;
        refl += 1;

        // A perturbation far below tolerance is order-equivalent; a random
        // distinct predicate never is.
        let tiny = q.mat().scale_real(TOL * 1e-3);
        let p2 = p.mat() + &tiny;
        ensure(
            loewner_leq(p.mat(), &p2, TOL).map_err(err)? && loewner_leq(&p2, p.mat(), TOL).map_err(err)?,
            || "near-equal pair not mutually ordered".into(),
        )?;
        let both = loewner_leq(p.mat(), q.mat(), TOL).map_err(err)? && loewner_leq(q.mat(), p.mat(), TOL).map_err(err)?;
        ensure(!both || p.mat().max_diff(q.mat()) <= 10.0 * TOL, || "antisymmetry".into())?;
        anti += 1;

        // A = √B·P·√B ⊑ B, then conjugate by a random unitary.
        let sb = psd_sqrt(q.mat())?;
        let a = sb.matmul(p.mat()).matmul(&sb);
        let u = random_unitary(d, 1000 + i).map_err(err)?;
        ensure(loewner_leq(&a, q.mat(), TOL).map_err(err)?, || "construction".into())?;
        ensure(loewner_leq(&u.sandwich(&a), &u.sandwich(q.mat()), TOL).map_err(err)?, || {
            "conjugation monotonicity".into()
        })?;
        conj += 1;

        let qubits = d.trailing_zeros() as usize;
        let gopts = GenOptions {
            qubits,
            loops: rng.gen_bool(0.3),
            ..GenOptions::default()
        };
        let (ctx, c) = random_program(20_000 + i, &gopts);
        let small = QuantumPredicate::new(a.hermitian_part()).map_err(err)?;
        let hopts = HoareOptions::default();
        let w1 = wp(&ctx, &c, &small, &tables, &hopts).map_err(err)?;
        let w2 = wp(&ctx, &c, &q, &tables, &hopts).map_err(err)?;
        ensure(loewner_leq(w1.pred.mat(), w2.pred.mat(), TOL).map_err(err)?, || {
            format!("wp monotonicity on\n{}", print(&ctx, &c))
        })?;
        mono += 1;
    }
    Ok(format!(
        "reflexivity {refl}, antisymmetry {anti}, conjugation {conj}, wp monotonicity {mono} instances"
    ))
}

fn parser_round_trip() -> Outcome {
    let tables = Tables::builtin();
    let mut n = 0;
    for (k, opts) in [
        GenOptions::default(),
        GenOptions {
            loops: true,
            ..GenOptions::default()
        },
        GenOptions {
            loops: true,
            qpl: true,
            ..GenOptions::default()
        },
    ]
    .iter()
    .enumerate()
    {
        let count = if k == 2 { 200 } else { 150 };
        for (ctx, c) in corpus(30_000 + k as u64, count, opts) {
            typecheck(&ctx, &c, Dialect::Qpl, &tables).map_err(|e| format!("generated program ill-typed: {e:?}"))?;
            let text = print(&ctx, &c);
            let (ctx2, c2) = parse(&text).map_err(|e| format!("{e}\n{text}"))?;
            ensure(ctx == ctx2 && c.canonical() == c2.canonical(), || format!("round trip differs:\n{text}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} programs"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Deutsch-Jozsa classification, k = 2", dj_classification),
        ("wp of Deutsch-Jozsa is the identity", dj_proof),
        ("measurement superoperator", measurement_superoperator),
        ("allocation embedding", allocation),
        ("wp/eval duality", wp_duality),
        ("wlp duality with divergence", wlp_duality),
        ("operational/denotational agreement", operational_agreement),
        ("Loewner order laws", loewner_laws),
        ("parser round trip", parser_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
