use proptest::prelude::*;

use qhl::gen::{random_program, GenOptions};
use qhl::hoare::{check_triple, wlp, wp, HoareOptions, HoareTriple, Mode};
use qhl::lang::{parse, print, Tables};
use qhl::linalg::{is_psd, loewner_leq, random_density, random_predicate, CMatrix, DensityMatrix, QuantumPredicate};
use qhl::semantics::{denote, eval, EvalOptions};

fn program(seed: u64, qubits: usize, loops: bool) -> (qhl::lang::VarContext, qhl::lang::Command) {
    random_program(
        seed,
        &GenOptions {
            qubits,
            max_depth: 4,
            loops,
            ..GenOptions::default()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eval_is_linear(seed in any::<u64>(), qubits in 1usize..=3, t in 0.0f64..=1.0) {
        let (ctx, c) = program(seed, qubits, true);
        let d = ctx.total_dim();
        let a = random_density(d, seed ^ 1).unwrap();
        let b = random_density(d, seed ^ 2).unwrap();
        let mix = DensityMatrix::new(&a.mat().scale_real(t) + &b.mat().scale_real(1.0 - t)).unwrap();
        let tables = Tables::builtin();
        let opts = EvalOptions::default();
        let ea = eval(&ctx, &c, &a, &tables, &opts).unwrap();
        let eb = eval(&ctx, &c, &b, &tables, &opts).unwrap();
        let em = eval(&ctx, &c, &mix, &tables, &opts).unwrap();
        let want = &ea.state.mat().scale_real(t) + &eb.state.mat().scale_real(1.0 - t);
        let slack = 1e-9 + ea.truncation_error + eb.truncation_error + em.truncation_error;
        prop_assert!(em.state.mat().max_diff(&want) <= slack);
    }

    #[test]
    fn eval_output_is_a_partial_density(seed in any::<u64>(), qubits in 1usize..=3) {
        let (ctx, c) = program(seed, qubits, true);
        let rho = random_density(ctx.total_dim(), seed).unwrap();
        let out = eval(&ctx, &c, &rho, &Tables::builtin(), &EvalOptions::default()).unwrap();
        prop_assert!(is_psd(out.state.mat(), 1e-9).unwrap());
        prop_assert!(out.state.trace() <= rho.trace() + 1e-9);
    }

    #[test]
    fn denotation_matches_eval(seed in any::<u64>(), qubits in 1usize..=2) {
        let (ctx, c) = program(seed, qubits, false);
        let rho = random_density(ctx.total_dim(), seed).unwrap();
        let tables = Tables::builtin();
        let opts = EvalOptions::default();
        let map = denote(&ctx, &c, &tables, &opts).unwrap();
        let out = eval(&ctx, &c, &rho, &tables, &opts).unwrap();
        prop_assert!(map.apply_mat(rho.mat()).max_diff(out.state.mat()) <= 1e-9);
        prop_assert!(map.is_trace_nonincreasing(1e-9).unwrap());
    }

    #[test]
    fn wp_of_identity_is_identity_without_loops(seed in any::<u64>(), qubits in 1usize..=3) {
        let (ctx, c) = program(seed, qubits, false);
        let d = ctx.total_dim();
        let w = wp(&ctx, &c, &QuantumPredicate::identity(d), &Tables::builtin(), &HoareOptions::default()).unwrap();
        prop_assert!(w.pred.mat().max_diff(&CMatrix::identity(d)) <= 1e-9);
    }

    #[test]
    fn wlp_of_identity_is_identity(seed in any::<u64>(), qubits in 1usize..=2) {
        let (ctx, c) = program(seed, qubits, true);
        let d = ctx.total_dim();
        let w = wlp(&ctx, &c, &QuantumPredicate::identity(d), &Tables::builtin(), &HoareOptions::default()).unwrap();
        prop_assert!(w.pred.mat().max_diff(&CMatrix::identity(d)) <= 1e-8);
    }

    #[test]
    fn wp_below_wlp(seed in any::<u64>(), qubits in 1usize..=2) {
        let (ctx, c) = program(seed, qubits, true);
        let q = random_predicate(ctx.total_dim(), seed).unwrap();
        let tables = Tables::builtin();
        let opts = HoareOptions::default();
        let a = wp(&ctx, &c, &q, &tables, &opts).unwrap();
        let b = wlp(&ctx, &c, &q, &tables, &opts).unwrap();
        prop_assert!(loewner_leq(a.pred.mat(), b.pred.mat(), 1e-8).unwrap());
    }

    #[test]
    fn wp_is_monotone_under_scaling(seed in any::<u64>(), qubits in 1usize..=3, t in 0.0f64..=1.0) {
        let (ctx, c) = program(seed, qubits, true);
        let q = random_predicate(ctx.total_dim(), seed).unwrap();
        let smaller = QuantumPredicate::new(q.mat().scale_real(t)).unwrap();
        let tables = Tables::builtin();
        let opts = HoareOptions::default();
        let a = wp(&ctx, &c, &smaller, &tables, &opts).unwrap();
        let b = wp(&ctx, &c, &q, &tables, &opts).unwrap();
        prop_assert!(loewner_leq(a.pred.mat(), b.pred.mat(), 1e-8).unwrap());
    }

    #[test]
    fn weakest_precondition_makes_a_valid_triple(seed in any::<u64>(), qubits in 1usize..=2) {
        let (ctx, c) = program(seed, qubits, false);
        let q = random_predicate(ctx.total_dim(), seed).unwrap();
        let tables = Tables::builtin();
        let opts = HoareOptions::default();
        let pre = wp(&ctx, &c, &q, &tables, &opts).unwrap().pred;
        let t = HoareTriple { ctx, prog: c, pre, post: q, mode: Mode::Total };
        prop_assert!(check_triple(&t, &tables, &opts).unwrap().verdict.is_valid());
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), loops: bool, qpl: bool) {
        let opts = GenOptions { loops, qpl, ..GenOptions::default() };
        let (ctx, c) = random_program(seed, &opts);
        let (ctx2, c2) = parse(&print(&ctx, &c)).unwrap();
        prop_assert_eq!(ctx, ctx2);
        prop_assert_eq!(c.canonical(), c2.canonical());
    }
}
