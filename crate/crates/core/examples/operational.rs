//! Small-step execution: print every transition, then compare the sum of
//! terminal states with the denotational result.

use qhl::lang::{parse, print_command, Tables};
use qhl::linalg::DensityMatrix;
use qhl::semantics::{eval, run_operational, step_with_rule, Config, EvalOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = Tables::builtin();
    let (ctx, c) = parse("var q: qbit; while std(q) = 1 do q := 0 od")?;
    let rho = DensityMatrix::basis(2, 1);

    let mut frontier = vec![(0, Config::new(ctx.clone(), c.clone(), rho.clone()))];
    while let Some((depth, cfg)) = frontier.pop() {
        if cfg.state.trace() < 1e-12 {
            continue;
        }
        if cfg.is_done() {
            println!("{:indent$}terminated, trace {:.3}", "", cfg.state.trace(), indent = 2 * depth);
            continue;
        }
        for (rule, next) in step_with_rule(&cfg, &tables)? {
            println!(
                "{:indent$}{rule:?}: {}",
                "",
                print_command(&next.residual).split_whitespace().collect::<Vec<_>>().join(" "),
                indent = 2 * depth
            );
            frontier.push((depth + 1, next));
        }
    }

    let run = run_operational(&ctx, &c, &rho, &tables, 3)?;
    println!(
        "\ndepth 3: terminated mass {:.3}, unexplored {:.3}",
        run.terminated_mass(),
        run.unexplored_mass
    );
    let total = run.total().expect("something terminated");
    let den = eval(&ctx, &c, &rho, &tables, &EvalOptions::default())?;
    println!("operational vs eval: max difference {:.1e}", total.max_diff(den.state.mat()));
    Ok(())
}
