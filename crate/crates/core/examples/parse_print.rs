//! Parse a program, typecheck it in both dialects, and print it back.
//!
//! `cargo run --example parse_print [file]`

use qhl::lang::{parse, print, typecheck, Dialect, Tables};

const DEFAULT: &str = "var q: qbit, r: qbit;
q := 0; r := 0;
q *= H;
q, r *= CNOT;
measure std(r) { case 0: skip case 1: r *= X }";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let (ctx, c) = parse(&text)?;
    let tables = Tables::builtin();
    for dialect in [Dialect::YingCore, Dialect::Qpl] {
        match typecheck(&ctx, &c, dialect, &tables) {
            Ok(t) => println!("{dialect}: ok, output context {}", t.output),
            Err(errs) => {
                println!("{dialect}: {} error(s)", errs.len());
                for e in errs {
                    println!("  {e}");
                }
            }
        }
    }
    let printed = print(&ctx, &c);
    println!("\n{printed}");
    let (ctx2, c2) = parse(&printed)?;
    assert_eq!(ctx, ctx2);
    assert_eq!(c.canonical(), c2.canonical());
    println!("round trip: identical ({} AST nodes)", c.size());
    Ok(())
}
