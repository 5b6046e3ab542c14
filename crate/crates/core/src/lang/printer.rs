use std::fmt::Write;

use super::ast::{Command, Var, VarContext};

/// Renders a program in the concrete syntax accepted by [`super::parse`].
pub fn print(ctx: &VarContext, c: &Command) -> String {
    let mut out = String::new();
    if !ctx.is_empty() {
        out.push_str("var ");
        for (i, v) in ctx.vars().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{}: {}", v.name, v.kind);
        }
        out.push_str(";\n");
    }
    write_seq(&mut out, c, 0);
    out.push('\n');
    out
}

/// Renders a command on its own, without declarations.
pub fn print_command(c: &Command) -> String {
    let mut out = String::new();
    write_seq(&mut out, c, 0);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn var_list(vars: &[Var]) -> String {
    vars.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn write_seq(out: &mut String, c: &Command, depth: usize) {
    for (i, stmt) in c.spine().into_iter().enumerate() {
        if i > 0 {
            out.push_str(";\n");
        }
        indent(out, depth);
        write_stmt(out, stmt, depth);
    }
}

fn write_block(out: &mut String, c: &Command, depth: usize) {
    out.push('\n');
    write_seq(out, c, depth + 1);
    out.push('\n');
    indent(out, depth);
}

fn write_stmt(out: &mut String, c: &Command, depth: usize) {
    match c {
        Command::Skip => out.push_str("skip"),
        Command::Seq(..) => unreachable!("spine() flattens sequences"),
        Command::InitZero(v) => {
            let _ = write!(out, "{v} := 0");
        }
        Command::AssignBit(v, bit) => {
            let _ = write!(out, "{v} := {}", u8::from(*bit));
        }
        Command::ApplyU { vars, gate } => {
            let _ = write!(out, "{} *= {gate}", var_list(vars));
        }
        Command::NewBit(v) => {
            let _ = write!(out, "new bit {v}");
        }
        Command::NewQbit(v) => {
            let _ = write!(out, "new qbit {v}");
        }
        Command::Discard(v) => {
            let _ = write!(out, "discard {v}");
        }
        Command::IfBit {
            guard,
            then_branch,
            else_branch,
        }
        | Command::MeasureIf {
            guard,
            then_branch,
            else_branch,
        } => {
            let kw = if matches!(c, Command::IfBit { .. }) {
                "if"
            } else {
                "measure"
            };
            let _ = write!(out, "{kw} {guard} then");
            write_block(out, then_branch, depth);
            out.push_str("else");
            write_block(out, else_branch, depth);
            out.push_str("fi");
        }
        Command::MeasureCase {
            meas,
            vars,
            branches,
        } => {
            let _ = writeln!(out, "measure {meas}({}) {{", var_list(vars));
            for (k, b) in branches.iter().enumerate() {
                indent(out, depth + 1);
                let _ = write!(out, "case {k}:");
                out.push('\n');
                write_seq(out, b, depth + 2);
                out.push('\n');
            }
            indent(out, depth);
            out.push('}');
        }
        Command::While { meas, vars, body } => {
            let _ = write!(out, "while {meas}({}) = 1 do", var_list(vars));
            write_block(out, body, depth);
            out.push_str("od");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    #[test]
    fn skip_prints_as_skip() {
        assert_eq!(print_command(&Command::Skip), "skip");
    }

    #[test]
    fn nested_program_round_trips() {
        let src = "var q: qbit, r: qbit, n: qunit[3], b: bit;\n\
                   q := 0; q, r *= CNOT;\n\
                   while std(q) = 1 do measure std(r) { case 0: skip case 1: r *= X; q := 0 } od;\n\
                   if b then b := 1 else skip fi; measure q then skip else new bit c; discard c fi";
        let (ctx, c) = parse(src).unwrap();
        let text = print(&ctx, &c);
        let (ctx2, c2) = parse(&text).unwrap();
        assert_eq!(ctx, ctx2);
        assert_eq!(c.canonical(), c2.canonical());
    }
}
