//! Probability assertions such as `Pr(q1=0 & q2=0) = 1 and Pr(q=1) <= 0.5`.

use std::fmt;

use crate::lang::VarContext;
use crate::linalg::DensityMatrix;

use super::HoareError;

#[derive(Debug, Clone, PartialEq)]
enum Atom {
    Const,
    Trace,
    /// Conjunction of `variable = value` tests.
    Pr(Vec<(String, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
struct Expr {
    terms: Vec<(f64, Atom)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    lhs: Expr,
    op: Op,
    rhs: Expr,
    text: String,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A conjunction of linear comparisons between outcome probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbAssertion {
    pub comparisons: Vec<Comparison>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssertionReport {
    pub holds: bool,
    /// `(comparison, lhs value, rhs value, holds)` for each conjunct.
    pub details: Vec<(String, f64, f64, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<Tok>, HoareError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_digit()
                    || chars[i] == '.'
                    || chars[i] == 'e'
                    || ((chars[i] == '-' || chars[i] == '+') && matches!(chars[i - 1], 'e')))
            {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| HoareError::Assertion(format!("bad number `{text}`")))?;
            out.push(Tok::Num(v));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym = match (two.as_str(), c) {
            ("<=", _) => Some(("<=", 2)),
            (">=", _) => Some((">=", 2)),
            ("==", _) => Some(("=", 2)),
            (_, '≤') => Some(("<=", 1)),
            (_, '≥') => Some((">=", 1)),
            (_, '∧') | (_, '&') => Some(("&", 1)),
            (_, '=') => Some(("=", 1)),
            (_, '(') => Some(("(", 1)),
            (_, ')') => Some((")", 1)),
            (_, '+') => Some(("+", 1)),
            (_, '-') => Some(("-", 1)),
            (_, '*') => Some(("*", 1)),
            (_, ',') => Some((",", 1)),
            (_, ';') => Some(("and", 1)),
            _ => None,
        };
        let Some((s, n)) = sym else {
            return Err(HoareError::Assertion(format!("unexpected character `{c}`")));
        };
        out.push(Tok::Sym(s));
        i += n;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(x)) if x == w) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), HoareError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(HoareError::Assertion(format!("expected `{s}`, found {:?}", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Expr, HoareError> {
        let mut terms = Vec::new();
        let mut sign = if self.eat_sym("-") { -1.0 } else { 1.0 };
        loop {
            let (coef, atom) = self.term()?;
            terms.push((sign * coef, atom));
            if self.eat_sym("+") {
                sign = 1.0;
            } else if self.eat_sym("-") {
                sign = -1.0;
            } else {
                return Ok(Expr { terms });
            }
        }
    }

    fn term(&mut self) -> Result<(f64, Atom), HoareError> {
        if let Some(Tok::Num(v)) = self.peek().cloned() {
            self.i += 1;
            if self.eat_sym("*") {
                return Ok((v, self.atom()?));
            }
            return Ok((v, Atom::Const));
        }
        Ok((1.0, self.atom()?))
    }

    fn atom(&mut self) -> Result<Atom, HoareError> {
        match self.bump() {
            Some(Tok::Ident(w)) if w == "tr" => Ok(Atom::Trace),
            Some(Tok::Ident(w)) if w == "Pr" => {
                self.expect_sym("(")?;
                let mut tests = Vec::new();
                loop {
                    let Some(Tok::Ident(name)) = self.bump() else {
                        return Err(HoareError::Assertion("expected a variable name".into()));
                    };
                    self.expect_sym("=")?;
                    let value = match self.bump() {
                        Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 => v as usize,
                        other => {
                            return Err(HoareError::Assertion(format!(
                                "expected a basis value for `{name}`, found {other:?}"
                            )))
                        }
                    };
                    tests.push((name, value));
                    if !(self.eat_sym("&") || self.eat_sym(",") || self.eat_word("and")) {
                        break;
                    }
                }
                self.expect_sym(")")?;
                Ok(Atom::Pr(tests))
            }
            other => Err(HoareError::Assertion(format!(
                "expected Pr(...), tr or a number, found {other:?}"
            ))),
        }
    }

    fn op(&mut self) -> Result<Op, HoareError> {
        match self.bump() {
            Some(Tok::Sym("=")) => Ok(Op::Eq),
            Some(Tok::Sym("<=")) => Ok(Op::Le),
            Some(Tok::Sym(">=")) => Ok(Op::Ge),
            other => Err(HoareError::Assertion(format!(
                "expected =, <= or >=, found {other:?}"
            ))),
        }
    }
}

impl ProbAssertion {
    pub fn parse(src: &str) -> Result<Self, HoareError> {
        let mut comparisons = Vec::new();
        for part in split_conjuncts(src) {
            let mut p = Parser {
                toks: lex(&part)?,
                i: 0,
            };
            let lhs = p.expr()?;
            let op = p.op()?;
            let rhs = p.expr()?;
            if p.i != p.toks.len() {
                return Err(HoareError::Assertion(format!(
                    "trailing input in `{}`",
                    part.trim()
                )));
            }
            comparisons.push(Comparison {
                lhs,
                op,
                rhs,
                text: part.trim().to_string(),
            });
        }
        if comparisons.is_empty() {
            return Err(HoareError::Assertion("empty assertion".into()));
        }
        Ok(ProbAssertion { comparisons })
    }
}

/// Splits on top-level `and`, `&&` and `;` (outside parentheses).
fn split_conjuncts(src: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut words = src.char_indices().peekable();
    while let Some((i, c)) = words.next() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 {
            let rest = &src[i..];
            let boundary = |s: &str| {
                rest.starts_with(s)
                    && src[..i].chars().last().is_none_or(|p| !p.is_alphanumeric())
                    && rest[s.len()..].chars().next().is_none_or(|n| !n.is_alphanumeric())
            };
            if boundary("and") || c == ';' || rest.starts_with("&&") {
                parts.push(std::mem::take(&mut cur));
                let skip = match c {
                    ';' => 0,
                    '&' => 1,
                    _ => 2,
                };
                for _ in 0..skip {
                    words.next();
                }
                continue;
            }
        }
        cur.push(c);
    }
    parts.push(cur);
    parts.into_iter().filter(|p| !p.trim().is_empty()).collect()
}

fn probability(tests: &[(String, usize)], ctx: &VarContext, rho: &DensityMatrix) -> Result<f64, HoareError> {
    let dims = ctx.dims();
    let mut checks = Vec::new();
    for (name, value) in tests {
        let p = ctx
            .position(name)
            .ok_or_else(|| HoareError::Assertion(format!("unknown variable `{name}`")))?;
        if *value >= dims[p] {
            return Err(HoareError::Assertion(format!(
                "value {value} out of range for `{name}` (dimension {})",
                dims[p]
            )));
        }
        checks.push((p, *value));
    }
    let m = rho.mat();
    let mut total = 0.0;
    let mut digits = vec![0usize; dims.len()];
    for i in 0..m.rows() {
        let mut r = i;
        for k in (0..dims.len()).rev() {
            digits[k] = r % dims[k];
            r /= dims[k];
        }
        if checks.iter().all(|&(p, v)| digits[p] == v) {
            total += m[(i, i)].re;
        }
    }
    Ok(total)
}

fn value(e: &Expr, ctx: &VarContext, rho: &DensityMatrix) -> Result<f64, HoareError> {
    let mut s = 0.0;
    for (coef, atom) in &e.terms {
        s += coef
            * match atom {
                Atom::Const => 1.0,
                Atom::Trace => rho.trace(),
                Atom::Pr(tests) => probability(tests, ctx, rho)?,
            };
    }
    Ok(s)
}

/// Evaluates every conjunct on `rho`, comparing at `tol`.
pub fn eval_assertion(
    a: &ProbAssertion,
    ctx: &VarContext,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<AssertionReport, HoareError> {
    if rho.dim() != ctx.total_dim() {
        return Err(HoareError::Dimension {
            what: "state",
            expected: ctx.total_dim(),
            found: rho.dim(),
        });
    }
    let mut details = Vec::new();
    for c in &a.comparisons {
        let l = value(&c.lhs, ctx, rho)?;
        let r = value(&c.rhs, ctx, rho)?;
        let ok = match c.op {
            Op::Eq => (l - r).abs() <= tol,
            Op::Le => l <= r + tol,
            Op::Ge => l + tol >= r,
        };
        details.push((c.text.clone(), l, r, ok));
    }
    Ok(AssertionReport {
        holds: details.iter().all(|d| d.3),
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, CMatrix};

    fn plus() -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap()
    }

    #[test]
    fn single_qubit_probability() {
        let a = ProbAssertion::parse("Pr(q=0) = 0.5").unwrap();
        let r = eval_assertion(&a, &VarContext::qubits(&["q"]), &plus(), 1e-12).unwrap();
        assert!(r.holds);
        assert!((r.details[0].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conjunctions_and_sums() {
        let ctx = VarContext::qubits(&["q1", "q2"]);
        let rho = DensityMatrix::basis(4, 2); // q1 = 1, q2 = 0
        let a = ProbAssertion::parse("Pr(q1=1 & q2=0) = 1 and Pr(q1=0) <= 0.1; 2*Pr(q2=0) >= 1.5").unwrap();
        assert_eq!(a.comparisons.len(), 3);
        assert!(eval_assertion(&a, &ctx, &rho, 1e-12).unwrap().holds);
        let b = ProbAssertion::parse("Pr(q1=0 ∧ q2=0) = 1").unwrap();
        assert!(!eval_assertion(&b, &ctx, &rho, 1e-12).unwrap().holds);
    }

    #[test]
    fn completeness_against_trace() {
        let ctx = VarContext::qubits(&["a", "q"]);
        let a = ProbAssertion::parse("Pr(q=0) + Pr(q=1) = tr").unwrap();
        for seed in 0..10 {
            let rho = random_density(4, seed).unwrap();
            assert!(eval_assertion(&a, &ctx, &rho, 1e-12).unwrap().holds);
        }
    }

    #[test]
    fn errors() {
        let ctx = VarContext::qubits(&["q"]);
        let a = ProbAssertion::parse("Pr(r=0) = 1").unwrap();
        assert!(eval_assertion(&a, &ctx, &plus(), 1e-9).is_err());
        let a = ProbAssertion::parse("Pr(q=2) = 1").unwrap();
        assert!(eval_assertion(&a, &ctx, &plus(), 1e-9).is_err());
        assert!(ProbAssertion::parse("Pr(q=0) < 1").is_err());
        assert!(ProbAssertion::parse("").is_err());
    }
}
