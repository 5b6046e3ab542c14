//! Lexer and recursive-descent parser for the program text format.
//!
//! ```text
//! program := ['var' decl (',' decl)* ';'] stmt
//! decl    := ident ':' ('bit' | 'qbit' | 'qunit' ['[' int ']'])
//! stmt    := 'skip' | ident ':=' ('0'|'1') | identlist '*=' gatename
//!          | stmt ';' stmt | 'new' ('bit'|'qbit') ident | 'discard' ident
//!          | 'if' ident 'then' stmt 'else' stmt 'fi'
//!          | 'measure' ident 'then' stmt 'else' stmt 'fi'
//!          | 'measure' measname '(' identlist ')' '{' ('case' int ':' stmt)+ '}'
//!          | 'while' measname '(' identlist ')' '=' '1' 'do' stmt 'od'
//! ```
//!
//! `#` starts a line comment.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::ast::{Command, Pos, Var, VarContext, VarDecl, VarKind, DEFAULT_QUNIT_DIM};

const KEYWORDS: &[&str] = &[
    "var", "bit", "qbit", "qunit", "skip", "new", "discard", "if", "then", "else", "fi", "measure",
    "while", "do", "od", "case",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("integer literal `{0}` out of range")]
    BadInteger(String),
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("variable `{0}` declared twice")]
    DuplicateDeclaration(String),
    #[error("undeclared variable `{0}`")]
    Undeclared(String),
    #[error("measurement cases must be numbered 0, 1, …; found case {found} where {expected} was expected")]
    CaseOrder { expected: usize, found: usize },
    #[error("qunit dimension must be at least 2, got {0}")]
    BadDimension(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let ch = chars.next();
            if ch == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            ch
        };
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
        } else if c.is_whitespace() {
            bump(&mut chars);
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    bump(&mut chars);
                } else {
                    break;
                }
            }
            out.push((Tok::Int(s), pos));
        } else {
            bump(&mut chars);
            let sym = match c {
                ':' if chars.peek() == Some(&'=') => {
                    bump(&mut chars);
                    ":="
                }
                '*' if chars.peek() == Some(&'=') => {
                    bump(&mut chars);
                    "*="
                }
                ':' => ":",
                ';' => ";",
                ',' => ",",
                '(' => "(",
                ')' => ")",
                '{' => "{",
                '}' => "}",
                '[' => "[",
                ']' => "]",
                '=' => "=",
                other => {
                    return Err(ParseError {
                        kind: ParseErrorKind::Lexical(other),
                        pos,
                    })
                }
            };
            out.push((Tok::Sym(sym), pos));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    // every name introduced so far in program text order
    declared: HashSet<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError {
            kind: ParseErrorKind::Syntax {
                expected: expected.to_string(),
                found: self.peek().to_string(),
            },
            pos: self.pos(),
        })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.advance();
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn expect_sym(&mut self, sym: &str) -> PResult<()> {
        if self.is_sym(sym) {
            self.advance();
            Ok(())
        } else {
            self.error(&format!("`{sym}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let (_, pos) = self.advance();
                Ok((s, pos))
            }
            _ => self.error(what),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let pos = self.pos();
                self.advance();
                s.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::BadInteger(s),
                    pos,
                })
            }
            _ => self.error("integer"),
        }
    }

    fn var_ref(&mut self) -> PResult<Var> {
        let (name, pos) = self.ident("variable name")?;
        if !self.declared.contains(&name) {
            return Err(ParseError {
                kind: ParseErrorKind::Undeclared(name),
                pos,
            });
        }
        Ok(Var::at(name, pos))
    }

    fn var_list(&mut self) -> PResult<Vec<Var>> {
        let mut vars = vec![self.var_ref()?];
        while self.is_sym(",") {
            self.advance();
            vars.push(self.var_ref()?);
        }
        Ok(vars)
    }

    fn program(&mut self) -> PResult<(VarContext, Command)> {
        let mut decls: Vec<VarDecl> = Vec::new();
        if self.is_kw("var") {
            self.advance();
            loop {
                let (name, pos) = self.ident("variable name")?;
                self.expect_sym(":")?;
                let kind = self.kind()?;
                if decls.iter().any(|d| d.name == name) {
                    return Err(ParseError {
                        kind: ParseErrorKind::DuplicateDeclaration(name),
                        pos,
                    });
                }
                self.declared.insert(name.clone());
                decls.push(VarDecl::new(name, kind));
                if self.is_sym(",") {
                    self.advance();
                } else {
                    break;
                }
            }
            self.expect_sym(";")?;
        }
        let body = self.sequence()?;
        if *self.peek() != Tok::Eof {
            return self.error("`;` or end of input");
        }
        let ctx = VarContext::new(decls).expect("duplicates rejected above");
        Ok((ctx, body))
    }

    fn kind(&mut self) -> PResult<VarKind> {
        if self.is_kw("bit") {
            self.advance();
            Ok(VarKind::Bit)
        } else if self.is_kw("qbit") {
            self.advance();
            Ok(VarKind::Qbit)
        } else if self.is_kw("qunit") {
            self.advance();
            if self.is_sym("[") {
                self.advance();
                let pos = self.pos();
                let d = self.int()?;
                if d < 2 {
                    return Err(ParseError {
                        kind: ParseErrorKind::BadDimension(d),
                        pos,
                    });
                }
                self.expect_sym("]")?;
                Ok(VarKind::Qunit(d))
            } else {
                Ok(VarKind::Qunit(DEFAULT_QUNIT_DIM))
            }
        } else {
            self.error("`bit`, `qbit` or `qunit`")
        }
    }

    fn at_sequence_end(&self) -> bool {
        matches!(self.peek(), Tok::Eof | Tok::Sym("}"))
            || ["else", "fi", "od", "case"].iter().any(|k| self.is_kw(k))
    }

    fn sequence(&mut self) -> PResult<Command> {
        let mut stmts = vec![self.statement()?];
        while self.is_sym(";") {
            self.advance();
            if self.at_sequence_end() {
                break;
            }
            stmts.push(self.statement()?);
        }
        Ok(Command::seq(stmts))
    }

    fn statement(&mut self) -> PResult<Command> {
        let Tok::Ident(word) = self.peek().clone() else {
            return self.error("statement");
        };
        match word.as_str() {
            "skip" => {
                self.advance();
                Ok(Command::Skip)
            }
            "new" => {
                self.advance();
                let is_bit = if self.is_kw("bit") {
                    true
                } else if self.is_kw("qbit") {
                    false
                } else {
                    return self.error("`bit` or `qbit`");
                };
                self.advance();
                let (name, pos) = self.ident("variable name")?;
                self.declared.insert(name.clone());
                let v = Var::at(name, pos);
                Ok(if is_bit {
                    Command::NewBit(v)
                } else {
                    Command::NewQbit(v)
                })
            }
            "discard" => {
                self.advance();
                Ok(Command::Discard(self.var_ref()?))
            }
            "if" => {
                self.advance();
                let guard = self.var_ref()?;
                let (then_branch, else_branch) = self.then_else()?;
                Ok(Command::IfBit {
                    guard,
                    then_branch,
                    else_branch,
                })
            }
            "measure" => {
                self.advance();
                if matches!(self.peek_at(1), Tok::Sym("(")) {
                    self.measure_case()
                } else {
                    let guard = self.var_ref()?;
                    let (then_branch, else_branch) = self.then_else()?;
                    Ok(Command::MeasureIf {
                        guard,
                        then_branch,
                        else_branch,
                    })
                }
            }
            "while" => {
                self.advance();
                let (meas, _) = self.ident("measurement name")?;
                self.expect_sym("(")?;
                let vars = self.var_list()?;
                self.expect_sym(")")?;
                self.expect_sym("=")?;
                match self.peek() {
                    Tok::Int(s) if s == "1" => {
                        self.advance();
                    }
                    _ => return self.error("`1`"),
                }
                self.expect_kw("do")?;
                let body = self.sequence()?;
                self.expect_kw("od")?;
                Ok(Command::While {
                    meas,
                    vars,
                    body: Box::new(body),
                })
            }
            _ if KEYWORDS.contains(&word.as_str()) => self.error("statement"),
            _ => {
                if matches!(self.peek_at(1), Tok::Sym(":=")) {
                    let v = self.var_ref()?;
                    self.advance();
                    match self.peek().clone() {
                        Tok::Int(s) if s == "0" => {
                            self.advance();
                            Ok(Command::InitZero(v))
                        }
                        Tok::Int(s) if s == "1" => {
                            self.advance();
                            Ok(Command::AssignBit(v, true))
                        }
                        _ => self.error("`0` or `1`"),
                    }
                } else {
                    let vars = self.var_list()?;
                    self.expect_sym("*=")?;
                    let (gate, _) = self.ident("gate name")?;
                    Ok(Command::ApplyU { vars, gate })
                }
            }
        }
    }

    fn then_else(&mut self) -> PResult<(Box<Command>, Box<Command>)> {
        self.expect_kw("then")?;
        let t = self.sequence()?;
        self.expect_kw("else")?;
        let e = self.sequence()?;
        self.expect_kw("fi")?;
        Ok((Box::new(t), Box::new(e)))
    }

    fn measure_case(&mut self) -> PResult<Command> {
        let (meas, _) = self.ident("measurement name")?;
        self.expect_sym("(")?;
        let vars = self.var_list()?;
        self.expect_sym(")")?;
        self.expect_sym("{")?;
        let mut branches = Vec::new();
        while self.is_kw("case") {
            self.advance();
            let pos = self.pos();
            let k = self.int()?;
            if k != branches.len() {
                return Err(ParseError {
                    kind: ParseErrorKind::CaseOrder {
                        expected: branches.len(),
                        found: k,
                    },
                    pos,
                });
            }
            self.expect_sym(":")?;
            branches.push(self.sequence()?);
        }
        if branches.is_empty() {
            return self.error("`case`");
        }
        self.expect_sym("}")?;
        Ok(Command::MeasureCase {
            meas,
            vars,
            branches,
        })
    }
}

/// Parses a whole program: declarations plus body.
pub fn parse(text: &str) -> Result<(VarContext, Command), ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        declared: HashSet::new(),
    };
    p.program()
}

/// Parses a statement sequence against an existing context.
pub fn parse_command(ctx: &VarContext, text: &str) -> Result<Command, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        declared: ctx.vars().iter().map(|v| v.name.clone()).collect(),
    };
    let c = p.sequence()?;
    if *p.peek() != Tok::Eof {
        return p.error("`;` or end of input");
    }
    Ok(c)
}
