use std::collections::BTreeSet;

use super::{BinOp, Expr, HEART_DEPTH};
use crate::disjunction::TieMode;
use crate::error::{Error, Result};
use crate::word::{Sym, Word};

/// Words that start an operator or atom; a fixture with one of these names is written
/// `fixture name`.
pub const KEYWORDS: [&str; 22] = [
    "dnr", "homog", "singleton", "full", "fixture", "oplus", "linf", "cup", "cap", "concat", "commconcat",
    "family", "meet", "deriv", "delayed", "btie", "hyper", "tie", "arrow", "sqcap", "heart", "omega",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, cl) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                col += 1;
            }
            let n = s.parse().map_err(|_| Error::Syntax {
                line: l,
                col: cl,
                msg: format!("number {s} does not fit in 64 bits"),
                expected: vec!["number".into()],
            })?;
            out.push(Token { tok: Tok::Num(n), line: l, col: cl });
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric() || matches!(d, '_' | '-' | '.')) {
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: l, col: cl });
        } else if "()[]{},~".contains(c) {
            chars.next();
            col += 1;
            out.push(Token { tok: Tok::Sym(c), line: l, col: cl });
        } else {
            return Err(Error::Syntax { line: l, col: cl, msg: format!("unexpected character `{c}`"), expected: expr_start() });
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

fn expr_start() -> Vec<String> {
    let mut v: Vec<String> = KEYWORDS.iter().filter(|k| **k != "omega").map(|k| k.to_string()).collect();
    v.push("fixture name".into());
    v.push("`(`".into());
    v
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: Vec<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax { line: t.line, col: t.col, msg: format!("unexpected {}", t.tok.describe()), expected })
    }

    fn sym(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(vec![format!("`{c}`")])
        }
    }

    fn at(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn num(&mut self) -> Result<u64> {
        match self.peek().tok {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.fail(vec!["number".into()]),
        }
    }

    fn size(&mut self) -> Result<usize> {
        let t = self.peek().clone();
        let n = self.num()?;
        usize::try_from(n).map_err(|_| Error::Syntax {
            line: t.line,
            col: t.col,
            msg: format!("{n} is too large"),
            expected: vec!["number".into()],
        })
    }

    /// `c₁ x (c₂ x)* c₃` or `c₁ c₃`.
    fn seq<T>(&mut self, open: char, close: char, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.sym(open)?;
        let mut out = Vec::new();
        if self.at(close) {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.at(',') {
                self.bump();
            } else if self.at(close) {
                self.bump();
                return Ok(out);
            } else {
                return self.fail(vec!["`,`".into(), format!("`{close}`")]);
            }
        }
    }

    fn word(&mut self) -> Result<Word> {
        self.seq('[', ']', |p| p.num())
    }

    fn set(&mut self) -> Result<BTreeSet<Sym>> {
        Ok(self.seq('{', '}', |p| p.num())?.into_iter().collect())
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        let es = self.seq('(', ')', |p| p.expr())?;
        if es.is_empty() {
            return self.fail(expr_start());
        }
        Ok(es)
    }

    fn one(&mut self) -> Result<Box<Expr>> {
        self.sym('(')?;
        let e = self.expr()?;
        self.sym(')')?;
        Ok(Box::new(e))
    }

    fn two(&mut self) -> Result<(Box<Expr>, Box<Expr>)> {
        self.sym('(')?;
        let a = self.expr()?;
        self.sym(',')?;
        let b = self.expr()?;
        self.sym(')')?;
        Ok((Box::new(a), Box::new(b)))
    }

    fn expr(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        let name = match &t.tok {
            Tok::Ident(s) => s.clone(),
            Tok::Sym('(') => return Ok(*self.one()?),
            _ => return self.fail(expr_start()),
        };
        self.bump();
        if let Some(op) = BinOp::ALL.iter().find(|o| o.keyword() == name) {
            let (a, b) = self.two()?;
            return Ok(Expr::Bin(*op, a, b));
        }
        Ok(match name.as_str() {
            "dnr" => {
                let k = self.num()?;
                let m = match self.peek().tok {
                    Tok::Num(_) => Some(self.num()?),
                    _ => None,
                };
                Expr::Dnr { k, m }
            }
            "homog" => Expr::Homog(self.seq('[', ']', |p| p.set())?),
            "singleton" => {
                let prefix = self.word()?;
                let cycle = if self.at('~') {
                    self.bump();
                    self.word()?
                } else {
                    Vec::new()
                };
                Expr::Singleton { prefix, cycle }
            }
            "full" => Expr::Full(self.num()?),
            "fixture" => match self.peek().tok.clone() {
                Tok::Ident(s) => {
                    self.bump();
                    Expr::Fixture(s)
                }
                _ => return self.fail(vec!["fixture name".into()]),
            },
            "cap" => {
                let s = self.word()?;
                Expr::Cap(s, self.one()?)
            }
            "family" => {
                self.sym('(')?;
                let base = Box::new(self.expr()?);
                self.sym(',')?;
                let items = self.seq('[', ']', |p| p.expr())?;
                let rest = if self.at(',') {
                    self.bump();
                    Some(Box::new(self.expr()?))
                } else {
                    None
                };
                self.sym(')')?;
                Expr::Family { base, items, rest }
            }
            "meet" => Expr::Meet(self.args()?),
            "deriv" => {
                let n = self.size()?;
                Expr::Deriv(n, self.one()?)
            }
            "delayed" => {
                let t = self.word()?;
                Expr::Delayed(t, self.one()?)
            }
            "btie" => {
                let c = self.size()?;
                Expr::Btie(c, self.one()?)
            }
            "tie" => {
                let mode = match self.peek().tok.clone() {
                    Tok::Num(_) => TieMode::Finite(self.size()?),
                    Tok::Ident(s) if s == "omega" => {
                        self.bump();
                        TieMode::Omega
                    }
                    Tok::Ident(s) if s == "inf" => {
                        self.bump();
                        TieMode::Infinity
                    }
                    _ => return self.fail(vec!["number".into(), "`omega`".into(), "`inf`".into()]),
                };
                Expr::Tie(mode, self.args()?)
            }
            "heart" => {
                let d = match self.peek().tok {
                    Tok::Num(_) => self.size()?,
                    _ => HEART_DEPTH,
                };
                Expr::Heart(d, self.one()?)
            }
            "omega" => {
                return Err(Error::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: "`omega` only follows `tie`".into(),
                    expected: expr_start(),
                })
            }
            _ => Expr::Fixture(name),
        })
    }
}

/// Parses one expression; whitespace and newlines are insignificant.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.fail(vec!["end of input".into()]);
    }
    Ok(e)
}
