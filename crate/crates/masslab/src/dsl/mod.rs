//! Expression language for classes and operators. The grammar is in `docs/grammar.md`;
//! [`Expr`]'s `Display` is the canonical print and `parse(e.to_string()) == e`.

mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse, KEYWORDS};

use crate::concat::{
    arrow, btie, comm_concat, concat, concat_family, delayed_derivative, derivative, hyperconcat, recursive_meet,
    sqcap, LayeredClass,
};
use crate::disjunction::{heart, tie, TieMode};
use crate::error::{Error, Result};
use crate::fixtures::Registry;
use crate::trees::{coproduct, dnr, full, homogeneous, product, restrict, singleton, union, Alphabet, ClosedClass, DnrSpec};
use crate::word::{Sym, Word};

/// Depth at which `heart` approximates extendibility when the expression does not say.
pub const HEART_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinOp {
    Oplus,
    Linf,
    Cup,
    Concat,
    Commconcat,
    Hyper,
    Arrow,
    Sqcap,
}

impl BinOp {
    pub const ALL: [BinOp; 8] = [
        BinOp::Oplus,
        BinOp::Linf,
        BinOp::Cup,
        BinOp::Concat,
        BinOp::Commconcat,
        BinOp::Hyper,
        BinOp::Arrow,
        BinOp::Sqcap,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            BinOp::Oplus => "oplus",
            BinOp::Linf => "linf",
            BinOp::Cup => "cup",
            BinOp::Concat => "concat",
            BinOp::Commconcat => "commconcat",
            BinOp::Hyper => "hyper",
            BinOp::Arrow => "arrow",
            BinOp::Sqcap => "sqcap",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expr {
    Dnr { k: u64, m: Option<u64> },
    Homog(Vec<BTreeSet<Sym>>),
    Singleton { prefix: Word, cycle: Word },
    Full(u64),
    Fixture(String),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Cap(Word, Box<Expr>),
    Family { base: Box<Expr>, items: Vec<Expr>, rest: Option<Box<Expr>> },
    Meet(Vec<Expr>),
    Deriv(usize, Box<Expr>),
    Delayed(Word, Box<Expr>),
    Btie(usize, Box<Expr>),
    Tie(TieMode, Vec<Expr>),
    Heart(usize, Box<Expr>),
}

fn word(f: &mut fmt::Formatter<'_>, w: &[Sym]) -> fmt::Result {
    let parts: Vec<String> = w.iter().map(|s| s.to_string()).collect();
    write!(f, "[{}]", parts.join(", "))
}

fn list(f: &mut fmt::Formatter<'_>, es: &[Expr]) -> fmt::Result {
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Dnr { k, m: None } => write!(f, "dnr {k}"),
            Expr::Dnr { k, m: Some(m) } => write!(f, "dnr {k} {m}"),
            Expr::Homog(sets) => {
                let parts: Vec<String> = sets
                    .iter()
                    .map(|s| format!("{{{}}}", s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
                    .collect();
                write!(f, "homog [{}]", parts.join(", "))
            }
            Expr::Singleton { prefix, cycle } => {
                f.write_str("singleton ")?;
                word(f, prefix)?;
                if !cycle.is_empty() {
                    f.write_str(" ~ ")?;
                    word(f, cycle)?;
                }
                Ok(())
            }
            Expr::Full(b) => write!(f, "full {b}"),
            Expr::Fixture(name) if KEYWORDS.contains(&name.as_str()) => write!(f, "fixture {name}"),
            Expr::Fixture(name) => f.write_str(name),
            Expr::Bin(op, a, b) => write!(f, "{}({a}, {b})", op.keyword()),
            Expr::Cap(s, e) => {
                f.write_str("cap ")?;
                word(f, s)?;
                write!(f, " ({e})")
            }
            Expr::Family { base, items, rest } => {
                write!(f, "family({base}, [")?;
                list(f, items)?;
                f.write_str("]")?;
                if let Some(r) = rest {
                    write!(f, ", {r}")?;
                }
                f.write_str(")")
            }
            Expr::Meet(qs) => {
                f.write_str("meet(")?;
                list(f, qs)?;
                f.write_str(")")
            }
            Expr::Deriv(n, e) => write!(f, "deriv {n} ({e})"),
            Expr::Delayed(t, e) => {
                f.write_str("delayed ")?;
                word(f, t)?;
                write!(f, " ({e})")
            }
            Expr::Btie(c, e) => write!(f, "btie {c} ({e})"),
            Expr::Tie(mode, ps) => {
                write!(f, "tie {} (", mode.name())?;
                list(f, ps)?;
                f.write_str(")")
            }
            Expr::Heart(d, e) => write!(f, "heart {d} ({e})"),
        }
    }
}

/// What an expression denotes.
#[derive(Clone, Debug)]
pub enum Class {
    Closed(ClosedClass),
    Layered(LayeredClass),
}

impl Class {
    pub fn label(&self) -> &str {
        match self {
            Class::Closed(c) => c.label(),
            Class::Layered(l) => l.label(),
        }
    }

    /// The closed class, or for a layered class the union of its layers.
    pub fn flat(&self) -> ClosedClass {
        match self {
            Class::Closed(c) => c.clone(),
            Class::Layered(l) => l.union(),
        }
    }
}

fn closed(e: &Expr, reg: &Registry) -> Result<ClosedClass> {
    match elaborate(e, reg)? {
        Class::Closed(c) => Ok(c),
        Class::Layered(_) => Err(Error::Elaborate(format!("`{e}` is layered and cannot be an operand"))),
    }
}

fn plain(e: &Expr, reg: &Registry) -> Result<ClosedClass> {
    let c = closed(e, reg)?;
    match c.alphabet() {
        Alphabet::Plain => Ok(c),
        Alphabet::Tapes(k) => Err(Error::Elaborate(format!("tie over `{e}`, which is already coded for {k} tapes"))),
    }
}

fn all(es: &[Expr], reg: &Registry, f: fn(&Expr, &Registry) -> Result<ClosedClass>) -> Result<Vec<ClosedClass>> {
    es.iter().map(|e| f(e, reg)).collect()
}

/// Elaborates `e` against the registry's fixtures, machine and base. Every class is labelled
/// with the canonical print of its expression.
pub fn elaborate(e: &Expr, reg: &Registry) -> Result<Class> {
    let c = match e {
        Expr::Dnr { k, m } => {
            let m = m.unwrap_or(1);
            if *k == 0 || m == 0 {
                return Err(Error::Elaborate(format!("`{e}` needs k ≥ 1 and m ≥ 1")));
            }
            dnr(reg.machine(), &DnrSpec { m: m as usize, ..DnrSpec::new(*k) })
        }
        Expr::Homog(sets) => {
            if sets.is_empty() {
                return Err(Error::Elaborate("homog needs at least one factor".into()));
            }
            homogeneous(sets)
        }
        Expr::Singleton { prefix, cycle } => singleton(prefix, cycle),
        Expr::Full(b) => full(*b),
        Expr::Fixture(name) => reg.get(name)?,
        Expr::Bin(op, a, b) => {
            let (p, q) = (closed(a, reg)?, closed(b, reg)?);
            match op {
                BinOp::Oplus => product(&p, &q),
                BinOp::Linf => coproduct(&p, &q),
                BinOp::Cup => union(&p, &q),
                BinOp::Concat => concat(&p, &q),
                BinOp::Commconcat => comm_concat(&p, &q),
                BinOp::Hyper => hyperconcat(&p, &q),
                BinOp::Arrow => arrow(&p, &q),
                BinOp::Sqcap => sqcap(&p, &q),
            }
        }
        Expr::Cap(s, a) => restrict(&closed(a, reg)?, s),
        Expr::Family { base, items, rest } => {
            let rest = rest.as_deref().map(|r| closed(r, reg)).transpose()?;
            concat_family(&closed(base, reg)?, &all(items, reg, closed)?, rest.as_ref())?
        }
        Expr::Meet(qs) => {
            if qs.is_empty() {
                return Err(Error::Elaborate("meet needs at least one operand".into()));
            }
            recursive_meet(&reg.base(), &all(qs, reg, closed)?)?
        }
        Expr::Deriv(n, a) => derivative(&closed(a, reg)?, *n)?,
        Expr::Delayed(t, a) => delayed_derivative(&closed(a, reg)?, t),
        Expr::Btie(cap, a) => {
            let l = btie(&closed(a, reg)?, *cap)?;
            return Ok(Class::Layered(LayeredClass::new(e.to_string(), l.layers().to_vec())));
        }
        Expr::Tie(mode, ps) => tie(*mode, &all(ps, reg, plain)?)?,
        Expr::Heart(d, inner) => match inner.as_ref() {
            Expr::Tie(mode, ps) => heart(*mode, &all(ps, reg, plain)?, *d)?,
            other => return Err(Error::Elaborate(format!("heart applies to a tie, got `{other}`"))),
        },
    };
    Ok(Class::Closed(c.relabel(e.to_string())))
}

/// Parses and elaborates in one step.
pub fn build(text: &str, reg: &Registry) -> Result<Class> {
    elaborate(&parse(text)?, reg)
}
