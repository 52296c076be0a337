//! Π⁰₁ classes observed through decidable, downward-closed trees.

mod dnr;
mod ops;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{llex, Sym, Word};

pub use dnr::{dnr, BudgetSchedule, DnrSpec};
pub use ops::{
    coproduct, empty, full, homogeneous, pattern, product, restrict, singleton, union, Pattern,
};

/// Default bound on the number of nodes a frontier may hold at one depth.
pub const DEFAULT_CAP: usize = 1 << 20;

/// What the symbols of a class's words stand for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Alphabet {
    /// Plain naturals.
    Plain,
    /// Tape-tagged symbols `(i, n)` for `k` tapes, coded as `n·k + i`.
    Tapes(usize),
}

type MemberFn = Arc<dyn Fn(&[Sym]) -> bool + Send + Sync>;
type BoundFn = Arc<dyn Fn(usize) -> u64 + Send + Sync>;

/// A decidable tree `T` with a per-depth branching bound; stands for `[T]`.
#[derive(Clone)]
pub struct ClosedClass {
    member: MemberFn,
    bound: BoundFn,
    label: Arc<str>,
    alphabet: Alphabet,
}

impl fmt::Debug for ClosedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosedClass({})", self.label)
    }
}

impl ClosedClass {
    /// `member` need not check the branching bound; [`ClosedClass::contains`] does.
    pub fn new(
        label: impl Into<String>,
        alphabet: Alphabet,
        bound: impl Fn(usize) -> u64 + Send + Sync + 'static,
        member: impl Fn(&[Sym]) -> bool + Send + Sync + 'static,
    ) -> ClosedClass {
        ClosedClass {
            member: Arc::new(member),
            bound: Arc::new(bound),
            label: Arc::from(label.into()),
            alphabet,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn relabel(mut self, label: impl Into<String>) -> ClosedClass {
        self.label = Arc::from(label.into());
        self
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> ClosedClass {
        self.alphabet = alphabet;
        self
    }

    /// `b(d)`: symbols at position `d` lie below this bound.
    pub fn branching(&self, depth: usize) -> u64 {
        (self.bound)(depth)
    }

    pub fn contains(&self, w: &[Sym]) -> bool {
        w.iter().enumerate().all(|(i, &s)| s < (self.bound)(i)) && (self.member)(w)
    }

    /// Immediate extensions of `w` that are members.
    pub fn children(&self, w: &[Sym]) -> Vec<Word> {
        let b = self.branching(w.len());
        let mut out = Vec::new();
        let mut x = w.to_vec();
        x.push(0);
        for k in 0..b {
            *x.last_mut().unwrap() = k;
            if (self.member)(&x) {
                out.push(x.clone());
            }
        }
        out
    }

    pub fn has_child(&self, w: &[Sym]) -> bool {
        let b = self.branching(w.len());
        let mut x = w.to_vec();
        x.push(0);
        (0..b).any(|k| {
            *x.last_mut().unwrap() = k;
            (self.member)(&x)
        })
    }

    /// A member with no member immediate extension.
    pub fn is_leaf(&self, w: &[Sym]) -> bool {
        self.contains(w) && !self.has_child(w)
    }

    /// Some member of length `max(d, |σ|)` extends `σ`. Unbounded depth-first search.
    pub fn extendible(&self, sigma: &[Sym], d: usize) -> bool {
        if !self.contains(sigma) {
            return false;
        }
        let mut w = sigma.to_vec();
        self.dfs_extend(&mut w, d)
    }

    fn dfs_extend(&self, w: &mut Word, d: usize) -> bool {
        if w.len() >= d {
            return true;
        }
        let b = self.branching(w.len());
        for k in 0..b {
            w.push(k);
            if (self.member)(w) && self.dfs_extend(w, d) {
                w.pop();
                return true;
            }
            w.pop();
        }
        false
    }
}

/// The members of length `d` and the leaves of length `< d`, both in length-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Frontier {
    pub depth: usize,
    pub members: Vec<Word>,
    pub leaves: Vec<Word>,
}

/// Breadth-first enumeration of `T_P` to depth `d`.
pub fn frontier(p: &ClosedClass, d: usize) -> Result<Frontier> {
    frontier_capped(p, d, DEFAULT_CAP)
}

pub fn frontier_capped(p: &ClosedClass, d: usize, cap: usize) -> Result<Frontier> {
    let mut leaves = Vec::new();
    let mut level: Vec<Word> = if p.contains(&[]) { vec![Vec::new()] } else { Vec::new() };
    for depth in 0..d {
        let mut next = Vec::new();
        for w in &level {
            let kids = p.children(w);
            if kids.is_empty() {
                leaves.push(w.clone());
            }
            next.extend(kids);
            if next.len() > cap {
                return Err(Error::Resource(format!(
                    "frontier of {} exceeds {cap} nodes at depth {}",
                    p.label(),
                    depth + 1
                )));
            }
        }
        level = next;
    }
    level.sort_by(|a, b| llex(a, b));
    leaves.sort_by(|a, b| llex(a, b));
    Ok(Frontier { depth: d, members: level, leaves })
}

/// Every member of length at most `d`, in length-lex order.
pub fn members_upto(p: &ClosedClass, d: usize, cap: usize) -> Result<Vec<Word>> {
    let mut all = Vec::new();
    let mut level: Vec<Word> = if p.contains(&[]) { vec![Vec::new()] } else { Vec::new() };
    for depth in 0..=d {
        all.extend(level.iter().cloned());
        if all.len() > cap {
            return Err(Error::Resource(format!("{} exceeds {cap} members", p.label())));
        }
        if depth == d {
            break;
        }
        level = level.iter().flat_map(|w| p.children(w)).collect();
    }
    all.sort_by(|a, b| llex(a, b));
    Ok(all)
}

/// `true` iff some member of length `d` extends `σ`; requires `|σ| ≤ d`.
pub fn ext_approx(p: &ClosedClass, sigma: &[Sym], d: usize) -> Result<bool> {
    if sigma.len() > d {
        return Err(Error::Shape(format!("|σ| = {} exceeds depth {d}", sigma.len())));
    }
    let mut visited = 0usize;
    let mut stack = if p.contains(sigma) { vec![sigma.to_vec()] } else { Vec::new() };
    while let Some(w) = stack.pop() {
        if w.len() == d {
            return Ok(true);
        }
        visited += 1;
        if visited > DEFAULT_CAP {
            return Err(Error::Resource(format!("extension search in {} exceeds {DEFAULT_CAP} nodes", p.label())));
        }
        let mut kids = p.children(&w);
        kids.reverse();
        stack.extend(kids);
    }
    Ok(false)
}
