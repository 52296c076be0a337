//! Two-tape (and k-tape) disjunctions: projections, mind changes, consistency, `tie` trees
//! and their hearts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trees::{Alphabet, ClosedClass};
use crate::word::{Sym, Word};

/// One entry `(i, n)`: symbol `n` written on tape `i`.
pub type Entry = (usize, Sym);
pub type TapeWord = Vec<Entry>;

/// Codes `(i, n)` as `n·k + i`.
pub fn code(k: usize, sigma: &[Entry]) -> Word {
    sigma.iter().map(|&(i, n)| n * k as u64 + i as u64).collect()
}

pub fn decode(k: usize, w: &[Sym]) -> TapeWord {
    let k = k.max(1) as u64;
    w.iter().map(|&s| ((s % k) as usize, s / k)).collect()
}

pub fn proj(i: usize, sigma: &[Entry]) -> Word {
    sigma.iter().filter(|e| e.0 == i).map(|e| e.1).collect()
}

pub fn mind_changes(sigma: &[Entry]) -> usize {
    sigma.windows(2).filter(|w| w[0].0 != w[1].0).count()
}

pub fn write(i: usize, sigma: &[Sym]) -> TapeWord {
    sigma.iter().map(|&n| (i, n)).collect()
}

/// `σ ∈ Con`: every projection of every prefix of `σ` stays in its tree.
pub fn con(ts: &[ClosedClass], sigma: &[Entry]) -> bool {
    if sigma.iter().any(|e| e.0 >= ts.len()) {
        return false;
    }
    ts.iter().enumerate().all(|(i, t)| {
        let p = proj(i, sigma);
        (0..=p.len()).all(|n| t.contains(&p[..n]))
    })
}

/// Interpretation of the disjunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TieMode {
    /// Fewer than `n` mind changes.
    Finite(usize),
    /// Finitely many mind changes; no constraint at tree level.
    Omega,
    /// Consistency only.
    Infinity,
}

impl TieMode {
    pub fn bound(&self) -> Option<usize> {
        match self {
            TieMode::Finite(n) => Some(*n),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            TieMode::Finite(n) => n.to_string(),
            TieMode::Omega => "omega".into(),
            TieMode::Infinity => "inf".into(),
        }
    }
}

fn tape_bound(ps: &[ClosedClass]) -> impl Fn(usize) -> u64 + Send + Sync + 'static {
    let ps = ps.to_vec();
    move |d| {
        let widest = ps
            .iter()
            .map(|p| (0..=d).map(|j| p.branching(j)).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        widest * ps.len() as u64
    }
}

/// The tree `Con ∩ {mc(σ) < n}` (or `Con` alone) over tape words coded for `ps.len()` tapes.
pub fn tie(mode: TieMode, ps: &[ClosedClass]) -> Result<ClosedClass> {
    if ps.is_empty() {
        return Err(Error::Shape("tie needs at least one class".into()));
    }
    let k = ps.len();
    let names: Vec<&str> = ps.iter().map(|p| p.label()).collect();
    let label = format!("tie {} ({})", mode.name(), names.join(", "));
    let members = ps.to_vec();
    let limit = mode.bound();
    Ok(ClosedClass::new(label, Alphabet::Tapes(k), tape_bound(ps), move |w| {
        let sigma = decode(k, w);
        limit.map_or(true, |n| sigma.is_empty() || mind_changes(&sigma) < n) && con(&members, &sigma)
    }))
}

/// `T♥` at depth `d`: members of `tie_tree` whose projections are all extendible in their
/// factor trees to length `max(d, |pr_i σ|)`.
pub fn heart_of(tie_tree: &ClosedClass, ps: &[ClosedClass], d: usize) -> ClosedClass {
    let k = ps.len();
    let t = tie_tree.clone();
    let tb = tie_tree.clone();
    let members = ps.to_vec();
    ClosedClass::new(
        format!("heart {d} ({})", tie_tree.label()),
        Alphabet::Tapes(k),
        move |x| tb.branching(x),
        move |w| {
            t.contains(w) && {
                let sigma = decode(k, w);
                members.iter().enumerate().all(|(i, p)| p.extendible(&proj(i, &sigma), d))
            }
        },
    )
}

pub fn heart(mode: TieMode, ps: &[ClosedClass], d: usize) -> Result<ClosedClass> {
    Ok(heart_of(&tie(mode, ps)?, ps, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_and_mind_changes() {
        let s = vec![(0, 5), (1, 3), (0, 7)];
        assert_eq!(proj(0, &s), vec![5, 7]);
        assert_eq!(mind_changes(&[(0, 1), (0, 0), (1, 1)]), 1);
        assert_eq!(mind_changes(&[]), 0);
        assert_eq!(write(1, &[4]), vec![(1, 4)]);
    }

    #[test]
    fn coding_round_trips() {
        let s = vec![(0, 5), (2, 3), (1, 0)];
        assert_eq!(decode(3, &code(3, &s)), s);
    }
}
