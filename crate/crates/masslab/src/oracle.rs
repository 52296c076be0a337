//! Reference implementations by exhaustive enumeration.
//!
//! Every operator here works on explicit finite sets of words (a tree truncated at a depth)
//! and follows the defining union formula directly. None of it calls the operator code in
//! `trees`, `disjunction` or `concat`; only base-class membership is shared.

use std::collections::BTreeSet;

use crate::kernel::{Machine, Nat, Outcome};
use crate::pairing::untuple;
use crate::trees::{BudgetSchedule, ClosedClass, Frontier};
use crate::word::{llex, Sym, Word};

/// The members of a tree of length at most `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trunc {
    pub depth: usize,
    pub words: BTreeSet<Word>,
}

impl Trunc {
    pub fn contains(&self, w: &[Sym]) -> bool {
        self.words.contains(w)
    }

    fn at(&self, len: usize) -> impl Iterator<Item = &Word> {
        self.words.iter().filter(move |w| w.len() == len)
    }

    /// Members of length `< depth` without a member one symbol longer.
    pub fn leaves(&self) -> Vec<Word> {
        let mut out: Vec<Word> = self
            .words
            .iter()
            .filter(|w| w.len() < self.depth)
            .filter(|w| !self.words.iter().any(|x| x.len() == w.len() + 1 && x.starts_with(w)))
            .cloned()
            .collect();
        out.sort_by(|a, b| llex(a, b));
        out
    }

    pub fn frontier(&self) -> Frontier {
        let mut members: Vec<Word> = self.at(self.depth).cloned().collect();
        members.sort_by(|a, b| llex(a, b));
        Frontier { depth: self.depth, members, leaves: self.leaves() }
    }

    /// Largest symbol in use, plus one.
    pub fn width(&self) -> Sym {
        self.words.iter().flat_map(|w| w.iter().copied()).max().map_or(0, |m| m + 1)
    }

    fn from_iter(depth: usize, it: impl IntoIterator<Item = Word>) -> Trunc {
        Trunc { depth, words: it.into_iter().filter(|w| w.len() <= depth).collect() }
    }

    pub fn truncate(&self, depth: usize) -> Trunc {
        Trunc::from_iter(depth, self.words.iter().cloned())
    }
}

/// Every word of length `≤ d` under the branching bound that the class accepts.
pub fn enumerate(p: &ClosedClass, d: usize) -> Trunc {
    let mut words = BTreeSet::new();
    let mut level: Vec<Word> = vec![Vec::new()];
    for len in 0..=d {
        for w in &level {
            if p.contains(w) {
                words.insert(w.clone());
            }
        }
        if len == d {
            break;
        }
        let b = p.branching(len);
        level = level
            .iter()
            .flat_map(|w| {
                (0..b).map(move |s| {
                    let mut x = w.clone();
                    x.push(s);
                    x
                })
            })
            .collect();
    }
    Trunc { depth: d, words }
}

pub fn union(a: &Trunc, b: &Trunc) -> Trunc {
    let d = a.depth.min(b.depth);
    Trunc::from_iter(d, a.words.union(&b.words).cloned())
}

pub fn product(a: &Trunc, b: &Trunc, d: usize) -> Trunc {
    let mut out = BTreeSet::new();
    for len in 0..=d {
        for f in a.at(len.div_ceil(2)) {
            for g in b.at(len / 2) {
                let mut w = Vec::with_capacity(len);
                for i in 0..len {
                    w.push(if i % 2 == 0 { f[i / 2] } else { g[i / 2] });
                }
                out.insert(w);
            }
        }
    }
    Trunc { depth: d, words: out }
}

pub fn coproduct(a: &Trunc, b: &Trunc, d: usize) -> Trunc {
    let mut out = BTreeSet::new();
    out.insert(Vec::new());
    for (tag, t) in [(0, a), (1, b)] {
        for w in &t.words {
            if w.len() < d {
                let mut x = vec![tag];
                x.extend(w);
                out.insert(x);
            }
        }
    }
    Trunc { depth: d, words: out }
}

fn graft(prefix: &[Sym], t: &Trunc, d: usize, out: &mut BTreeSet<Word>) {
    for w in &t.words {
        if prefix.len() + w.len() <= d {
            let mut x = prefix.to_vec();
            x.extend(w);
            out.insert(x);
        }
    }
}

pub fn concat(p: &Trunc, q: &Trunc, d: usize) -> Trunc {
    let mut out: BTreeSet<Word> = p.words.clone();
    for rho in p.leaves() {
        graft(&rho, q, d, &mut out);
    }
    Trunc::from_iter(d, out)
}

/// `P ∪ ⋃_n ρ_n⌢Q_n`, with `Q_n = qs[min(n, len−1)]`.
pub fn family(p: &Trunc, qs: &[Trunc], d: usize) -> Trunc {
    let mut out: BTreeSet<Word> = p.words.clone();
    for (n, rho) in p.leaves().into_iter().enumerate() {
        graft(&rho, &qs[n.min(qs.len() - 1)], d, &mut out);
    }
    Trunc::from_iter(d, out)
}

pub fn derivative(p: &Trunc, n: usize, d: usize) -> Trunc {
    let mut acc = p.clone();
    for _ in 1..n {
        acc = concat(p, &acc, d);
    }
    acc
}

/// `⋃_{k ≤ |τ|} {ρ₀⌢…⌢ρ_{k−1}⌢x : ρ_j ∈ L_P, |ρ₀…ρ_j| ≥ τ(j), x ∈ T_P}`.
pub fn delayed(p: &Trunc, tau: &[u64], d: usize) -> Trunc {
    let leaves = p.leaves();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Word, usize)> = vec![(Vec::new(), 0)];
    while let Some((prefix, j)) = stack.pop() {
        graft(&prefix, p, d, &mut out);
        if j == tau.len() {
            continue;
        }
        for rho in &leaves {
            let len = prefix.len() + rho.len();
            if len <= d && len as u64 >= tau[j] && !rho.is_empty() {
                let mut x = prefix.clone();
                x.extend(rho);
                stack.push((x, j + 1));
            }
        }
    }
    Trunc { depth: d, words: out }
}

/// `⋃_{τ ∈ T_Q} (⌢_{i<|τ|} L_P⌢⟨τ(i)⟩)⌢T_P`.
pub fn hyper(q: &Trunc, p: &Trunc, d: usize) -> Trunc {
    let leaves = p.leaves();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Word, Word)> = vec![(Vec::new(), Vec::new())];
    while let Some((prefix, tau)) = stack.pop() {
        graft(&prefix, p, d, &mut out);
        for rho in &leaves {
            for next in q.at(tau.len() + 1).filter(|x| x.starts_with(&tau)) {
                let mut x = prefix.clone();
                x.extend(rho);
                x.push(next[tau.len()]);
                if x.len() <= d {
                    stack.push((x, next.clone()));
                }
            }
        }
    }
    Trunc { depth: d, words: out }
}

pub fn arrow(p: &Trunc, q: &Trunc, sharp: Sym, d: usize) -> Trunc {
    let mut out: BTreeSet<Word> = p.words.clone();
    for s in &p.words {
        let mut x = s.clone();
        x.push(sharp);
        graft(&x, q, d, &mut out);
    }
    Trunc::from_iter(d, out)
}

pub fn sqcap(p: &Trunc, q: &Trunc, d: usize) -> Trunc {
    let mut out = BTreeSet::new();
    for s in &p.words {
        graft(s, q, d, &mut out);
    }
    Trunc { depth: d, words: out }
}

/// Tape words of length `≤ d` over `ps.len()` tapes, coded `n·k + i`, that are consistent
/// with every factor and (if `limit` is set) switch tapes fewer than `limit` times.
pub fn tie(limit: Option<usize>, ps: &[Trunc], d: usize) -> Trunc {
    let k = ps.len();
    let width = ps.iter().map(|p| p.width()).max().unwrap_or(0);
    let mut out = BTreeSet::new();
    let mut level: Vec<Vec<(usize, Sym)>> = vec![Vec::new()];
    for len in 0..=d {
        for s in &level {
            if consistent(ps, s) && limit.map_or(true, |n| s.is_empty() || switches(s) < n) {
                out.insert(s.iter().map(|&(i, n)| n * k as u64 + i as u64).collect());
            }
        }
        if len == d {
            break;
        }
        level = level
            .iter()
            .flat_map(|s| {
                (0..k).flat_map(move |i| {
                    (0..width).map(move |n| {
                        let mut x = s.clone();
                        x.push((i, n));
                        x
                    })
                })
            })
            .collect();
    }
    Trunc { depth: d, words: out }
}

fn switches(s: &[(usize, Sym)]) -> usize {
    let mut c = 0;
    for i in 1..s.len() {
        if s[i].0 != s[i - 1].0 {
            c += 1;
        }
    }
    c
}

fn projection(i: usize, s: &[(usize, Sym)]) -> Word {
    let mut out = Vec::new();
    for &(j, n) in s {
        if j == i {
            out.push(n);
        }
    }
    out
}

fn consistent(ps: &[Trunc], s: &[(usize, Sym)]) -> bool {
    (0..=s.len()).all(|n| ps.iter().enumerate().all(|(i, p)| p.contains(&projection(i, &s[..n]))))
}

/// Members of `tie_tree` each of whose projections has a member extension of length
/// `max(d, |pr_i σ|)`; the factor truncations must reach that depth.
pub fn heart(tie_tree: &Trunc, ps: &[Trunc], d: usize) -> Trunc {
    let k = ps.len() as u64;
    let words = tie_tree
        .words
        .iter()
        .filter(|w| {
            let s: Vec<(usize, Sym)> = w.iter().map(|&c| ((c % k) as usize, c / k)).collect();
            ps.iter().enumerate().all(|(i, p)| {
                let pr = projection(i, &s);
                let target = d.max(pr.len());
                p.words.iter().any(|x| x.len() == target && x.starts_with(&pr))
            })
        })
        .cloned()
        .collect();
    Trunc { depth: tie_tree.depth, words }
}

/// `DNR_{m/k}(α)` by running the machine afresh for every word and position.
pub fn dnr(machine: &Machine, k: u64, m: usize, alpha: &[Sym], schedule: BudgetSchedule, d: usize) -> Trunc {
    let mut words = BTreeSet::new();
    let mut level: Vec<Word> = vec![Vec::new()];
    for len in 0..=d {
        let budget = match schedule {
            BudgetSchedule::Depth(scale) => scale * len as u64,
            BudgetSchedule::Fixed(b) => b,
        };
        for w in &level {
            let ok = w.iter().enumerate().all(|(p, &s)| {
                untuple(p as u64, m).iter().all(|&e| {
                    match machine.run_stats(&Nat::from(e), alpha, Nat::from(p as u64), budget) {
                        Ok(st) => !matches!(st.outcome, Outcome::Halted(v) if v == Nat::from(s)),
                        Err(_) => true,
                    }
                })
            });
            if ok {
                words.insert(w.clone());
            }
        }
        if len == d {
            break;
        }
        level = level
            .iter()
            .flat_map(|w| {
                (0..k).map(move |s| {
                    let mut x = w.clone();
                    x.push(s);
                    x
                })
            })
            .collect();
    }
    Trunc { depth: d, words }
}
