use std::collections::BTreeSet;

use super::{Alphabet, ClosedClass};
use crate::word::{deinterleave, is_prefix, Sym, Word};

/// The full `b`-ary tree.
pub fn full(b: u64) -> ClosedClass {
    ClosedClass::new(format!("full {b}"), Alphabet::Plain, move |_| b, |_| true)
}

/// The empty class: not even the root is a member.
pub fn empty() -> ClosedClass {
    ClosedClass::new("empty", Alphabet::Plain, |_| 0, |_| false)
}

/// `{prefix⌢cycle⌢cycle⌢…}`; with an empty cycle, the finite tree of prefixes of `prefix`.
pub fn singleton(prefix: &[Sym], cycle: &[Sym]) -> ClosedClass {
    let prefix = prefix.to_vec();
    let cycle = cycle.to_vec();
    let label = if prefix.is_empty() {
        format!("singleton {}", list(&cycle))
    } else {
        format!("singleton {} ~ {}", list(&prefix), list(&cycle))
    };
    let at = {
        let (prefix, cycle) = (prefix.clone(), cycle.clone());
        move |i: usize| -> Option<Sym> {
            if i < prefix.len() {
                Some(prefix[i])
            } else if cycle.is_empty() {
                None
            } else {
                Some(cycle[(i - prefix.len()) % cycle.len()])
            }
        }
    };
    let at2 = at.clone();
    ClosedClass::new(
        label,
        Alphabet::Plain,
        move |d| at(d).map_or(0, |s| s + 1),
        move |w| w.iter().enumerate().all(|(i, &s)| at2(i) == Some(s)),
    )
}

fn list(w: &[Sym]) -> String {
    let parts: Vec<String> = w.iter().map(|s| s.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

/// `∏_x F_x`; positions beyond the list reuse the last factor. Any empty factor gives the empty class.
pub fn homogeneous(factors: &[BTreeSet<Sym>]) -> ClosedClass {
    let sets: Vec<String> = factors
        .iter()
        .map(|f| {
            let xs: Vec<String> = f.iter().map(|s| s.to_string()).collect();
            format!("{{{}}}", xs.join(", "))
        })
        .collect();
    let label = format!("homog [{}]", sets.join(", "));
    if factors.is_empty() || factors.iter().any(|f| f.is_empty()) {
        return empty().relabel(label);
    }
    let factors: Vec<BTreeSet<Sym>> = factors.to_vec();
    let fb = factors.clone();
    ClosedClass::new(
        label,
        Alphabet::Plain,
        move |d| fb[d.min(fb.len() - 1)].iter().next_back().map_or(0, |m| m + 1),
        move |w| w.iter().enumerate().all(|(x, s)| factors[x.min(factors.len() - 1)].contains(s)),
    )
}

/// Words over `0..width` avoiding listed prefixes and factors.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Pattern {
    pub width: u64,
    #[serde(default)]
    pub avoid_prefix: Vec<Word>,
    #[serde(default)]
    pub avoid_factor: Vec<Word>,
}

pub fn pattern(name: &str, p: &Pattern) -> ClosedClass {
    let p = p.clone();
    let width = p.width;
    ClosedClass::new(name, Alphabet::Plain, move |_| width, move |w| {
        !p.avoid_prefix.iter().any(|f| is_prefix(f, w))
            && !p.avoid_factor.iter().any(|f| !f.is_empty() && w.windows(f.len()).any(|x| x == f.as_slice()))
    })
}

pub fn union(p: &ClosedClass, q: &ClosedClass) -> ClosedClass {
    let (a, b) = (p.clone(), q.clone());
    let (ba, bb) = (p.clone(), q.clone());
    ClosedClass::new(
        format!("cup({}, {})", p.label(), q.label()),
        p.alphabet(),
        move |d| ba.branching(d).max(bb.branching(d)),
        move |w| a.contains(w) || b.contains(w),
    )
}

/// `T_P ∩ {τ : τ compatible with σ}`, the tree of `P ∩ [σ]`.
pub fn restrict(p: &ClosedClass, sigma: &[Sym]) -> ClosedClass {
    let a = p.clone();
    let ba = p.clone();
    let s = sigma.to_vec();
    let sb = s.clone();
    ClosedClass::new(
        format!("cap{}({})", list(sigma), p.label()),
        p.alphabet(),
        move |d| match sb.get(d) {
            Some(&x) => (x + 1).min(ba.branching(d)),
            None => ba.branching(d),
        },
        move |w| (is_prefix(w, &s) || is_prefix(&s, w)) && a.contains(w),
    )
}

/// `P ⊗ Q = {f ⊕ g : f ∈ P, g ∈ Q}`.
pub fn product(p: &ClosedClass, q: &ClosedClass) -> ClosedClass {
    let (a, b) = (p.clone(), q.clone());
    let (ba, bb) = (p.clone(), q.clone());
    ClosedClass::new(
        format!("oplus({}, {})", p.label(), q.label()),
        p.alphabet(),
        move |d| if d % 2 == 0 { ba.branching(d / 2) } else { bb.branching(d / 2) },
        move |w| {
            let (f, g) = deinterleave(w);
            a.contains(&f) && b.contains(&g)
        },
    )
}

/// `P ⊔ Q = ⟨0⟩⌢P ∪ ⟨1⟩⌢Q`.
pub fn coproduct(p: &ClosedClass, q: &ClosedClass) -> ClosedClass {
    let (a, b) = (p.clone(), q.clone());
    let (ba, bb) = (p.clone(), q.clone());
    ClosedClass::new(
        format!("linf({}, {})", p.label(), q.label()),
        Alphabet::Plain,
        move |d| if d == 0 { 2 } else { ba.branching(d - 1).max(bb.branching(d - 1)) },
        move |w| match w.first() {
            None => true,
            Some(0) => a.contains(&w[1..]),
            Some(1) => b.contains(&w[1..]),
            Some(_) => false,
        },
    )
}
