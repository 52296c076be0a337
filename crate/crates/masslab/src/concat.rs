//! Concatenation algebra: `⌢`, `⋈`, infinitary concatenation, recursive meet, derivatives,
//! delayed derivatives, layered `⋈P`, hyperconcatenation and the `→`/`⊓` variants.

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trees::{product, Alphabet, ClosedClass};
use crate::word::{llex, Sym, Word};

/// How a word sits relative to `T_P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    /// The whole word is in `T_P`.
    Inside,
    /// Not in `T_P`; its longest `T_P` prefix has this length and is a leaf.
    Leaf(usize),
    /// Not in `T_P` and its longest `T_P` prefix is not a leaf.
    Out,
}

/// Leaves form an antichain, so a word outside `T_P` has at most one leaf prefix.
pub fn split(p: &ClosedClass, w: &[Sym]) -> Split {
    if p.contains(w) {
        return Split::Inside;
    }
    let mut j = 0;
    while j < w.len() && p.contains(&w[..=j]) {
        j += 1;
    }
    if p.contains(&w[..j]) && !p.has_child(&w[..j]) {
        Split::Leaf(j)
    } else {
        Split::Out
    }
}

fn sup_upto(c: &ClosedClass, d: usize) -> u64 {
    (0..=d).map(|j| c.branching(j)).max().unwrap_or(0)
}

fn grafted_bound(p: &ClosedClass, qs: &[ClosedClass]) -> impl Fn(usize) -> u64 + Send + Sync + 'static {
    let p = p.clone();
    let qs = qs.to_vec();
    move |d| {
        let q = qs.iter().map(|q| sup_upto(q, d)).max().unwrap_or(0);
        sup_upto(&p, d).max(q)
    }
}

/// `P⌢Q = P ∪ ⋃_{ρ ∈ L_P} ρ⌢Q`.
pub fn concat(p: &ClosedClass, q: &ClosedClass) -> ClosedClass {
    let (a, b) = (p.clone(), q.clone());
    ClosedClass::new(
        format!("concat({}, {})", p.label(), q.label()),
        p.alphabet(),
        grafted_bound(p, std::slice::from_ref(q)),
        move |w| match split(&a, w) {
            Split::Inside => true,
            Split::Leaf(j) => b.contains(&w[j..]),
            Split::Out => false,
        },
    )
}

/// `P⋈Q = (P⌢Q) ⊗ (Q⌢P)`.
pub fn comm_concat(p: &ClosedClass, q: &ClosedClass) -> ClosedClass {
    product(&concat(p, q), &concat(q, p)).relabel(format!("commconcat({}, {})", p.label(), q.label()))
}

/// Length-lex enumeration of `L_P`, extended on demand and shared between clones.
#[derive(Clone)]
pub struct LeafIndex {
    p: ClosedClass,
    state: Arc<Mutex<LeafState>>,
}

struct LeafState {
    depth: usize,
    level: Vec<Word>,
    leaves: Vec<Word>,
}

impl LeafIndex {
    pub fn new(p: &ClosedClass) -> LeafIndex {
        let level = if p.contains(&[]) { vec![Vec::new()] } else { Vec::new() };
        LeafIndex {
            p: p.clone(),
            state: Arc::new(Mutex::new(LeafState { depth: 0, level, leaves: Vec::new() })),
        }
    }

    /// All leaves of length `< d`, in length-lex order.
    pub fn upto(&self, d: usize) -> Vec<Word> {
        let mut st = self.state.lock().unwrap();
        self.extend(&mut st, d);
        st.leaves.iter().filter(|l| l.len() < d).cloned().collect()
    }

    fn extend(&self, st: &mut LeafState, d: usize) {
        while st.depth < d {
            let mut next = Vec::new();
            let mut found = Vec::new();
            for w in &st.level {
                let kids = self.p.children(w);
                if kids.is_empty() {
                    found.push(w.clone());
                }
                next.extend(kids);
            }
            found.sort_by(|a, b| llex(a, b));
            st.leaves.extend(found);
            st.level = next;
            st.depth += 1;
        }
    }

    /// Position of `rho` in the length-lex enumeration of `L_P`.
    pub fn index_of(&self, rho: &[Sym]) -> Option<usize> {
        let mut st = self.state.lock().unwrap();
        self.extend(&mut st, rho.len() + 1);
        st.leaves.binary_search_by(|l| llex(l, rho)).ok()
    }
}

/// `P⌢{Q_n}`: below the length-lex `n`-th leaf of `T_P` graft `items[n]`, or `rest` past the list.
pub fn concat_family(p: &ClosedClass, items: &[ClosedClass], rest: Option<&ClosedClass>) -> Result<ClosedClass> {
    let rest = match (rest, items.last()) {
        (Some(r), _) => r.clone(),
        (None, Some(last)) => last.clone(),
        (None, None) => return Err(Error::Construction("concat family needs a member".into())),
    };
    let mut all: Vec<ClosedClass> = items.to_vec();
    all.push(rest.clone());
    let mut names: Vec<String> = items.iter().map(|q| q.label().to_string()).collect();
    names.push(format!("rest {}", rest.label()));
    let a = p.clone();
    let leaves = LeafIndex::new(p);
    let items = items.to_vec();
    Ok(ClosedClass::new(
        format!("family({}; {})", p.label(), names.join(", ")),
        p.alphabet(),
        grafted_bound(p, &all),
        move |w| match split(&a, w) {
            Split::Inside => true,
            Split::Leaf(j) => match leaves.index_of(&w[..j]) {
                Some(n) => items.get(n).unwrap_or(&rest).contains(&w[j..]),
                None => false,
            },
            Split::Out => false,
        },
    ))
}

/// `base⌢{Q_n}` over the complete base class.
pub fn recursive_meet(base: &ClosedClass, qs: &[ClosedClass]) -> Result<ClosedClass> {
    let names: Vec<&str> = qs.iter().map(|q| q.label()).collect();
    Ok(concat_family(base, qs, None)?.relabel(format!("meet({})", names.join(", "))))
}

/// `P^(n)`: `P^(1) = P`, `P^(n+1) = P⌢P^(n)`.
pub fn derivative(p: &ClosedClass, n: usize) -> Result<ClosedClass> {
    if n == 0 {
        return Err(Error::Shape("derivative order starts at 1".into()));
    }
    let mut acc = p.clone();
    for _ in 1..n {
        acc = concat(p, &acc);
    }
    Ok(acc.relabel(format!("deriv {n} ({})", p.label())))
}

/// `base⌢P`.
pub fn tie_op(base: &ClosedClass, p: &ClosedClass) -> ClosedClass {
    concat(base, p).relabel(format!("tieop({})", p.label()))
}

/// `P^(τ)`: up to `|τ|` grafts of `P` below leaves, the `i`-th only below leaves whose total
/// length is at least `τ(i)`.
pub fn delayed_derivative(p: &ClosedClass, tau: &[u64]) -> ClosedClass {
    let a = p.clone();
    let t = tau.to_vec();
    ClosedClass::new(
        format!("delayed {:?} ({})", tau, p.label()),
        p.alphabet(),
        grafted_bound(p, &[]),
        move |w| {
            let mut pos = 0usize;
            let mut k = 0usize;
            loop {
                match split(&a, &w[pos..]) {
                    Split::Inside => return true,
                    Split::Leaf(j) => {
                        pos += j;
                        match t.get(k) {
                            Some(&need) if pos as u64 >= need => k += 1,
                            _ => return false,
                        }
                    }
                    Split::Out => return false,
                }
            }
        },
    )
}

/// `⋈P` truncated to finitely many layers; layer `n` is `P^(n+1)`.
#[derive(Clone, Debug)]
pub struct LayeredClass {
    layers: Vec<ClosedClass>,
    label: String,
}

impl LayeredClass {
    pub fn new(label: impl Into<String>, layers: Vec<ClosedClass>) -> LayeredClass {
        LayeredClass { layers, label: label.into() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn layers(&self) -> &[ClosedClass] {
        &self.layers
    }

    /// Least layer containing `w`.
    pub fn layer_of(&self, w: &[Sym]) -> Option<usize> {
        self.layers.iter().position(|l| l.contains(w))
    }

    /// The union of all layers as one tree.
    pub fn union(&self) -> ClosedClass {
        let ls = self.layers.clone();
        let lb = self.layers.clone();
        ClosedClass::new(
            self.label.clone(),
            self.layers.first().map_or(Alphabet::Plain, |l| l.alphabet()),
            move |d| lb.iter().map(|l| l.branching(d)).max().unwrap_or(0),
            move |w| ls.iter().any(|l| l.contains(w)),
        )
    }
}

pub fn btie(p: &ClosedClass, layer_cap: usize) -> Result<LayeredClass> {
    if layer_cap == 0 {
        return Err(Error::Shape("btie needs at least one layer".into()));
    }
    let layers = (1..=layer_cap).map(|n| derivative(p, n)).collect::<Result<Vec<_>>>()?;
    Ok(LayeredClass::new(format!("btie {layer_cap} ({})", p.label()), layers))
}

/// `Q⋄P`: `P`-blocks ending in leaves, each followed by the next symbol of a word of `T_Q`,
/// closed off by a member of `T_P`.
pub fn hyperconcat(q: &ClosedClass, p: &ClosedClass) -> ClosedClass {
    let (qa, pa) = (q.clone(), p.clone());
    ClosedClass::new(
        format!("hyper({}, {})", q.label(), p.label()),
        p.alphabet(),
        grafted_bound(p, std::slice::from_ref(q)),
        move |w| {
            let mut pos = 0usize;
            let mut tau = Vec::new();
            loop {
                match split(&pa, &w[pos..]) {
                    Split::Inside => return true,
                    Split::Leaf(j) => {
                        pos += j;
                        tau.push(w[pos]);
                        pos += 1;
                        if !qa.contains(&tau) {
                            return false;
                        }
                    }
                    Split::Out => return false,
                }
            }
        },
    )
}

/// Decomposition of a `Q⋄P` member: the leaf blocks, the `Q`-symbols between them and the tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperSplit {
    pub blocks: Vec<Word>,
    pub tau: Word,
    pub rest: Word,
}

pub fn hyper_split(q: &ClosedClass, p: &ClosedClass, w: &[Sym]) -> Option<HyperSplit> {
    let mut pos = 0usize;
    let mut out = HyperSplit { blocks: Vec::new(), tau: Vec::new(), rest: Vec::new() };
    loop {
        match split(p, &w[pos..]) {
            Split::Inside => {
                out.rest = w[pos..].to_vec();
                return Some(out);
            }
            Split::Leaf(j) => {
                out.blocks.push(w[pos..pos + j].to_vec());
                pos += j;
                out.tau.push(w[pos]);
                pos += 1;
                if !q.contains(&out.tau) {
                    return None;
                }
            }
            Split::Out => return None,
        }
    }
}

/// The separator `♯` used by [`arrow`]: one past every symbol either operand uses in its
/// first 256 positions.
pub fn sharp(p: &ClosedClass, q: &ClosedClass) -> Sym {
    sup_upto(p, 255).max(sup_upto(q, 255))
}

/// `P^→Q = [{σ⌢♯⌢τ : σ ∈ T_P, τ ∈ T_Q}]`.
pub fn arrow(p: &ClosedClass, q: &ClosedClass) -> ClosedClass {
    let s = sharp(p, q);
    let (a, b) = (p.clone(), q.clone());
    ClosedClass::new(
        format!("arrow({}, {})", p.label(), q.label()),
        p.alphabet(),
        move |_| s + 1,
        move |w| match w.iter().position(|&x| x == s) {
            None => a.contains(w),
            Some(i) => a.contains(&w[..i]) && b.contains(&w[i + 1..]),
        },
    )
}

/// `P^⊓Q = [{σ⌢τ : σ ∈ T_P, τ ∈ T_Q}]`.
pub fn sqcap(p: &ClosedClass, q: &ClosedClass) -> ClosedClass {
    let (a, b) = (p.clone(), q.clone());
    ClosedClass::new(
        format!("sqcap({}, {})", p.label(), q.label()),
        p.alphabet(),
        grafted_bound(p, std::slice::from_ref(q)),
        move |w| (0..=w.len()).any(|i| a.contains(&w[..i]) && b.contains(&w[i..])),
    )
}

/// Stage numbers `t_n` recorded by a c.e. enumeration; `stages[i]` is when entry `i` appeared.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timekeeper {
    pub t: Vec<u64>,
    pub stages: Vec<u64>,
}

impl Timekeeper {
    pub fn push(&mut self, threshold: u64, stage: u64) {
        self.t.push(threshold);
        self.stages.push(stage);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Enumeration stages never decrease.
    pub fn is_well_formed(&self) -> bool {
        self.t.len() == self.stages.len() && self.stages.windows(2).all(|w| w[0] <= w[1])
    }
}
