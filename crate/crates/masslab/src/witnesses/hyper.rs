//! The locking-sequence learner for `P ≤ (Q⋄P) ⊗ R`: walk through pairs `(ρ, m)`, keep the
//! first whose guard survives, and run the extraction below `ρ` with the program `Ψ` locks on.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::noncup::{extract_with_prefix, longest_path};
use super::Transcript;
use crate::kernel::{library, Machine, Native, Nat, Outcome, RunStats};
use crate::learners::{FnLearner, Learner, SharedLearner};
use crate::trees::{ext_approx, members_upto, ClosedClass, DEFAULT_CAP};
use crate::word::{all_words, deinterleave, interleave, Sym, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperConfig {
    /// Longest `ρ` enumerated.
    pub max_rho: usize,
    /// How far past `ρ` the third guard condition is tested.
    pub guard_depth: usize,
    /// Extraction rounds run by `Θ`.
    pub rounds: usize,
}

impl Default for HyperConfig {
    fn default() -> Self {
        HyperConfig { max_rho: 6, guard_depth: 6, rounds: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HyperStatus {
    Locked { index: usize, rho: Word, m: Sym },
    Inconclusive { tried: usize },
}

type Pairs = Arc<Vec<(Word, Sym)>>;

/// `V_P^m = T_P ∪ {λ⌢m : λ ∈ L_P}`.
fn with_tail(p: &ClosedClass, m: Sym) -> ClosedClass {
    let (a, b) = (p.clone(), p.clone());
    ClosedClass::new(
        format!("{}^{m}", p.label()),
        p.alphabet(),
        move |d| a.branching(d).max(m + 1),
        move |w| match w.split_last() {
            None => true,
            Some((&last, init)) => b.contains(w) || (last == m && b.contains(init) && b.is_leaf(init)),
        },
    )
}

struct Theta {
    psi: SharedLearner,
    p: ClosedClass,
    tails: [ClosedClass; 2],
    pairs: Pairs,
    rounds: usize,
    memo: Mutex<HashMap<(usize, Word), Option<Word>>>,
}

impl Theta {
    fn path(&self, m: &Machine, i: usize, g: &[Sym]) -> Option<Word> {
        let key = (i, g.to_vec());
        if let Some(r) = self.memo.lock().expect("memo lock").get(&key) {
            return r.clone();
        }
        let (rho, mm) = &self.pairs[i];
        let r = (rho.len() <= g.len())
            .then(|| {
                let phi = self.psi.guess(&interleave(rho, &g[..rho.len()]).ok()?);
                let (_, union) =
                    extract_with_prefix(m, &phi, &self.p, &self.tails[*mm as usize], rho, g, self.rounds, 0).ok()?;
                Some(longest_path(&union))
            })
            .flatten();
        self.memo.lock().expect("memo lock").insert(key, r.clone());
        r
    }
}

impl Native for Theta {
    fn name(&self) -> &str {
        "theta"
    }

    fn arity(&self) -> u32 {
        2
    }

    fn call(&self, m: &Machine, oracle: &[u64], args: &[Nat], _budget: u64) -> RunStats {
        let i = args[0].to_u64().map_or(usize::MAX, |v| v as usize);
        let x = args[1].to_u64().map_or(usize::MAX, |v| v as usize);
        let max_read = oracle.len().checked_sub(1);
        let outcome = if i >= self.pairs.len() {
            Outcome::StillRunning
        } else {
            match self.path(m, i, oracle) {
                Some(path) if x < path.len() => Outcome::Halted(Nat::from(path[x])),
                Some(_) => Outcome::OracleOutOfRange,
                None => Outcome::StillRunning,
            }
        };
        RunStats { outcome, steps: 1, max_read }
    }
}

pub struct HyperLearner {
    machine: Arc<Machine>,
    psi: SharedLearner,
    p: ClosedClass,
    q: ClosedClass,
    cfg: HyperConfig,
    pairs: Pairs,
    tails: Vec<Vec<Word>>,
    statics: Vec<bool>,
    theta: Nat,
}

impl HyperLearner {
    /// The base machine extended by `Θ`; the learner's guesses are indices on it.
    pub fn machine(&self) -> &Arc<Machine> {
        &self.machine
    }

    pub fn pairs(&self) -> &[(Word, Sym)] {
        &self.pairs
    }

    pub fn config(&self) -> &HyperConfig {
        &self.cfg
    }

    /// Ways of reading `ρ` as `⁀_{i<n}(σ_i⌢τ(i))` with every `σ_i ∈ L_P`; returns each `τ`.
    fn parses(&self, rho: &[Sym]) -> Vec<Word> {
        if rho.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for j in 0..rho.len() {
            let block = &rho[..j];
            if self.p.contains(block) && self.p.is_leaf(block) {
                for mut rest in self.parses(&rho[j + 1..]) {
                    rest.insert(0, rho[j]);
                    out.push(rest);
                }
            }
        }
        out
    }

    /// The first two guard conditions, with `T_Q^ext` tested `guard_depth` levels down.
    pub fn guard_static(&self, i: usize) -> bool {
        let (rho, m) = &self.pairs[i];
        let d = self.cfg.guard_depth;
        self.parses(rho).iter().any(|tau| {
            let mut next = tau.clone();
            next.push(*m);
            ext_approx(&self.q, tau, tau.len() + d).unwrap_or(false)
                && ext_approx(&self.q, &next, next.len() + d).unwrap_or(false)
        })
    }

    /// Whether the guard of pair `i` is refuted by the oracle prefix `g`. The third condition
    /// compares `Ψ(ρ ⊕ g↾|ρ|)` with `Ψ` on every prefix of `(ρ⌢y) ⊕ g` for `y ∈ V_P^m`,
    /// `|ρ⌢y| ≤ min(|g|, |ρ| + guard_depth)`.
    pub fn refuted(&self, i: usize, g: &[Sym]) -> bool {
        if !self.statics[i] {
            return true;
        }
        let (rho, m) = &self.pairs[i];
        if rho.len() > g.len() {
            return false;
        }
        let lock = self.psi.guess(&interleave(rho, &g[..rho.len()]).expect("equal lengths"));
        let top = g.len().min(rho.len() + self.cfg.guard_depth);
        self.tails[*m as usize].iter().filter(|y| rho.len() + y.len() <= top).any(|y| {
            let mut full = rho.clone();
            full.extend(y);
            let w = interleave(&full, &g[..full.len()]).expect("equal lengths");
            (2 * rho.len() + 1..=w.len()).any(|n| self.psi.guess(&w[..n]) != lock)
        })
    }

    pub fn status(&self, g: &[Sym]) -> HyperStatus {
        match (0..self.pairs.len()).find(|&i| !self.refuted(i, g)) {
            Some(index) => {
                let (rho, m) = self.pairs[index].clone();
                HyperStatus::Locked { index, rho, m }
            }
            None => HyperStatus::Inconclusive { tried: self.pairs.len() },
        }
    }

    fn index_of(&self, g: &[Sym]) -> usize {
        match self.status(g) {
            HyperStatus::Locked { index, .. } => index,
            HyperStatus::Inconclusive { tried } => tried,
        }
    }

    /// `Θ(·, ρ_i, m_i)` as a program index.
    pub fn program(&self, i: usize) -> Nat {
        self.machine.smn(&self.theta, &[Nat::from(i as u64)]).expect("theta has arity 2")
    }

    pub fn transcript(&self, g: &[Sym]) -> Transcript {
        let mut t = Transcript::new("hyper-learner");
        let mut last = None;
        for n in 0..=g.len() {
            let st = self.status(&g[..n]);
            if last.as_ref() != Some(&st) {
                t.push(n, "learner", "guard", json!(st));
                last = Some(st);
            }
        }
        t
    }
}

impl Learner for HyperLearner {
    fn name(&self) -> String {
        format!("hyper-learner {} {}", self.q.label(), self.p.label())
    }

    fn guess(&self, prefix: &[Sym]) -> Nat {
        self.program(self.index_of(prefix))
    }

    fn trace(&self, g: &[Sym]) -> Vec<Nat> {
        let mut memo: HashMap<usize, Nat> = HashMap::new();
        (0..=g.len())
            .map(|n| {
                let i = self.index_of(&g[..n]);
                memo.entry(i).or_insert_with(|| self.program(i)).clone()
            })
            .collect()
    }
}

/// Builds `Δ` from a learner `psi` for `P ≤ (Q⋄P) ⊗ R` whose programs run on `base`.
pub fn hyperconcat_learner(
    base: &Machine,
    psi: SharedLearner,
    p: &ClosedClass,
    q: &ClosedClass,
    cfg: HyperConfig,
) -> HyperLearner {
    let mut pairs = Vec::new();
    for len in 0..=cfg.max_rho {
        for rho in all_words(len, &|_| 2) {
            pairs.push((rho.clone(), 0));
            pairs.push((rho, 1));
        }
    }
    let pairs: Pairs = Arc::new(pairs);
    let classes = [with_tail(p, 0), with_tail(p, 1)];
    let tails = classes
        .iter()
        .map(|c| members_upto(c, cfg.guard_depth, DEFAULT_CAP).unwrap_or_default())
        .collect();
    let native = Theta {
        psi: psi.clone(),
        p: p.clone(),
        tails: classes,
        pairs: pairs.clone(),
        rounds: cfg.rounds,
        memo: Mutex::new(HashMap::new()),
    };
    let mut b = base.extend();
    let theta = Nat::from(b.push_native(Arc::new(native)).expect("room for theta"));
    let mut h = HyperLearner {
        machine: b.build(),
        psi,
        p: p.clone(),
        q: q.clone(),
        cfg,
        pairs,
        tails,
        statics: Vec::new(),
        theta,
    };
    h.statics = (0..h.pairs.len()).map(|i| h.guard_static(i)).collect();
    h
}

/// `Ψ` for the standard fixture: the pointwise meet of the two halves once the even half
/// shows a `1`, the odd half before that.
pub fn hyper_fixture_psi() -> SharedLearner {
    let and = library::interleaved_and().encode();
    let odd = library::odd_half().encode();
    Arc::new(FnLearner::new("and-after-one", move |w| {
        let (even, _) = deinterleave(w);
        if even.contains(&1) {
            and.clone()
        } else {
            odd.clone()
        }
    }))
}
