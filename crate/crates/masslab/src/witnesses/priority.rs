//! The stagewise priority construction of `P̂` defeating teams of learners: active heights
//! `h_s`, trees `T_s`, the strings `γ_e(α,s)` and the sets `M_e(α,s)`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Transcript;
use crate::error::Result;
use crate::kernel::Machine;
use crate::learners::{output_prefix, SharedLearner};
use crate::trees::{frontier, members_upto, Alphabet, ClosedClass, DEFAULT_CAP};
use crate::word::{is_prefix, Word};

/// `ρ_e = 1^{e+1}0`, the root of team `e`'s region; `P` itself sits below `⟨0⟩`.
pub fn team_root(e: usize) -> Word {
    let mut w = vec![1; e + 1];
    w.push(0);
    w
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamState {
    pub gamma: BTreeMap<Word, Word>,
    pub m: BTreeMap<Word, BTreeSet<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub stage: usize,
    pub h: usize,
    pub tree: Vec<Word>,
    pub teams: Vec<TeamState>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PriorityRun {
    pub snapshots: Vec<Snapshot>,
    pub transcript: Transcript,
    /// Structural checks that failed, with the stage they failed at.
    pub violations: Vec<String>,
    /// Attention events per `(team, β)`.
    pub attention: BTreeMap<(usize, Word), usize>,
    #[serde(skip)]
    pub hat: Option<ClosedClass>,
}

impl PriorityRun {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("stage 0 is recorded")
    }

    /// `⟨0⟩⌢P ∪ [T_s]`, observable up to the last active height.
    pub fn hat(&self) -> &ClosedClass {
        self.hat.as_ref().expect("built by priority_hat")
    }
}

struct Ctx<'a> {
    m: &'a Machine,
    q: &'a ClosedClass,
}

impl Ctx<'_> {
    /// `l(τ)`: the longest prefix of `Φ_{Ψ(τ)}(τ)` inside `T_Q`.
    fn agreement(&self, l: &SharedLearner, tau: &[u64]) -> usize {
        let out = output_prefix(self.m, &l.guess(tau), tau, tau.len() as u64, tau.len());
        (0..=out.len()).rev().find(|&n| self.q.contains(&out[..n])).unwrap_or(0)
    }

    /// `Ψ` changes on `(γ, τ]`.
    fn changes(&self, l: &SharedLearner, gamma: &[u64], tau: &[u64]) -> bool {
        (gamma.len() + 1..=tau.len()).any(|n| l.guess(&tau[..n - 1]) != l.guess(&tau[..n]))
    }
}

fn prefixes(w: &[u64]) -> impl Iterator<Item = Word> + '_ {
    (0..=w.len()).map(|n| w[..n].to_vec())
}

/// Runs the construction for `stages` stages against `teams[e]` on the region below `ρ_e`.
pub fn priority_hat(
    machine: &Machine,
    p: &ClosedClass,
    q: &ClosedClass,
    teams: &[Vec<SharedLearner>],
    stages: usize,
) -> Result<PriorityRun> {
    let ctx = Ctx { m: machine, q };
    let mut tree: BTreeSet<Word> = BTreeSet::new();
    tree.insert(Vec::new());
    let mut h = teams.iter().enumerate().map(|(e, _)| team_root(e).len()).max().unwrap_or(0);
    let mut states: Vec<TeamState> = Vec::new();
    for (e, team) in teams.iter().enumerate() {
        let mut root = team_root(e);
        let mut st = TeamState::default();
        st.gamma.insert(Vec::new(), root.clone());
        st.m.insert(Vec::new(), (0..team.len()).collect());
        root.resize(h, 0);
        tree.extend(prefixes(&root));
        states.push(st);
    }
    let mut transcript = Transcript::new("priority");
    let mut violations = Vec::new();
    let mut attention = BTreeMap::new();
    let mut snapshots = vec![Snapshot { stage: 0, h, tree: tree.iter().cloned().collect(), teams: states.clone() }];
    transcript.push(0, "construction", "init", json!({ "h": h, "teams": teams.len() }));
    check(p, &tree, &states, teams, 0, &mut violations)?;

    for s in 0..stages {
        let alphas = frontier(p, s)?.members;
        let top: Vec<&Word> = tree.iter().filter(|w| w.len() == h).collect();
        let mut next_states = Vec::with_capacity(states.len());
        for (e, (team, st)) in teams.iter().zip(&states).enumerate() {
            let actor = format!("team{e}");
            // Lex-least witness for learner i acting on γ(β,s), memoized per (β, i).
            let mut witness: BTreeMap<(Word, usize), Option<Word>> = BTreeMap::new();
            let mut requires = |beta: &Word, i: usize| -> Option<Word> {
                witness
                    .entry((beta.clone(), i))
                    .or_insert_with(|| {
                        let gamma = &st.gamma[beta];
                        let floor = prefixes(gamma).map(|sg| ctx.agreement(&team[i], &sg)).max().unwrap_or(0);
                        top.iter()
                            .filter(|tau| is_prefix(gamma, tau))
                            .find(|tau| ctx.changes(&team[i], gamma, tau) || ctx.agreement(&team[i], tau) > floor)
                            .map(|tau| (*tau).clone())
                    })
                    .clone()
            };
            // R_s* with i(β) and τ(β).
            let mut acting: BTreeMap<Word, (usize, Word)> = BTreeMap::new();
            for alpha in &alphas {
                let hit = (0..=alpha.len()).find_map(|len| {
                    let beta = alpha[..len].to_vec();
                    let members = st.m.get(&beta).cloned().unwrap_or_default();
                    members.into_iter().find_map(|i| requires(&beta, i).map(|tau| (beta.clone(), i, tau)))
                });
                if let Some((beta, i, tau)) = hit {
                    acting.entry(beta).or_insert((i, tau));
                }
            }
            let mut next = st.clone();
            for (beta, (i, tau)) in &acting {
                let changed = ctx.changes(&team[*i], &st.gamma[beta], tau);
                *attention.entry((e, beta.clone())).or_insert(0) += 1;
                transcript.push(
                    s + 1,
                    actor.clone(),
                    "attention",
                    json!({ "beta": beta, "learner": i, "tau": tau, "changed": changed }),
                );
                if changed {
                    next.m.entry(beta.clone()).or_default().remove(i);
                    for child in p.children(beta) {
                        next.m.entry(child).or_default().insert(*i);
                    }
                }
                for alpha in st.gamma.keys().filter(|a| is_prefix(beta, a)) {
                    let mut g = tau.clone();
                    g.extend(&alpha[beta.len()..]);
                    next.gamma.insert(alpha.clone(), g);
                }
            }
            for alpha in &alphas {
                let g = next.gamma[alpha].clone();
                let star = if g.len() >= h {
                    g
                } else {
                    match top.iter().find(|t| is_prefix(&g, t)) {
                        Some(t) => (*t).clone(),
                        None => {
                            let mut padded = g.clone();
                            padded.resize(h, 0);
                            transcript.push(s + 1, actor.clone(), "pad", json!({ "alpha": alpha, "gamma": padded }));
                            padded
                        }
                    }
                };
                for child in p.children(alpha) {
                    let mut g = star.clone();
                    g.push(child[alpha.len()]);
                    next.gamma.insert(child, g);
                }
            }
            next.m.retain(|_, v| !v.is_empty());
            next_states.push(next);
        }
        let grown = members_upto(p, s + 1, DEFAULT_CAP)?;
        let new_alphas: Vec<&Word> = grown.iter().filter(|a| a.len() == s + 1).collect();
        let h_next = next_states
            .iter()
            .flat_map(|st| new_alphas.iter().filter_map(|a| st.gamma.get(*a)).map(Vec::len))
            .max()
            .unwrap_or(h)
            .max(h);
        for st in &next_states {
            for a in &new_alphas {
                if let Some(g) = st.gamma.get(*a) {
                    let mut padded = g.clone();
                    padded.resize(h_next, 0);
                    tree.extend(prefixes(&padded));
                }
            }
        }
        h = h_next;
        states = next_states;
        transcript.push(s + 1, "construction", "height", json!({ "h": h, "nodes": tree.len() }));
        check(p, &tree, &states, teams, s + 1, &mut violations)?;
        snapshots.push(Snapshot { stage: s + 1, h, tree: tree.iter().cloned().collect(), teams: states.clone() });
    }
    let hat = hat_class(p, tree, h);
    Ok(PriorityRun { snapshots, transcript, violations, attention, hat: Some(hat) })
}

/// `T_s` is a tree, `γ(·,s)` is prefix-monotone, injective on incomparable strings and lands in
/// `T_s`, and `{M(β,s)}_{β⊆α}` partitions the team for every `α ∈ T_P` of length `s`.
fn check(
    p: &ClosedClass,
    tree: &BTreeSet<Word>,
    states: &[TeamState],
    teams: &[Vec<SharedLearner>],
    s: usize,
    violations: &mut Vec<String>,
) -> Result<()> {
    if let Some(w) = tree.iter().find(|w| !w.is_empty() && !tree.contains(&w[..w.len() - 1])) {
        violations.push(format!("stage {s}: T_s is not prefix closed at {w:?}"));
    }
    let alphas = frontier(p, s)?.members;
    for (e, st) in states.iter().enumerate() {
        for (a, ga) in &st.gamma {
            if !tree.contains(ga) {
                violations.push(format!("stage {s}: team {e} gamma({a:?}) = {ga:?} is outside T_s"));
            }
            for (b, gb) in st.gamma.range(a.clone()..) {
                if b == a {
                    continue;
                }
                if is_prefix(a, b) && !is_prefix(ga, gb) {
                    violations.push(format!("stage {s}: team {e} gamma not monotone on {a:?} ⊆ {b:?}"));
                }
                if !is_prefix(a, b) && !is_prefix(b, a) && (is_prefix(ga, gb) || is_prefix(gb, ga)) {
                    violations.push(format!("stage {s}: team {e} gamma collides on {a:?} ⊥ {b:?}"));
                }
            }
        }
        for alpha in &alphas {
            let mut seen = BTreeSet::new();
            let mut total = 0;
            for beta in prefixes(alpha) {
                if let Some(ms) = st.m.get(&beta) {
                    total += ms.len();
                    seen.extend(ms.iter().copied());
                }
            }
            let b = teams[e].len();
            if total != b || seen != (0..b).collect() {
                violations.push(format!("stage {s}: team {e} M sets along {alpha:?} do not partition {b}"));
            }
        }
    }
    Ok(())
}

fn hat_class(p: &ClosedClass, tree: BTreeSet<Word>, h: usize) -> ClosedClass {
    let p = p.clone();
    let pb = p.clone();
    let tree = Arc::new(tree);
    ClosedClass::new(
        format!("priority-hat({})", p.label()),
        Alphabet::Plain,
        move |d| if d == 0 { 2 } else { pb.branching(d - 1).max(2) },
        move |w| match w.first() {
            None => true,
            Some(0) => p.contains(&w[1..]),
            Some(_) => tree.contains(&w[..w.len().min(h)]),
        },
    )
}
