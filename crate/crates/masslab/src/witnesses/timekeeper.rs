//! The stagewise construction of a timekeeper `{t_n}` and of `P̂ = P⌢{P^(t_n)}`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Transcript;
use crate::concat::{concat_family, delayed_derivative, LeafIndex, Timekeeper};
use crate::error::Result;
use crate::kernel::{Machine, Nat};
use crate::learners::output_prefix;
use crate::trees::{members_upto, ClosedClass, DEFAULT_CAP};
use crate::word::{is_prefix, Word};

/// How far below a witness the construction looks for a leaf `ρ* ⊇ ρ`.
pub const LEAF_SEARCH: usize = 8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimekeeperRun {
    /// `ρ_n`, the length-lex `n`-th leaf, for each strategy that has one within reach.
    pub leaves: Vec<Word>,
    /// `τ_n` after the last stage.
    pub taus: Vec<Word>,
    /// `t_n` after the last stage.
    pub timekeepers: Vec<Timekeeper>,
    pub stages: usize,
    pub transcript: Transcript,
    #[serde(skip)]
    pub hat: Option<ClosedClass>,
}

impl TimekeeperRun {
    /// `P̂ = P⌢{P^(t_n)}` with `P` itself below the leaves past the strategies.
    pub fn hat(&self) -> &ClosedClass {
        self.hat.as_ref().expect("built by timekeeper_build")
    }
}

/// `Φ_e(σ)` with the `|σ|`-step convention.
fn phi(m: &Machine, e: &Nat, sigma: &[u64]) -> Word {
    output_prefix(m, e, sigma, sigma.len() as u64, sigma.len())
}

/// Runs strategies `R_0 … R_{strategies−1}` for `stages` stages. `R_n` acts at stage `s+1` when
/// some `ρ ∈ T_P` of length `≤ s` (length-lex least first) and `e < n` make `Φ_e(τ_n⌢ρ)` a
/// member of `T_Q` properly extending `Φ_e(τ_n)`; it then appends the least leaf `ρ* ⊇ ρ`.
pub fn timekeeper_build(
    m: &Machine,
    p: &ClosedClass,
    q: &ClosedClass,
    opponents: &[Nat],
    strategies: usize,
    stages: usize,
) -> Result<TimekeeperRun> {
    let index = LeafIndex::new(p);
    let mut reach = LEAF_SEARCH;
    let mut leaves = index.upto(reach);
    while leaves.len() < strategies && reach < stages + LEAF_SEARCH + strategies {
        reach += 1;
        leaves = index.upto(reach);
    }
    leaves.truncate(strategies);
    let n_active = leaves.len();
    let mut taus: Vec<Word> = leaves.clone();
    let mut keepers = vec![Timekeeper::default(); n_active];
    let mut transcript = Transcript::new("timekeeper");
    for (n, rho) in leaves.iter().enumerate() {
        transcript.push(0, format!("R{n}"), "start", json!({ "rho": rho }));
    }
    for s in 0..stages {
        let candidates = members_upto(p, s, DEFAULT_CAP)?;
        let all_leaves = index.upto(s + LEAF_SEARCH + 1);
        for n in 0..n_active {
            let tau = taus[n].clone();
            let found = candidates.iter().find_map(|rho| {
                let star = all_leaves.iter().find(|l| is_prefix(rho, l))?;
                let mut ext = tau.clone();
                ext.extend(rho);
                (0..n.min(opponents.len())).find_map(|e| {
                    let before = phi(m, &opponents[e], &tau);
                    let after = phi(m, &opponents[e], &ext);
                    (after.len() > before.len() && is_prefix(&before, &after) && q.contains(&after))
                        .then(|| (rho.clone(), star.clone(), e, after))
                })
            });
            if let Some((rho, star, e, out)) = found {
                taus[n].extend(&star);
                keepers[n].push(taus[n].len() as u64, s as u64 + 1);
                transcript.push(
                    s + 1,
                    format!("R{n}"),
                    "act",
                    json!({ "e": e, "rho": rho, "leaf": star, "t": taus[n].len(), "delta": out }),
                );
            }
        }
    }
    let items: Vec<ClosedClass> = keepers.iter().map(|k| delayed_derivative(p, &k.t)).collect();
    let hat = concat_family(p, &items, Some(p))?.relabel(format!("hat({})", p.label()));
    Ok(TimekeeperRun { leaves, taus, timekeepers: keepers, stages, transcript, hat: Some(hat) })
}
