//! The mind-change forcing adversary on `k`-tape disjunctions, for one learner or a team.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Transcript;
use crate::disjunction::{code, mind_changes, proj, Entry, TapeWord};
use crate::error::{Error, Result};
use crate::kernel::{Machine, Outcome};
use crate::learners::{mcl, SharedLearner};
use crate::trees::{ext_approx, ClosedClass};
use crate::word::{Sym, Word};

/// Extends `prefix` symbol by symbol with the least child still extendible to length `len`.
pub fn leftmost_path(p: &ClosedClass, prefix: &[Sym], len: usize) -> Option<Word> {
    if !ext_approx(p, prefix, len.max(prefix.len())).unwrap_or(false) {
        return None;
    }
    let mut w = prefix.to_vec();
    while w.len() < len {
        let next = p.children(&w).into_iter().find(|c| ext_approx(p, c, len).unwrap_or(false))?;
        w = next;
    }
    Some(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForceSpec {
    /// Mind changes to force on every team member.
    pub m: usize,
    /// The starting string `τ₀`.
    pub rho: TapeWord,
    /// Paths `f_i` through each factor extending `pr_i(τ₀)`; leftmost paths when absent.
    pub oracles: Option<Vec<Word>>,
    pub budget: u64,
    /// Symbols written on one tape without a commitment before the game reports a stall.
    pub stall_limit: usize,
    /// `t`: the factors are indexed by `t`-bit strings and member `e` answers for bit `e mod t`.
    pub team_bits: usize,
}

impl ForceSpec {
    pub fn new(m: usize) -> ForceSpec {
        ForceSpec { m, rho: Vec::new(), oracles: None, budget: 1000, stall_limit: 16, team_bits: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stall {
    pub stage: usize,
    pub tape: usize,
    /// `diverged`: the current program never outputs at `0`; `wrong-commit`: it outputs a tape
    /// the adversary is not writing on; `oracle-exhausted`: the supplied path ran out.
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForceOutcome {
    pub word: TapeWord,
    /// `word` coded as single symbols `n·k + i`.
    pub coded: Word,
    /// Commitment stages `s_u`.
    pub commits: Vec<usize>,
    /// Tapes `j_0, j_1, …` written on.
    pub tapes: Vec<usize>,
    /// Mind changes of each team member along `coded`.
    pub mind_changes: Vec<usize>,
    pub achieved: bool,
    pub stall: Option<Stall>,
    pub transcript: Transcript,
}

impl ForceOutcome {
    /// Tape switches in the constructed word.
    pub fn switches(&self) -> usize {
        mind_changes(&self.word)
    }
}

fn bit(x: usize, e: usize) -> usize {
    (x >> e) & 1
}

/// Plays the forcing game: write `f_{j_u}` on tape `j_u` until some member's program commits
/// to a tape in `E^e_{δ(j_u;e)}` at position `0`, flip the bits of the committed members, and
/// repeat until every member has changed its mind `m` times.
pub fn force_mind_changes(m: &Machine, team: &[SharedLearner], ps: &[ClosedClass], spec: &ForceSpec) -> Result<ForceOutcome> {
    let t = spec.team_bits.max(1);
    let k = ps.len();
    if team.is_empty() {
        return Err(Error::Shape("the learner team is empty".into()));
    }
    if k != 1 << t {
        return Err(Error::Shape(format!("{t} team bits need {} factors, got {k}", 1usize << t)));
    }
    if spec.rho.iter().any(|e| e.0 >= k) {
        return Err(Error::Shape(format!("starting string writes past tape {}", k - 1)));
    }
    let horizon = spec.rho.len() + spec.stall_limit * (spec.m + 2) * team.len().max(1) + 1;
    let paths: Vec<Word> = match &spec.oracles {
        Some(o) if o.len() == k => o.clone(),
        Some(o) => return Err(Error::Shape(format!("{} oracles for {k} tapes", o.len()))),
        None => ps
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let start = proj(i, &spec.rho);
                leftmost_path(p, &start, start.len() + horizon).ok_or_else(|| {
                    Error::Hypothesis(format!("pr_{i} of the starting string is not extendible in {}", p.label()))
                })
            })
            .collect::<Result<_>>()?,
    };
    for (i, f) in paths.iter().enumerate() {
        let start = proj(i, &spec.rho);
        if !f.starts_with(&start) {
            return Err(Error::Hypothesis(format!("oracle {i} does not extend pr_{i} of the starting string")));
        }
    }

    let mut word: TapeWord = spec.rho.clone();
    let mut j = spec.rho.last().map_or(0, |e| e.0);
    let mut tapes = vec![j];
    let mut commits = Vec::new();
    let mut transcript = Transcript::new("force");
    transcript.push(word.len(), "adversary", "declare", json!({ "tape": j }));
    let changes = |word: &TapeWord| -> Vec<usize> {
        let c = code(k, word);
        team.iter().map(|l| mcl(&l.trace(&c)).len()).collect()
    };
    let answer = |l: &SharedLearner, c: &[Sym]| -> Option<u64> {
        let e = l.guess(c);
        match m.run(&e, c, 0, spec.budget) {
            Ok(Outcome::Halted(v)) => Some(v.to_u64().unwrap_or(u64::MAX)),
            _ => None,
        }
    };
    let mut stall = None;
    let achieved = loop {
        let counts = changes(&word);
        if counts.iter().all(|&c| c >= spec.m) {
            break true;
        }
        let mut written = 0;
        let committed: Vec<usize> = loop {
            if written == spec.stall_limit {
                let c = code(k, &word);
                let kind = if team.iter().all(|l| answer(l, &c).is_none()) { "diverged" } else { "wrong-commit" };
                stall = Some(Stall { stage: word.len(), tape: j, kind: kind.into() });
                break Vec::new();
            }
            let pos = proj(j, &word).len();
            let Some(&sym) = paths[j].get(pos) else {
                stall = Some(Stall { stage: word.len(), tape: j, kind: "oracle-exhausted".into() });
                break Vec::new();
            };
            word.push((j, sym) as Entry);
            written += 1;
            let c = code(k, &word);
            let ch: Vec<usize> = team
                .iter()
                .enumerate()
                .filter(|(e, l)| {
                    answer(l, &c).is_some_and(|v| (v as usize) < k && bit(v as usize, e % t) == bit(j, e % t))
                })
                .map(|(e, _)| e)
                .collect();
            if !ch.is_empty() {
                break ch;
            }
        };
        if committed.is_empty() {
            let s = stall.as_ref().expect("stall recorded");
            transcript.push(s.stage, "adversary", "stall", json!({ "tape": s.tape, "kind": s.kind }));
            break false;
        }
        commits.push(word.len());
        let flip: usize = committed.iter().map(|e| 1 << (e % t)).fold(0, |a, b| a | b);
        transcript.push(word.len(), "team", "commit", json!({ "members": committed, "tape": j }));
        j ^= flip;
        tapes.push(j);
        transcript.push(word.len(), "adversary", "declare", json!({ "tape": j }));
    };
    let mind_changes = changes(&word);
    Ok(ForceOutcome {
        coded: code(k, &word),
        word,
        commits,
        tapes,
        mind_changes,
        achieved,
        stall,
        transcript,
    })
}

