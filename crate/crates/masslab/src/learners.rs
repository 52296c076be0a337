//! Learners, run traces, finite-horizon verifiers for the `(α,β|γ)` classes and a Popperian probe.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::disjunction::decode;
use crate::error::{Error, Result};
use crate::kernel::{library, Machine, Nat, Outcome};
use crate::trees::ClosedClass;
use crate::word::{Sym, Word};

/// A total map from finite observations to program indices.
pub trait Learner: Send + Sync {
    fn name(&self) -> String;

    fn guess(&self, prefix: &[Sym]) -> Nat;

    /// Guesses on `g↾0, …, g↾|g|`.
    fn trace(&self, g: &[Sym]) -> Vec<Nat> {
        (0..=g.len()).map(|n| self.guess(&g[..n])).collect()
    }
}

pub type SharedLearner = Arc<dyn Learner>;

impl fmt::Debug for dyn Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Learner({})", self.name())
    }
}

/// Always the same index.
pub struct Constant(pub Nat);

impl Learner for Constant {
    fn name(&self) -> String {
        format!("const {}", self.0)
    }

    fn guess(&self, _: &[Sym]) -> Nat {
        self.0.clone()
    }
}

/// Alternates between two indices with the prefix length.
pub struct Alternating(pub Nat, pub Nat);

impl Learner for Alternating {
    fn name(&self) -> String {
        format!("alternating {} {}", self.0, self.1)
    }

    fn guess(&self, prefix: &[Sym]) -> Nat {
        if prefix.len() % 2 == 0 { self.0.clone() } else { self.1.clone() }
    }
}

/// A learner given by a closure.
#[derive(Clone)]
pub struct FnLearner {
    name: String,
    f: Arc<dyn Fn(&[Sym]) -> Nat + Send + Sync>,
}

impl FnLearner {
    pub fn new(name: impl Into<String>, f: impl Fn(&[Sym]) -> Nat + Send + Sync + 'static) -> FnLearner {
        FnLearner { name: name.into(), f: Arc::new(f) }
    }
}

impl Learner for FnLearner {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn guess(&self, prefix: &[Sym]) -> Nat {
        (self.f)(prefix)
    }
}

/// On a `k`-tape word, guesses the constant program naming the tape of the last entry.
pub fn echo_tape(k: usize) -> FnLearner {
    FnLearner::new(format!("echo {k}"), move |w| {
        let tape = decode(k, w).last().map_or(0, |e| e.0 as u64);
        library::constant(tape).encode()
    })
}

/// `Φ_e(σ; 0), Φ_e(σ; 1), …` until the first position that does not halt within `budget`.
pub fn output_prefix(m: &Machine, e: &Nat, oracle: &[Sym], budget: u64, max_len: usize) -> Word {
    let mut out = Vec::new();
    while out.len() < max_len {
        match m.run_stats(e, oracle, Nat::from(out.len() as u64), budget) {
            Ok(st) => match st.outcome {
                Outcome::Halted(v) => out.push(v.to_u64().unwrap_or(u64::MAX)),
                _ => break,
            },
            Err(_) => break,
        }
    }
    out
}

/// `{m < n : guess(g↾m+1) ≠ guess(g↾m)}`.
pub fn mcl(guesses: &[Nat]) -> Vec<usize> {
    guesses.windows(2).enumerate().filter(|(_, w)| w[0] != w[1]).map(|(m, _)| m).collect()
}

/// Distinct guesses in order of first appearance.
pub fn indx(guesses: &[Nat]) -> Vec<Nat> {
    let mut seen = BTreeSet::new();
    guesses.iter().filter(|g| seen.insert((*g).clone())).cloned().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub stage: usize,
    pub guess: Nat,
    pub mc: usize,
    pub output_len: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Refuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTrace {
    pub learner: String,
    pub stream: Word,
    pub guesses: Vec<Nat>,
    pub mcl: Vec<usize>,
    pub indx: Vec<Nat>,
    pub stages: Vec<Stage>,
    /// `Φ_{last guess}(g)` as far as the budget allows.
    pub output: Word,
    pub verdict: Verdict,
}

impl RunTrace {
    pub fn mind_changes(&self) -> usize {
        self.mcl.len()
    }

    pub fn last_guess(&self) -> &Nat {
        self.guesses.last().expect("a trace has at least the empty prefix")
    }

    /// The last mind change happened at least `k` stages before the horizon.
    pub fn converged(&self, k: usize) -> bool {
        self.mcl.last().map_or(true, |&m| self.stream.len() - (m + 1) >= k)
    }

    pub fn json_lines(&self) -> String {
        let mut s = String::new();
        for st in &self.stages {
            s.push_str(&serde_json::to_string(st).expect("stage serializes"));
            s.push('\n');
        }
        s
    }
}

/// Runs `l` on every prefix of `g` and checks each stage's output against `target`.
pub fn simulate(m: &Machine, l: &dyn Learner, g: &[Sym], target: &ClosedClass, budget: u64) -> RunTrace {
    let guesses = l.trace(g);
    let changes = mcl(&guesses);
    let verdict_of = |w: &Word| if target.contains(w) { Verdict::Consistent } else { Verdict::Refuted };
    let stages = (0..=g.len())
        .map(|s| {
            let out = output_prefix(m, &guesses[s], &g[..s], budget, s);
            Stage {
                stage: s,
                guess: guesses[s].clone(),
                mc: changes.iter().filter(|&&c| c < s).count(),
                output_len: out.len(),
                verdict: verdict_of(&out),
            }
        })
        .collect();
    let output = output_prefix(m, guesses.last().unwrap(), g, budget, g.len());
    RunTrace {
        learner: l.name(),
        stream: g.to_vec(),
        indx: indx(&guesses),
        mcl: changes,
        verdict: verdict_of(&output),
        output,
        stages,
        guesses,
    }
}

/// The finite-horizon classes a witness can be checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// `(1,1)`: one program.
    Medvedev,
    /// `(1,<ω)`: a learner with at most `b` mind changes.
    MindChanges(usize),
    /// `(1,ω|<ω)`: a learner predicting at most `b` indices.
    Indices(usize),
    /// `(1,ω)`: a learner that converges.
    Limit,
    /// `(<ω,1)`: `b` programs, one of which works.
    Programs(usize),
    /// `(<ω,ω)`: `b` learners, one of which converges correctly.
    Team(usize),
}

impl Kind {
    pub fn name(&self) -> String {
        match self {
            Kind::Medvedev => "(1,1)".into(),
            Kind::MindChanges(b) => format!("(1,<w,{b})"),
            Kind::Indices(b) => format!("(1,w|<w,{b})"),
            Kind::Limit => "(1,w)".into(),
            Kind::Programs(b) => format!("(<w,1,{b})"),
            Kind::Team(b) => format!("(<w,w,{b})"),
        }
    }
}

#[derive(Clone)]
pub enum Witness {
    Program(Nat),
    Learner(SharedLearner),
    Programs(Vec<Nat>),
    Team(Vec<SharedLearner>),
}

impl Witness {
    fn shape(&self) -> &'static str {
        match self {
            Witness::Program(_) => "program",
            Witness::Learner(_) => "learner",
            Witness::Programs(_) => "program list",
            Witness::Team(_) => "learner team",
        }
    }

    /// As a list of learners: a program is a constant learner, a list of programs a team of them.
    fn as_team(&self) -> Vec<SharedLearner> {
        match self {
            Witness::Program(e) => vec![Arc::new(Constant(e.clone()))],
            Witness::Learner(l) => vec![l.clone()],
            Witness::Programs(es) => es.iter().map(|e| Arc::new(Constant(e.clone())) as SharedLearner).collect(),
            Witness::Team(ls) => ls.clone(),
        }
    }

    fn single(&self, kind: Kind) -> Result<SharedLearner> {
        match self {
            Witness::Program(_) | Witness::Learner(_) => Ok(self.as_team().remove(0)),
            _ => Err(Error::WitnessKind(format!("{} needs one program or learner, got a {}", kind.name(), self.shape()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub stream: Word,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    /// Convergence window used.
    pub k: usize,
    pub budget: u64,
    pub streams: usize,
    pub passed: usize,
    pub failures: Vec<Counterexample>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Settings shared by the verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub budget: u64,
    /// A learner counts as converged when its last mind change is at least `k` stages old.
    pub k: usize,
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon { budget: 1000, k: 1 }
    }
}

fn judge(m: &Machine, l: &dyn Learner, g: &[Sym], target: &ClosedClass, h: Horizon) -> (RunTrace, Option<String>) {
    let t = simulate(m, l, g, target, h.budget);
    let why = if !t.converged(h.k) {
        Some(format!("{} has not converged", l.name()))
    } else if t.verdict == Verdict::Refuted {
        Some(format!("output {:?} of {} leaves {}", t.output, t.last_guess(), target.label()))
    } else {
        None
    };
    (t, why)
}

/// Checks the side conditions of `kind` on every sampled stream.
pub fn verify_class(
    m: &Machine,
    kind: Kind,
    witness: &Witness,
    sample: &[Word],
    source: &ClosedClass,
    target: &ClosedClass,
    h: Horizon,
) -> Result<Report> {
    let mut failures = Vec::new();
    let fail = |failures: &mut Vec<Counterexample>, g: &Word, reason: String| {
        failures.push(Counterexample { stream: g.clone(), reason })
    };
    match (kind, witness) {
        (Kind::Programs(0) | Kind::Team(0), _) => {
            return Err(Error::WitnessKind("team size must be positive".into()));
        }
        (Kind::Programs(_), Witness::Learner(_) | Witness::Team(_)) => {
            return Err(Error::WitnessKind(format!("{} needs programs, got a {}", kind.name(), witness.shape())));
        }
        (Kind::Programs(b) | Kind::Team(b), _) if witness.as_team().len() > b => {
            return Err(Error::WitnessKind(format!(
                "{} allows {b} members, witness has {}",
                kind.name(),
                witness.as_team().len()
            )));
        }
        (Kind::Medvedev, w) if !matches!(w, Witness::Program(_)) => {
            return Err(Error::WitnessKind(format!("(1,1) needs a program, got a {}", w.shape())));
        }
        (Kind::MindChanges(_) | Kind::Indices(_) | Kind::Limit, _) => {
            witness.single(kind)?;
        }
        _ => {}
    }
    for g in sample {
        if !source.contains(g) {
            fail(&mut failures, g, format!("stream is not in {}", source.label()));
            continue;
        }
        match kind {
            Kind::Medvedev => {
                let Witness::Program(e) = witness else { unreachable!("checked above") };
                let out = output_prefix(m, &e, g, h.budget, g.len());
                if !target.contains(&out) {
                    fail(&mut failures, g, format!("output {out:?} leaves {}", target.label()));
                }
            }
            Kind::MindChanges(_) | Kind::Indices(_) | Kind::Limit => {
                let l = witness.single(kind)?;
                let (t, why) = judge(m, l.as_ref(), g, target, h);
                let bound = match kind {
                    Kind::MindChanges(b) if t.mind_changes() > b => Some(format!("{} mind changes > {b}", t.mind_changes())),
                    Kind::Indices(b) if t.indx.len() > b => Some(format!("{} indices > {b}", t.indx.len())),
                    _ => None,
                };
                if let Some(r) = bound.or(why) {
                    fail(&mut failures, g, r);
                }
            }
            Kind::Programs(_) | Kind::Team(_) => {
                let team = witness.as_team();
                let ok = team.iter().any(|l| judge(m, l.as_ref(), g, target, h).1.is_none());
                if !ok {
                    fail(&mut failures, g, format!("no member of the {}-member team succeeds", team.len()));
                }
            }
        }
    }
    Ok(Report {
        kind: kind.name(),
        k: h.k,
        budget: h.budget,
        streams: sample.len(),
        passed: sample.len() - failures.iter().map(|c| &c.stream).collect::<BTreeSet<_>>().len(),
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum Probe {
    NotYetFalsified,
    StallObserved { position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub horizon: u64,
    pub results: Vec<(Word, Probe)>,
}

impl ProbeReport {
    pub fn stalls(&self) -> usize {
        self.results.iter().filter(|r| matches!(r.1, Probe::StallObserved { .. })).count()
    }
}

/// For each stream, asks whether the final guess produces every output position below `|g|`
/// within `horizon` steps. A miss is a stall; otherwise the stream is "not yet falsified".
pub fn popperian_probe(m: &Machine, l: &dyn Learner, sample: &[Word], horizon: u64) -> ProbeReport {
    let results = sample
        .iter()
        .map(|g| {
            let e = l.guess(g);
            let out = output_prefix(m, &e, g, horizon, g.len());
            let p = if out.len() < g.len() {
                Probe::StallObserved { position: out.len() }
            } else {
                Probe::NotYetFalsified
            };
            (g.clone(), p)
        })
        .collect();
    ProbeReport { horizon, results }
}

/// Verdicts along `(1,1) ⇒ (1,<ω,b) ⇒ (1,ω|<ω,b+1) ⇒ (1,ω)` for one witness. A program is
/// coerced to a constant learner for the learner kinds; a learner has no `(1,1)` verdict.
pub fn implication_chain(
    m: &Machine,
    witness: &Witness,
    b: usize,
    sample: &[Word],
    source: &ClosedClass,
    target: &ClosedClass,
    h: Horizon,
) -> Result<Vec<(Kind, bool)>> {
    let learner = Witness::Learner(witness.single(Kind::Limit)?);
    let mut out = Vec::new();
    if let Witness::Program(_) = witness {
        out.push((Kind::Medvedev, verify_class(m, Kind::Medvedev, witness, sample, source, target, h)?.pass()));
    }
    for kind in [Kind::MindChanges(b), Kind::Indices(b + 1), Kind::Limit] {
        out.push((kind, verify_class(m, kind, &learner, sample, source, target, h)?.pass()));
    }
    Ok(out)
}

/// Every pass in the chain is followed by a pass.
pub fn chain_holds(chain: &[(Kind, bool)]) -> bool {
    chain.windows(2).all(|w| !w[0].1 || w[1].1)
}
