//! Executable cores of constructive arguments: learner constructions, piecewise reductions,
//! extraction procedures, stagewise constructions and forcing adversaries.
//!
//! Every construction records a [`Transcript`] of JSON lines with the fields
//! `stage`, `actor`, `action` and `delta`.

pub mod dnr_square;
pub mod force;
pub mod homog;
pub mod hyper;
pub mod noncup;
pub mod priority;
pub mod sigma2;
pub mod timekeeper;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::kernel::Nat;
use crate::learners::Counterexample;
use crate::word::{Sym, Word};

pub use dnr_square::{dnr_square_machine, dnr_square_reduction, DnrSquare, SquareOutput};
pub use force::{force_mind_changes, leftmost_path, ForceOutcome, ForceSpec, Stall};
pub use homog::{homog_collapse_learner, homog_fixture_machine, HomogCollapse};
pub use hyper::{hyper_fixture_psi, hyperconcat_learner, HyperConfig, HyperLearner, HyperStatus};
pub use noncup::{noncup_extract, Extraction, ExtractRound};
pub use priority::{priority_hat, team_root, PriorityRun, Snapshot, TeamState};
pub use sigma2::{sigma2_union_learner, Sigma2Learner};
pub use timekeeper::{timekeeper_build, TimekeeperRun};

/// One line of a construction transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub stage: usize,
    pub actor: String,
    pub action: String,
    pub delta: Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub name: String,
    pub events: Vec<Event>,
}

impl Transcript {
    pub fn new(name: impl Into<String>) -> Transcript {
        Transcript { name: name.into(), events: Vec::new() }
    }

    pub fn push(&mut self, stage: usize, actor: impl Into<String>, action: impl Into<String>, delta: Value) {
        self.events.push(Event { stage, actor: actor.into(), action: action.into(), delta });
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn json_lines(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            s.push_str(&serde_json::to_string(e).expect("event serializes"));
            s.push('\n');
        }
        s
    }
}

/// How the guards of a piecewise schedule are layered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    FinitePi01,
    FinitePi01Pair,
    FiniteDelta02,
    StrictlyAlongPi01,
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScheduleKind::FinitePi01 => "finite-Pi01",
            ScheduleKind::FinitePi01Pair => "finite-(Pi01)2",
            ScheduleKind::FiniteDelta02 => "finite-Delta02",
            ScheduleKind::StrictlyAlongPi01 => "strictly-along-Pi01",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub guard: String,
    pub program: Nat,
}

type Selector = Arc<dyn Fn(&[Sym]) -> Vec<usize> + Send + Sync>;

/// A finite list of guarded programs; `active` evaluates the guards on a stream prefix.
#[derive(Clone)]
pub struct PiecewiseSchedule {
    pub kind: ScheduleKind,
    pub pieces: Vec<Piece>,
    selector: Selector,
}

impl fmt::Debug for PiecewiseSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PiecewiseSchedule").field("kind", &self.kind).field("pieces", &self.pieces).finish()
    }
}

impl PiecewiseSchedule {
    pub fn new(
        kind: ScheduleKind,
        pieces: Vec<Piece>,
        selector: impl Fn(&[Sym]) -> Vec<usize> + Send + Sync + 'static,
    ) -> PiecewiseSchedule {
        PiecewiseSchedule { kind, pieces, selector: Arc::new(selector) }
    }

    /// Pieces whose guards hold on `g` at the desk horizon.
    pub fn active(&self, g: &[Sym]) -> Vec<usize> {
        (self.selector)(g)
    }

    /// Streams on which the number of active pieces is not exactly one.
    pub fn check(&self, sample: &[Word]) -> Vec<Counterexample> {
        sample
            .iter()
            .filter_map(|g| {
                let a = self.active(g);
                (a.len() != 1).then(|| Counterexample { stream: g.clone(), reason: format!("active pieces {a:?}") })
            })
            .collect()
    }
}
