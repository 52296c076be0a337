use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{Alphabet, ClosedClass};
use crate::kernel::{Machine, Nat, Outcome};
use crate::pairing::untuple;
use crate::word::Word;

/// Kernel budget used when testing a word of a given length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BudgetSchedule {
    /// `scale · |σ|` steps.
    Depth(u64),
    /// A fixed number of steps at every depth.
    Fixed(u64),
}

impl BudgetSchedule {
    pub fn at(&self, depth: usize) -> u64 {
        match *self {
            BudgetSchedule::Depth(scale) => scale.saturating_mul(depth as u64),
            BudgetSchedule::Fixed(b) => b,
        }
    }
}

impl Default for BudgetSchedule {
    fn default() -> Self {
        BudgetSchedule::Depth(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnrSpec {
    pub k: u64,
    pub m: usize,
    pub oracle: Word,
    pub schedule: BudgetSchedule,
}

impl DnrSpec {
    pub fn new(k: u64) -> DnrSpec {
        DnrSpec { k, m: 1, oracle: Vec::new(), schedule: BudgetSchedule::default() }
    }
}

/// Halting time and value of `Φ_e(α; p)`, recorded at the largest budget tried so far.
#[derive(Clone, Copy)]
struct Probe {
    budget: u64,
    halt: Option<(u64, u64)>,
}

/// `DNR_{m/k}(α)`: at position `p = ⟨e₀..e_{m−1}⟩` avoid every `Φ_{e_i}(α; p)` that halts within
/// the schedule's budget for the word's length.
pub fn dnr(machine: Arc<Machine>, spec: &DnrSpec) -> ClosedClass {
    let spec = spec.clone();
    let k = spec.k;
    let label = match (spec.m, spec.oracle.is_empty()) {
        (1, true) => format!("dnr {k}"),
        (m, true) => format!("dnr {k} {m}"),
        (m, false) => format!("dnr {k} {m} {:?}", spec.oracle),
    };
    let cache: Arc<Mutex<HashMap<(u64, u64), Probe>>> = Arc::new(Mutex::new(HashMap::new()));
    let diag = move |e: u64, p: u64, budget: u64| -> Option<u64> {
        if let Some(pr) = cache.lock().unwrap().get(&(e, p)) {
            match pr.halt {
                Some((steps, v)) => return (steps <= budget).then_some(v),
                None if budget <= pr.budget => return None,
                None => {}
            }
        }
        let halt = match machine.run_stats(&Nat::from(e), &spec.oracle, Nat::from(p), budget) {
            Ok(st) => match st.outcome {
                Outcome::Halted(v) => Some((st.steps, v.to_u64().unwrap_or(u64::MAX))),
                _ => None,
            },
            Err(_) => None,
        };
        cache.lock().unwrap().insert((e, p), Probe { budget, halt });
        halt.map(|(_, v)| v)
    };
    let m = spec.m.max(1);
    let schedule = spec.schedule;
    ClosedClass::new(label, Alphabet::Plain, move |_| k, move |w| {
        let budget = schedule.at(w.len());
        w.iter().enumerate().all(|(p, &s)| {
            untuple(p as u64, m).into_iter().all(|e| diag(e, p as u64, budget) != Some(s))
        })
    })
}
