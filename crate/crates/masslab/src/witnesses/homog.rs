//! The learner that turns `b` programs, one of which always lands in a homogeneous class `S`,
//! into one learner with at most `b` mind changes.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Transcript;
use crate::kernel::{assemble, Machine, MachineBuilder, Nat, Program};
use crate::learners::Learner;
use crate::pairing::pair;
use crate::trees::ClosedClass;
use crate::word::Sym;

/// Slot `e < b` reads column `e` of a stream laid out as `g(b·x + e)`.
pub fn homog_fixture_machine(b: usize) -> Arc<Machine> {
    let mut m = MachineBuilder::new();
    for e in 0..b {
        let p = assemble(&format!("set r1 {b}\nmul r2 r0 r1\nset r3 {e}\nadd r2 r2 r3\nread r4 r2\nhalt r4"))
            .expect("column reader assembles");
        m.push(&format!("column{e}"), p).expect("slot");
    }
    m.build()
}

/// `(b, A, x) ↦ Φ_e(g↾t; x)` for the least `⟨e,t⟩` with `e < b`, bit `e` of `A` set and
/// `Φ_e(g↾t; x)` halting within `t` steps.
fn delta_program() -> Program {
    assemble(
        ".arity 3
  set r3 0
  set r10 1
  set r11 2
loop:
  left r4 r3
  right r5 r3
  jlt r4 r0 inrange
  jmp next
inrange:
  set r6 1
  set r7 0
pow:
  jeq r7 r4 powdone
  mul r6 r6 r11
  add r7 r7 r10
  jmp pow
powdone:
  div r8 r1 r6
  mod r8 r8 r11
  jz r8 next
  bound r9 r4 r2 r5 r5
  jz r9 next
  sub r9 r9 r10
  halt r9
next:
  add r3 r3 r10
  jmp loop",
    )
    .expect("delta assembles")
}

/// One replay of the challenge procedure on a stream prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseRun {
    /// `A_s` in force at each prefix `g↾0 … g↾|g|`.
    pub candidates: Vec<Vec<usize>>,
    /// `(stage u, removed e(x), witness x)`.
    pub removals: Vec<(usize, usize, usize)>,
    /// Set when every candidate was removed, which the hypothesis rules out.
    pub violation: Option<String>,
}

pub struct HomogCollapse {
    machine: Arc<Machine>,
    b: usize,
    s: ClosedClass,
    delta: Nat,
}

type Halts = HashMap<(usize, u64), Option<(usize, u64)>>;

impl HomogCollapse {
    pub fn b(&self) -> usize {
        self.b
    }

    pub fn machine(&self) -> &Arc<Machine> {
        &self.machine
    }

    pub fn target(&self) -> &ClosedClass {
        &self.s
    }

    /// The index of `Δ` for the candidate set `a`.
    pub fn index_for(&self, a: &[usize]) -> Nat {
        let mask: u64 = a.iter().map(|&e| 1u64 << e).sum();
        self.machine.smn(&self.delta, &[Nat::from(self.b as u64), Nat::from(mask)]).expect("delta has arity 3")
    }

    /// Least `t ≤ n` with `Φ_e(g↾t; x)` halting within `t` steps, and its value.
    fn t_min(&self, halts: &mut Halts, g: &[Sym], e: usize, x: u64) -> Option<(usize, u64)> {
        if let Some(&r) = halts.get(&(e, x)) {
            return r;
        }
        let r = (0..=g.len()).find_map(|t| {
            self.machine
                .run(&Nat::from(e as u64), &g[..t], x, t as u64)
                .ok()
                .and_then(|o| o.halted_u64())
                .map(|v| (t, v))
        });
        halts.insert((e, x), r);
        r
    }

    /// `Δ(g↾u; x)` for candidates `a`: the value and the `e(x)` it came from, when the search
    /// settles before any `⟨e, t⟩` with `t > u` is tried.
    fn delta_at(&self, halts: &mut Halts, g: &[Sym], u: usize, a: &[usize], x: u64) -> Option<(u64, usize)> {
        let best = a
            .iter()
            .filter_map(|&e| self.t_min(halts, g, e, x).filter(|&(t, _)| t <= u).map(|(t, v)| (pair(e as u64, t as u64), e, v)))
            .min()?;
        let clear = a.iter().all(|&e| pair(e as u64, u as u64 + 1) > best.0);
        clear.then_some((best.2, best.1))
    }

    /// Runs the challenges along `g`: at each stage the least `x` whose `Δ` value leaves `S`
    /// removes `e(x)`.
    pub fn replay(&self, g: &[Sym]) -> CollapseRun {
        let mut a: Vec<usize> = (0..self.b).collect();
        let mut candidates = vec![a.clone()];
        let mut removals = Vec::new();
        let mut violation = None;
        let mut halts = Halts::new();
        for u in 1..=g.len() {
            let mut out = Vec::new();
            let mut x = 0u64;
            while let Some((v, e)) = self.delta_at(&mut halts, g, u, &a, x) {
                out.push(v);
                if !self.s.contains(&out) {
                    a.retain(|&c| c != e);
                    removals.push((u, e, x as usize));
                    break;
                }
                x += 1;
            }
            if a.is_empty() && violation.is_none() {
                violation = Some(format!("no candidate below {} survives at stage {u}", self.b));
            }
            candidates.push(a.clone());
        }
        CollapseRun { candidates, removals, violation }
    }

    pub fn transcript(&self, g: &[Sym]) -> Transcript {
        let run = self.replay(g);
        let mut t = Transcript::new("homog-collapse");
        t.push(0, "learner", "challenge", json!({ "candidates": run.candidates[0] }));
        for &(u, e, x) in &run.removals {
            t.push(u, "learner", "remove", json!({ "e": e, "x": x, "candidates": run.candidates[u] }));
        }
        if let Some(v) = &run.violation {
            t.push(g.len(), "learner", "hypothesis-violated", json!({ "reason": v }));
        }
        t
    }
}

impl Learner for HomogCollapse {
    fn name(&self) -> String {
        format!("homog-collapse {} {}", self.b, self.s.label())
    }

    fn guess(&self, prefix: &[Sym]) -> Nat {
        let run = self.replay(prefix);
        self.index_for(run.candidates.last().expect("nonempty"))
    }

    fn trace(&self, g: &[Sym]) -> Vec<Nat> {
        let run = self.replay(g);
        let mut memo: HashMap<Vec<usize>, Nat> = HashMap::new();
        run.candidates.iter().map(|a| memo.entry(a.clone()).or_insert_with(|| self.index_for(a)).clone()).collect()
    }
}

/// The challenge learner for programs `0..b` of `machine` and target `S`.
pub fn homog_collapse_learner(machine: Arc<Machine>, b: usize, s: ClosedClass) -> HomogCollapse {
    HomogCollapse { machine, b, s, delta: delta_program().encode() }
}
