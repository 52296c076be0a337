//! The piecewise reduction from `DNR_{k²}` to `DNR_k` along the `Π⁰₁` guards
//! `θ(g,v) = ∀u (Φ_u(u)↓ → g₁(z(v,u)) ≠ Φ_u(u))`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Piece, PiecewiseSchedule, ScheduleKind, Transcript};
use crate::kernel::{assemble, library, DiagCoding, Machine, MachineBuilder, Nat, Program};
use crate::learners::output_prefix;
use crate::trees::{dnr, BudgetSchedule, ClosedClass, DnrSpec};
use crate::word::{Sym, Word};

/// `(v, u) ↦ g₁(z(v,u))` where `g(n) = g₀(n)·k + g₁(n)`; freeze `k` and `v`.
fn gamma_program() -> Program {
    assemble(
        ".arity 3
  diag r3 r1 r2
  read r4 r3
  mod r5 r4 r0
  halt r5",
    )
    .expect("gamma assembles")
}

/// `v ↦ g₀(z(v,u_v))` for the least `u` with `Φ_u(u)` halting within `t` steps and
/// `g₁(z(v,u)) = Φ_u(u)`; freeze `k` and `t`.
fn delta_program() -> Program {
    assemble(
        ".arity 3
  set r3 0
  set r9 1
  set r10 0
loop:
  bound r4 r3 r3 r1 r10
  jz r4 next
  sub r4 r4 r9
  diag r5 r2 r3
  read r6 r5
  mod r7 r6 r0
  jeq r7 r4 found
next:
  add r3 r3 r9
  jmp loop
found:
  div r8 r6 r0
  halt r8",
    )
    .expect("delta assembles")
}

/// A machine with a few halting diagonals and the pairs `z(v,u)` for `v < 2`, `u < 3` in
/// slots 3..9, coded in base `k`.
pub fn dnr_square_machine(k: u64) -> Arc<Machine> {
    let mut b = MachineBuilder::new().coding(DiagCoding::Base(k));
    b.push("const1", library::constant(1)).expect("slot");
    b.push("loop", library::looping()).expect("slot");
    b.push("const0", library::constant(0)).expect("slot");
    for v in 0..2 {
        for u in 0..3 {
            b.push_diag(v, u).expect("slot");
        }
    }
    b.build()
}

/// Result of running the schedule on one prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareOutput {
    /// The active piece `v*`: least `v` whose guard is not refuted.
    pub piece: usize,
    /// `Δ(g;0), …, Δ(g;v*−1)`.
    pub delta_prefix: Word,
    /// `Γ_{v*}(g)` as far as the prefix allows.
    pub gamma_output: Word,
    /// `(v, u_v)` for each refuted guard.
    pub refutations: Vec<(u64, u64)>,
    pub dichotomy_checked: usize,
    pub dichotomy_failures: Vec<(u64, u64)>,
}

pub struct DnrSquare {
    machine: Arc<Machine>,
    k: u64,
    budget: u64,
    gamma: Nat,
    delta: Nat,
    diagonals: Mutex<HashMap<u64, Option<u64>>>,
    pub schedule: PiecewiseSchedule,
}

impl DnrSquare {
    pub fn machine(&self) -> &Arc<Machine> {
        &self.machine
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// `Φ_u(u)` within the budget.
    pub fn diagonal(&self, u: u64) -> Option<u64> {
        diagonal(&self.machine, &self.diagonals, u, self.budget)
    }

    pub fn gamma_index(&self, v: u64) -> Nat {
        self.machine.smn(&self.gamma, &[Nat::from(self.k), Nat::from(v)]).expect("gamma has arity 3")
    }

    pub fn delta_index(&self) -> Nat {
        self.machine.smn(&self.delta, &[Nat::from(self.k), Nat::from(self.budget)]).expect("delta has arity 3")
    }

    fn z(&self, v: u64, u: u64) -> Option<usize> {
        z(&self.machine, v, u)
    }

    /// The least falsifier `u_v` of `θ(g,v)` visible in `g`, searching `u` in order and giving
    /// up at the first halting `u` whose `z(v,u)` lies past the prefix.
    pub fn falsifier(&self, g: &[Sym], v: u64) -> Option<u64> {
        falsifier(&self.machine, &self.diagonals, self.k, self.budget, g, v)
    }

    /// `DNR_k` over this machine at the schedule's budget.
    pub fn target(&self) -> ClosedClass {
        dnr(
            self.machine.clone(),
            &DnrSpec { k: self.k, m: 1, oracle: vec![], schedule: BudgetSchedule::Fixed(self.budget) },
        )
    }

    /// `DNR_{k²}` over this machine at the schedule's budget.
    pub fn source(&self) -> ClosedClass {
        dnr(
            self.machine.clone(),
            &DnrSpec { k: self.k * self.k, m: 1, oracle: vec![], schedule: BudgetSchedule::Fixed(self.budget) },
        )
    }

    /// Runs the schedule on `g` with the kernel programs `Γ_v` and `Δ`.
    pub fn apply(&self, g: &[Sym]) -> SquareOutput {
        let mut refutations = Vec::new();
        let mut delta_prefix = Vec::new();
        let mut v = 0u64;
        let delta = self.delta_index();
        while let Some(u) = self.falsifier(g, v) {
            refutations.push((v, u));
            let d = self.machine.run(&delta, g, v, 1 << 20).ok().and_then(|o| o.halted_u64());
            delta_prefix.push(d.unwrap_or(u64::MAX));
            v += 1;
        }
        let gamma_output = output_prefix(&self.machine, &self.gamma_index(v), g, 1 << 16, g.len());
        let (dichotomy_checked, dichotomy_failures) = self.dichotomy(g);
        SquareOutput { piece: v as usize, delta_prefix, gamma_output, refutations, dichotomy_checked, dichotomy_failures }
    }

    /// Checks `g₀(z(v,u)) ≠ Φ_v(v) ∨ g₁(z(v,u)) ≠ Φ_u(u)` at every pair with both diagonals
    /// halting and `z(v,u)` inside `g`.
    pub fn dichotomy(&self, g: &[Sym]) -> (usize, Vec<(u64, u64)>) {
        let mut checked = 0;
        let mut bad = Vec::new();
        for v in 0..g.len() as u64 {
            let Some(dv) = self.diagonal(v) else { continue };
            for u in 0..g.len() as u64 {
                let Some(du) = self.diagonal(u) else { continue };
                let Some(z) = self.z(v, u).filter(|&z| z < g.len()) else { continue };
                checked += 1;
                if g[z] / self.k == dv && g[z] % self.k == du {
                    bad.push((v, u));
                }
            }
        }
        (checked, bad)
    }

    /// The transcript of one application.
    pub fn transcript(&self, g: &[Sym]) -> Transcript {
        let out = self.apply(g);
        let mut t = Transcript::new("dnr-square");
        for (i, &(v, u)) in out.refutations.iter().enumerate() {
            t.push(i, format!("guard {v}"), "refuted", json!({ "u": u, "delta": out.delta_prefix[i] }));
        }
        t.push(
            out.refutations.len(),
            format!("piece {}", out.piece),
            "active",
            json!({ "gamma": out.gamma_output, "dichotomy_checked": out.dichotomy_checked }),
        );
        t
    }
}

fn z(m: &Machine, v: u64, u: u64) -> Option<usize> {
    m.diag_pair(&Nat::from(v), &Nat::from(u)).to_u64().map(|z| z as usize)
}

fn diagonal(m: &Machine, cache: &Mutex<HashMap<u64, Option<u64>>>, u: u64, budget: u64) -> Option<u64> {
    if let Some(&d) = cache.lock().unwrap().get(&u) {
        return d;
    }
    let d = m.run(&Nat::from(u), &[], u, budget).ok().and_then(|o| o.halted_u64());
    cache.lock().unwrap().insert(u, d);
    d
}

fn falsifier(
    m: &Machine,
    cache: &Mutex<HashMap<u64, Option<u64>>>,
    k: u64,
    budget: u64,
    g: &[Sym],
    v: u64,
) -> Option<u64> {
    for u in 0..=g.len() as u64 {
        let Some(du) = diagonal(m, cache, u, budget) else { continue };
        let z = z(m, v, u).filter(|&z| z < g.len())?;
        if g[z] % k == du {
            return Some(u);
        }
    }
    None
}

/// The strictly-along-`Π⁰₁` schedule: piece `v` is `Γ_v` guarded by "`θ(g,w)` refuted for
/// `w < v` and `θ(g,v)` not yet refuted"; `Δ` supplies the values at refuted guards.
/// Pieces run up to the first `v` with no `z(v,u)` below `depth`.
pub fn dnr_square_reduction(machine: Arc<Machine>, k: u64, budget: u64, depth: usize) -> DnrSquare {
    let gamma = gamma_program().encode();
    let delta = delta_program().encode();
    let mut top = 0u64;
    while z(&machine, top, 0).is_some_and(|z| z < depth) {
        top += 1;
    }
    let pieces = (0..=top)
        .map(|v| Piece {
            guard: format!("theta(g,w) refuted for w < {v}; theta(g,{v}) open"),
            program: machine.smn(&gamma, &[Nat::from(k), Nat::from(v)]).expect("gamma has arity 3"),
        })
        .collect();
    let m = machine.clone();
    let cache = Arc::new(Mutex::new(HashMap::new()));
    let c = cache.clone();
    let schedule = PiecewiseSchedule::new(ScheduleKind::StrictlyAlongPi01, pieces, move |g| {
        let open: Vec<bool> = (0..=top).map(|v| falsifier(&m, &c, k, budget, g, v).is_none()).collect();
        (0..=top as usize).filter(|&v| open[v] && open[..v].iter().all(|o| !o)).collect()
    });
    DnrSquare { machine, k, budget, gamma, delta, diagonals: Mutex::new(HashMap::new()), schedule }
}
