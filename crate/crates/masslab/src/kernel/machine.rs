//! Program registry and the step-counting interpreter.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::nat::Nat;
use super::program::{Instr, Program, Reg};
use crate::error::{Error, Result};

/// Indices below this bound name registry slots; larger indices are Gödel numbers.
pub const SLOT_LIMIT: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", content = "value")]
pub enum Outcome {
    Halted(Nat),
    StillRunning,
    OracleOutOfRange,
}

impl Outcome {
    pub fn halted(&self) -> Option<&Nat> {
        match self {
            Outcome::Halted(v) => Some(v),
            _ => None,
        }
    }

    pub fn halted_u64(&self) -> Option<u64> {
        self.halted().and_then(Nat::to_u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub outcome: Outcome,
    pub steps: u64,
    /// Highest oracle position read, if any.
    pub max_read: Option<usize>,
}

/// A registry-resident functional implemented outside the instruction set.
pub trait Native: Send + Sync {
    fn name(&self) -> &str;
    fn arity(&self) -> u32;
    /// Runs on `args` with oracle `oracle` using at most `budget` steps.
    fn call(&self, m: &Machine, oracle: &[u64], args: &[Nat], budget: u64) -> RunStats;
}

#[derive(Clone)]
pub enum Slot {
    Code(Arc<Program>),
    Native(Arc<dyn Native>),
}

impl fmt::Debug for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Code(p) => write!(f, "Code({} instrs)", p.code.len()),
            Slot::Native(n) => write!(f, "Native({})", n.name()),
        }
    }
}

/// How `z(v,u)` combines the two diagonal values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagCoding {
    /// Cantor pairing `⟨a,b⟩`.
    Cantor,
    /// `a·k + b` when both are below `k`, otherwise `k²`.
    Base(u64),
}

/// An immutable program registry plus the Gödel numbering for everything else.
pub struct Machine {
    slots: Vec<(String, Slot)>,
    diag: HashMap<(Nat, Nat), u64>,
    coding: DiagCoding,
    cache: RwLock<HashMap<Nat, Arc<Program>>>,
}

impl fmt::Debug for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Machine")
            .field("slots", &self.slots.len())
            .field("coding", &self.coding)
            .finish()
    }
}

#[derive(Clone)]
pub struct MachineBuilder {
    slots: Vec<(String, Slot)>,
    diag: HashMap<(Nat, Nat), u64>,
    coding: DiagCoding,
}

impl Default for MachineBuilder {
    fn default() -> Self {
        MachineBuilder { slots: Vec::new(), diag: HashMap::new(), coding: DiagCoding::Cantor }
    }
}

impl MachineBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn coding(mut self, coding: DiagCoding) -> Self {
        self.coding = coding;
        self
    }

    pub fn next_index(&self) -> u64 {
        self.slots.len() as u64
    }

    fn check_room(&self) -> Result<()> {
        if self.slots.len() as u64 >= SLOT_LIMIT {
            return Err(Error::Resource(format!("registry full ({SLOT_LIMIT} slots)")));
        }
        Ok(())
    }

    pub fn push(&mut self, name: &str, program: Program) -> Result<u64> {
        self.check_room()?;
        program.validate()?;
        self.slots.push((name.to_string(), Slot::Code(Arc::new(program))));
        Ok(self.slots.len() as u64 - 1)
    }

    pub fn push_native(&mut self, native: Arc<dyn Native>) -> Result<u64> {
        self.check_room()?;
        self.slots.push((native.name().to_string(), Slot::Native(native)));
        Ok(self.slots.len() as u64 - 1)
    }

    /// Reserves the next slot as `z(v,u)`: the slot holds the diagonal-pair program for `(v,u)`.
    pub fn push_diag(&mut self, v: u64, u: u64) -> Result<u64> {
        let z = diag_program(self.coding, &Nat::from(v), &Nat::from(u));
        let idx = self.push(&format!("z({v},{u})"), z)?;
        self.diag.insert((Nat::from(v), Nat::from(u)), idx);
        Ok(idx)
    }

    pub fn build(self) -> Arc<Machine> {
        Arc::new(Machine {
            slots: self.slots,
            diag: self.diag,
            coding: self.coding,
            cache: RwLock::new(HashMap::new()),
        })
    }
}

#[derive(Clone)]
pub enum Resolved {
    Code(Arc<Program>),
    Native(Arc<dyn Native>),
}

impl Resolved {
    pub fn arity(&self) -> u32 {
        match self {
            Resolved::Code(p) => p.arity,
            Resolved::Native(n) => n.arity(),
        }
    }
}

struct Frame {
    prog: Arc<Program>,
    pc: usize,
    regs: Vec<Nat>,
    olen: usize,
    deadline: u64,
    ret: Ret,
}

#[derive(Clone, Copy)]
enum Ret {
    Top,
    Eval(Reg),
    Bound(Reg),
}

impl Frame {
    fn get(&self, r: Reg) -> Nat {
        self.regs.get(r as usize).cloned().unwrap_or_default()
    }

    fn get_small(&self, r: Reg) -> u64 {
        self.regs.get(r as usize).map_or(0, |v| v.to_u64().unwrap_or(u64::MAX))
    }

    fn set(&mut self, r: Reg, v: Nat) {
        let r = r as usize;
        if r >= self.regs.len() {
            self.regs.resize(r + 1, Nat::ZERO);
        }
        self.regs[r] = v;
    }
}

fn input_regs(arity: u32, input: Nat) -> Vec<Nat> {
    let mut regs = vec![Nat::ZERO; arity.max(1) as usize];
    let last = regs.len() - 1;
    regs[last] = input;
    regs
}

impl Machine {
    /// The pure Gödel numbering with no registry slots.
    pub fn standard() -> Arc<Machine> {
        MachineBuilder::new().build()
    }

    pub fn coding(&self) -> DiagCoding {
        self.coding
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_name(&self, i: usize) -> Option<&str> {
        self.slots.get(i).map(|(n, _)| n.as_str())
    }

    /// A builder holding this machine's slots, for appending further entries.
    pub fn extend(&self) -> MachineBuilder {
        MachineBuilder { slots: self.slots.clone(), diag: self.diag.clone(), coding: self.coding }
    }

    /// Index of `program` under this machine's numbering.
    pub fn index_of(&self, program: &Program) -> Nat {
        program.encode()
    }

    pub fn resolve(&self, e: &Nat) -> Result<Resolved> {
        if let Some(i) = e.to_u64().filter(|&i| i < SLOT_LIMIT) {
            return match self.slots.get(i as usize) {
                Some((_, Slot::Code(p))) => Ok(Resolved::Code(p.clone())),
                Some((_, Slot::Native(n))) => Ok(Resolved::Native(n.clone())),
                None => Err(Error::Decode(format!("index {i} names an empty registry slot"))),
            };
        }
        if let Some(p) = self.cache.read().unwrap().get(e) {
            return Ok(Resolved::Code(p.clone()));
        }
        let p = Arc::new(Program::decode(e)?);
        let mut cache = self.cache.write().unwrap();
        if cache.len() > 1 << 16 {
            cache.clear();
        }
        cache.insert(e.clone(), p.clone());
        Ok(Resolved::Code(p))
    }

    /// `smn(e, w)`: an index for `n ↦ Φ_e(w, n)`. Computed syntactically.
    pub fn smn(&self, e: &Nat, frozen: &[Nat]) -> Result<Nat> {
        if frozen.is_empty() {
            self.resolve(e)?;
            return Ok(e.clone());
        }
        let arity = self.resolve(e)?.arity();
        Ok(smn_program(e, arity, frozen)?.encode())
    }

    /// `z(v,u)` with `Φ_{z}(z) = ⟨Φ_v(v), Φ_u(u)⟩` under this machine's coding.
    pub fn diag_pair(&self, v: &Nat, u: &Nat) -> Nat {
        if let Some(&i) = self.diag.get(&(v.clone(), u.clone())) {
            return Nat::from(i);
        }
        diag_program(self.coding, v, u).encode()
    }

    pub fn run(&self, e: &Nat, oracle: &[u64], input: u64, budget: u64) -> Result<Outcome> {
        Ok(self.run_stats(e, oracle, Nat::from(input), budget)?.outcome)
    }

    /// `Φ_e(σ; n)` with step budget `|σ|`.
    pub fn phi_sigma(&self, e: &Nat, sigma: &[u64], n: u64) -> Result<Outcome> {
        self.run(e, sigma, n, sigma.len() as u64)
    }

    pub fn run_stats(&self, e: &Nat, oracle: &[u64], input: Nat, budget: u64) -> Result<RunStats> {
        match self.resolve(e)? {
            Resolved::Native(n) => {
                let args = input_regs(n.arity(), input);
                Ok(n.call(self, oracle, &args, budget))
            }
            Resolved::Code(p) => Ok(self.exec(p, oracle, input, budget)),
        }
    }

    fn exec(&self, prog: Arc<Program>, oracle: &[u64], input: Nat, budget: u64) -> RunStats {
        let mut steps: u64 = 0;
        let mut max_read: Option<usize> = None;
        let regs = input_regs(prog.arity, input);
        let mut stack = vec![Frame { prog, pc: 0, regs, olen: oracle.len(), deadline: budget, ret: Ret::Top }];
        let done = |outcome: Outcome, steps: u64, max_read: Option<usize>| RunStats { outcome, steps, max_read };

        loop {
            let f = stack.last_mut().unwrap();
            if steps >= f.deadline {
                let f = stack.pop().unwrap();
                match f.ret {
                    Ret::Top => return done(Outcome::StillRunning, steps, max_read),
                    Ret::Eval(_) => {}
                    Ret::Bound(d) => stack.last_mut().unwrap().set(d, Nat::ZERO),
                }
                continue;
            }
            steps += 1;
            if f.pc >= f.prog.code.len() {
                let v = f.get(0);
                match finish(&mut stack, v) {
                    Some(o) => return done(o, steps, max_read),
                    None => continue,
                }
            }
            let pc = f.pc;
            f.pc += 1;
            let prog = f.prog.clone();
            match &prog.code[pc] {
                Instr::Set(d, c) => f.set(*d, c.clone()),
                Instr::Copy(d, s) => {
                    let v = f.get(*s);
                    f.set(*d, v)
                }
                Instr::Add(d, a, b) => {
                    let v = f.get(*a).add(&f.get(*b));
                    f.set(*d, v)
                }
                Instr::Sub(d, a, b) => {
                    let v = f.get(*a).monus(&f.get(*b));
                    f.set(*d, v)
                }
                Instr::Mul(d, a, b) => {
                    let v = f.get(*a).mul(&f.get(*b));
                    f.set(*d, v)
                }
                Instr::Div(d, a, b) => {
                    let v = f.get(*a).div(&f.get(*b));
                    f.set(*d, v)
                }
                Instr::Mod(d, a, b) => {
                    let v = f.get(*a).rem(&f.get(*b));
                    f.set(*d, v)
                }
                Instr::Pair(d, a, b) => {
                    let v = Nat::pair(&f.get(*a), &f.get(*b));
                    f.set(*d, v)
                }
                Instr::Left(d, s) => {
                    let v = f.get(*s).unpair().0;
                    f.set(*d, v)
                }
                Instr::Right(d, s) => {
                    let v = f.get(*s).unpair().1;
                    f.set(*d, v)
                }
                Instr::Read(d, p) => {
                    let pos = f.get_small(*p);
                    if pos >= f.olen as u64 {
                        match out_of_range(&mut stack) {
                            Some(o) => return done(o, steps, max_read),
                            None => continue,
                        }
                    }
                    let pos = pos as usize;
                    max_read = max_read.max(Some(pos));
                    f.set(*d, Nat::from(oracle[pos]));
                }
                Instr::Jz(r, t) => {
                    if f.get(*r).is_zero() {
                        f.pc = *t;
                    }
                }
                Instr::Jeq(a, b, t) => {
                    if f.get(*a) == f.get(*b) {
                        f.pc = *t;
                    }
                }
                Instr::Jlt(a, b, t) => {
                    if f.get(*a) < f.get(*b) {
                        f.pc = *t;
                    }
                }
                Instr::Jmp(t) => f.pc = *t,
                Instr::Spec(d, e, a) => match self.smn(&f.get(*e), &[f.get(*a)]) {
                    Ok(v) => f.set(*d, v),
                    Err(_) => steps = f.deadline,
                },
                Instr::Diag(d, v, u) => {
                    let z = self.diag_pair(&f.get(*v), &f.get(*u));
                    f.set(*d, z)
                }
                Instr::Halt(r) => {
                    let v = f.get(*r);
                    match finish(&mut stack, v) {
                        Some(o) => return done(o, steps, max_read),
                        None => continue,
                    }
                }
                Instr::Tail(c) => match self.resolve(c) {
                    Err(_) => steps = f.deadline,
                    Ok(Resolved::Code(p)) => {
                        f.prog = p;
                        f.pc = 0;
                    }
                    Ok(Resolved::Native(n)) => {
                        let args: Vec<Nat> = (0..n.arity().max(1)).map(|r| f.get(r)).collect();
                        let r = n.call(self, &oracle[..f.olen], &args, f.deadline - steps);
                        steps += r.steps;
                        max_read = max_read.max(r.max_read);
                        match r.outcome {
                            Outcome::Halted(v) => match finish(&mut stack, v) {
                                Some(o) => return done(o, steps, max_read),
                                None => continue,
                            },
                            Outcome::StillRunning => steps = f.deadline,
                            Outcome::OracleOutOfRange => match out_of_range(&mut stack) {
                                Some(o) => return done(o, steps, max_read),
                                None => continue,
                            },
                        }
                    }
                },
                Instr::Eval(d, e, x) => {
                    let (d, x) = (*d, f.get(*x));
                    match self.resolve(&f.get(*e)) {
                        Err(_) => steps = f.deadline,
                        Ok(Resolved::Code(p)) => {
                            let regs = input_regs(p.arity, x);
                            let (olen, deadline) = (f.olen, f.deadline);
                            stack.push(Frame { prog: p, pc: 0, regs, olen, deadline, ret: Ret::Eval(d) });
                        }
                        Ok(Resolved::Native(n)) => {
                            let args = input_regs(n.arity(), x);
                            let r = n.call(self, &oracle[..f.olen], &args, f.deadline - steps);
                            steps += r.steps;
                            max_read = max_read.max(r.max_read);
                            match r.outcome {
                                Outcome::Halted(v) => f.set(d, v),
                                Outcome::StillRunning => steps = f.deadline,
                                Outcome::OracleOutOfRange => match out_of_range(&mut stack) {
                                    Some(o) => return done(o, steps, max_read),
                                    None => continue,
                                },
                            }
                        }
                    }
                }
                Instr::Bound(d, e, x, t, o) => {
                    let d = *d;
                    let x = f.get(*x);
                    let t = f.get_small(*t);
                    let o = f.get_small(*o);
                    if o > f.olen as u64 {
                        match out_of_range(&mut stack) {
                            Some(o) => return done(o, steps, max_read),
                            None => continue,
                        }
                    }
                    let o = o as usize;
                    let limit = steps.saturating_add(t).min(f.deadline);
                    match self.resolve(&f.get(*e)) {
                        Err(_) => {
                            steps = limit;
                            if steps < f.deadline {
                                f.set(d, Nat::ZERO);
                            }
                        }
                        Ok(Resolved::Code(p)) => {
                            let regs = input_regs(p.arity, x);
                            stack.push(Frame { prog: p, pc: 0, regs, olen: o, deadline: limit, ret: Ret::Bound(d) });
                        }
                        Ok(Resolved::Native(n)) => {
                            let args = input_regs(n.arity(), x);
                            let r = n.call(self, &oracle[..o], &args, limit - steps);
                            steps += r.steps;
                            max_read = max_read.max(r.max_read);
                            match r.outcome {
                                Outcome::Halted(v) => f.set(d, v.add(&Nat::from(1u64))),
                                Outcome::StillRunning => {
                                    steps = limit;
                                    if steps < f.deadline {
                                        f.set(d, Nat::ZERO);
                                    }
                                }
                                Outcome::OracleOutOfRange => f.set(d, Nat::ZERO),
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Pops the current frame delivering `v` to its caller; returns the final outcome at top level.
fn finish(stack: &mut Vec<Frame>, v: Nat) -> Option<Outcome> {
    let f = stack.pop().unwrap();
    match f.ret {
        Ret::Top => Some(Outcome::Halted(v)),
        Ret::Eval(d) => {
            stack.last_mut().unwrap().set(d, v);
            None
        }
        Ret::Bound(d) => {
            stack.last_mut().unwrap().set(d, v.add(&Nat::from(1u64)));
            None
        }
    }
}

/// Unwinds to the innermost bounded sub-computation, which reports non-halting.
fn out_of_range(stack: &mut Vec<Frame>) -> Option<Outcome> {
    loop {
        let f = stack.pop().unwrap();
        match f.ret {
            Ret::Top => return Some(Outcome::OracleOutOfRange),
            Ret::Eval(_) => {}
            Ret::Bound(d) => {
                stack.last_mut().unwrap().set(d, Nat::ZERO);
                return None;
            }
        }
    }
}

/// The program computing `e` on `(w, inputs…)`: shifts inputs up, loads `w`, continues as `e`.
pub fn smn_program(e: &Nat, arity: u32, frozen: &[Nat]) -> Result<Program> {
    let j = frozen.len() as u32;
    if j >= arity {
        return Err(Error::Construction(format!(
            "cannot freeze {j} arguments of an arity-{arity} program"
        )));
    }
    let rest = arity - j;
    let mut code = Vec::new();
    for i in (0..rest).rev() {
        code.push(Instr::Copy(i + j, i));
    }
    for (i, w) in frozen.iter().enumerate() {
        code.push(Instr::Set(i as Reg, w.clone()));
    }
    code.push(Instr::Tail(e.clone()));
    Ok(Program::new(rest, code))
}

/// The program of `z(v,u)`.
pub fn diag_program(coding: DiagCoding, v: &Nat, u: &Nat) -> Program {
    let base = super::library::diag_base(coding);
    smn_program(&base.encode(), base.arity, &[v.clone(), u.clone()]).expect("diag base has arity 3")
}
