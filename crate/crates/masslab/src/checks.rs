//! The acceptance suites as library functions, shared by `masslab check` and the integration
//! tests. Each suite compares the operator code against `oracle` or replays a construction
//! and reports counted cases and the first few failures.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::concat::{
    arrow, comm_concat, concat, concat_family, delayed_derivative, derivative, hyperconcat, sharp, sqcap,
};
use crate::disjunction::{heart_of, mind_changes, proj, tie, write, Entry, TieMode};
use crate::error::{Error, Result};
use crate::fixtures::{base, classes, fixture_machine};
use crate::kernel::{corpus, fixpoint, library, recursion, Machine, Nat, Outcome, Program};
use crate::learners::{
    chain_holds, echo_tape, implication_chain, mcl, output_prefix, Alternating, Constant, FnLearner, Horizon,
    Learner, SharedLearner, Witness,
};
use crate::oracle::{self, Trunc};
use crate::trees::{coproduct, ext_approx, frontier, full, homogeneous, members_upto, product, union, ClosedClass, DEFAULT_CAP};
use crate::witnesses::{
    dnr_square_machine, dnr_square_reduction, force_mind_changes, homog_collapse_learner, homog_fixture_machine,
    noncup_extract, priority_hat, sigma2_union_learner, timekeeper_build, ForceSpec,
};
use crate::word::{all_words, Sym, Word};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Failures kept in a result's detail.
const KEEP: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Budget for learner verdicts in the implication suite.
    pub budget: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, budget: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub cases: usize,
    pub failures: Vec<String>,
    pub limit_secs: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn within_limit(&self) -> bool {
        self.elapsed.as_secs_f64() <= self.limit_secs as f64
    }

    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("[{status}] {:>2} {:<14} {} cases", self.id, self.name, self.cases);
        if let Some(f) = self.failures.first() {
            s.push_str(&format!("; first failure: {f}"));
        }
        s
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failed: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < KEEP {
                self.failures.push(why());
            }
        }
    }

    fn error(&mut self, e: Error) {
        self.check(false, || e.to_string());
    }
}

/// `(id, name, time limit in seconds)` of the library suites.
pub const SUITES: [(usize, &str, u64); 9] = [
    (1, "kernel", 10),
    (2, "operators", 60),
    (3, "identities", 10),
    (4, "homog", 30),
    (5, "dnr-square", 60),
    (6, "noncup", 30),
    (7, "force", 20),
    (8, "stagewise", 30),
    (9, "implications", 20),
];

/// Suite ids for `all`, a suite name or a number.
pub fn resolve(name: &str) -> Result<Vec<usize>> {
    if name == "all" {
        return Ok(SUITES.iter().map(|s| s.0).collect());
    }
    SUITES
        .iter()
        .find(|s| s.1 == name || s.0.to_string() == name)
        .map(|s| vec![s.0])
        .ok_or_else(|| Error::Shape(format!("unknown suite {name:?}")))
}

pub fn run(id: usize, cfg: &SuiteConfig) -> Result<CheckResult> {
    let &(_, name, limit_secs) =
        SUITES.iter().find(|s| s.0 == id).ok_or_else(|| Error::Shape(format!("unknown suite {id}")))?;
    let start = Instant::now();
    let mut t = Tally::default();
    match id {
        1 => kernel_laws(cfg, &mut t),
        2 => operators(&mut t),
        3 => identities(&mut t),
        4 => homog(cfg, &mut t),
        5 => dnr_square(&mut t),
        6 => noncup(&mut t),
        7 => force(&mut t),
        8 => stagewise(cfg, &mut t),
        _ => implications(cfg, &mut t),
    }
    Ok(CheckResult {
        id,
        name: name.to_string(),
        pass: t.failed == 0 && t.cases > 0,
        cases: t.cases,
        failures: t.failures,
        limit_secs,
        elapsed: start.elapsed(),
    })
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<CheckResult>> {
    resolve(name)?.into_iter().map(|id| run(id, cfg)).collect()
}

fn fixture(name: &str) -> ClosedClass {
    classes().into_iter().find(|c| c.label() == name).expect("stock fixture")
}

fn fixture_set() -> Vec<ClosedClass> {
    let mut v = classes();
    v.push(base());
    v
}

// 1

fn kernel_laws(cfg: &SuiteConfig, t: &mut Tally) {
    let m = Machine::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let records = library::corpus();
    for (name, p) in &records {
        t.check(Program::decode(&p.encode()).as_ref() == Ok(p), || format!("{name} does not round-trip"));
    }
    let text = corpus::write(&records);
    match corpus::parse(&text) {
        Ok(parsed) => {
            let same = parsed.len() == records.len()
                && parsed.iter().zip(&records).all(|(r, (n, p))| r.name == *n && &r.program == p);
            t.check(same, || "corpus text does not round-trip".into());
        }
        Err(e) => t.error(e),
    }
    let unary: Vec<Nat> = records.iter().filter(|(_, p)| p.arity == 1).map(|(_, p)| p.encode()).collect();
    for _ in 0..600 {
        let e = &unary[rng.gen_range(0..unary.len())];
        let oracle: Word = (0..rng.gen_range(0..12)).map(|_| rng.gen_range(0..4)).collect();
        let x = rng.gen_range(0..6u64);
        let s = rng.gen_range(0..60u64);
        let extra = rng.gen_range(0..60u64);
        let (Ok(a), Ok(b)) = (m.run(e, &oracle, x, s), m.run(e, &oracle, x, s + extra)) else {
            t.check(false, || format!("run failed for {e}"));
            continue;
        };
        t.check(a.halted().is_none() || a == b, || format!("{e} on {oracle:?},{x}: {a:?} at {s}, {b:?} later"));
        let Ok(stats) = m.run_stats(e, &oracle, Nat::from(x), 200) else { continue };
        if let Outcome::Halted(_) = stats.outcome {
            let mut longer = oracle.clone();
            longer.extend((0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..4)));
            let padded = m.run(e, &longer, x, 200);
            t.check(padded.as_ref() == Ok(&stats.outcome), || format!("{e} reads past its use on {oracle:?}"));
            if let Some(r) = stats.max_read {
                let cut = m.run(e, &oracle[..=r], x, 200);
                t.check(cut.as_ref() == Ok(&stats.outcome), || format!("{e} depends on more than {r} cells"));
            }
        }
    }
    let mut builders: Vec<Nat> = vec![library::quine_builder().encode(), library::identity_builder().encode()];
    while builders.len() < 50 {
        builders.push(library::constant_builder(rng.gen_range(0..1000)).encode());
    }
    for b in &builders {
        let n = match fixpoint(&m, b, 10_000) {
            Ok(n) => n,
            Err(e) => {
                t.error(e);
                continue;
            }
        };
        let bn = match recursion::apply_builder(&m, b, &n, 10_000) {
            Ok(bn) => bn,
            Err(e) => {
                t.error(e);
                continue;
            }
        };
        let agree = (0..4).all(|len| {
            let oracle: Word = (0..len as u64).collect();
            (0..4).all(|x| m.run(&n, &oracle, x, 10_000) == m.run(&bn, &oracle, x, 10_000))
        });
        t.check(agree, || format!("fixed point of builder {b} disagrees with its image"));
    }
    for _ in 0..50 {
        let (a, b) = (rng.gen_range(0..100u64), rng.gen_range(0..100u64));
        let z = m.diag_pair(&library::constant(a).encode(), &library::constant(b).encode());
        let out = m.run_stats(&z, &[], z.clone(), 10_000).map(|s| s.outcome);
        t.check(out == Ok(Outcome::Halted(Nat::pair(&a.into(), &b.into()))), || format!("z({a},{b}) gives {out:?}"));
    }
    let c = library::constant(3).encode();
    let z = m.diag_pair(&library::looping().encode(), &c);
    let out = m.run_stats(&z, &[], z.clone(), 10_000).map(|s| s.outcome);
    t.check(out == Ok(Outcome::StillRunning), || format!("z(loop, 3) gives {out:?}"));
}

// 2

fn same(t: &mut Tally, what: &str, got: &ClosedClass, brute: &Trunc, depths: std::ops::RangeInclusive<usize>) {
    for d in depths {
        match frontier(got, d) {
            Ok(f) => t.check(f == brute.truncate(d).frontier(), || format!("{what} differs at depth {d}")),
            Err(e) => t.error(e),
        }
    }
}

fn operators(t: &mut Tally) {
    const D: usize = 8;
    let fs = fixture_set();
    let tr: Vec<Trunc> = fs.iter().map(|p| oracle::enumerate(p, 10)).collect();
    let at = |i: usize, d: usize| tr[i].truncate(d);
    let taus: [&[u64]; 4] = [&[2], &[3, 1], &[0, 5, 6], &[100]];
    for (i, p) in fs.iter().enumerate() {
        for n in 1..=3 {
            match derivative(p, n) {
                Ok(c) => same(t, &format!("deriv {n} ({})", p.label()), &c, &oracle::derivative(&at(i, D), n, D), 0..=D),
                Err(e) => t.error(e),
            }
        }
        for tau in taus {
            let c = delayed_derivative(p, tau);
            same(t, &format!("delayed {tau:?} ({})", p.label()), &c, &oracle::delayed(&at(i, D), tau, D), 0..=D);
        }
    }
    for (i, p) in fs.iter().enumerate() {
        for (j, q) in fs.iter().enumerate() {
            let (tp, tq) = (at(i, D), at(j, D));
            let name = |op: &str| format!("{op}({}, {})", p.label(), q.label());
            same(t, &name("oplus"), &product(p, q), &oracle::product(&tp, &tq, D), 0..=D);
            same(t, &name("linf"), &coproduct(p, q), &oracle::coproduct(&tp, &tq, D), 0..=D);
            same(t, &name("cup"), &union(p, q), &oracle::union(&tp, &tq), 0..=D);
            same(t, &name("concat"), &concat(p, q), &oracle::concat(&tp, &tq, D), 0..=D);
            let cc = oracle::product(&oracle::concat(&tp, &tq, D), &oracle::concat(&tq, &tp, D), D);
            same(t, &name("commconcat"), &comm_concat(p, q), &cc, 0..=D);
            match concat_family(p, &[q.clone(), fs[0].clone(), p.clone()], Some(q)) {
                Ok(c) => {
                    let qs = [tq.clone(), at(0, D), tp.clone(), tq.clone()];
                    same(t, &name("family"), &c, &oracle::family(&tp, &qs, D), 0..=D);
                }
                Err(e) => t.error(e),
            }
            same(t, &name("hyper"), &hyperconcat(q, p), &oracle::hyper(&tr[j], &tr[i], 10), 0..=10);
            same(t, &name("arrow"), &arrow(p, q), &oracle::arrow(&tp, &tq, sharp(p, q), D), 0..=D);
            same(t, &name("sqcap"), &sqcap(p, q), &oracle::sqcap(&tp, &tq, D), 0..=D);
        }
    }
    let plain = classes();
    for p in &plain {
        for q in &plain {
            let ps = [p.clone(), q.clone()];
            let tp: Vec<Trunc> = ps.iter().map(|c| oracle::enumerate(c, D)).collect();
            let tie_d = if tp.iter().all(|x| x.width() <= 2) { D } else { 6 };
            for mode in [TieMode::Finite(1), TieMode::Finite(2), TieMode::Finite(3), TieMode::Infinity] {
                let c = match tie(mode, &ps) {
                    Ok(c) => c,
                    Err(e) => {
                        t.error(e);
                        continue;
                    }
                };
                let brute = oracle::tie(mode.bound(), &tp, tie_d);
                same(t, c.label(), &c, &brute, 0..=tie_d);
                if matches!(mode, TieMode::Finite(2) | TieMode::Infinity) {
                    for d in 0..=tie_d {
                        let h = heart_of(&c, &ps, d);
                        let bh = oracle::heart(&brute.truncate(d), &tp, d);
                        same(t, h.label(), &h, &bh, d..=d);
                    }
                }
            }
        }
    }
}

// 3

fn tape_words(len: usize, tapes: usize, width: u64) -> Vec<Vec<Entry>> {
    let mut out = vec![Vec::new()];
    let mut level: Vec<Vec<Entry>> = vec![Vec::new()];
    for _ in 0..len {
        level = level
            .iter()
            .flat_map(|s| {
                (0..tapes).flat_map(move |i| {
                    (0..width).map(move |n| {
                        let mut x = s.clone();
                        x.push((i, n));
                        x
                    })
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

fn identities(t: &mut Tally) {
    let words: Vec<Word> = (0..=5).flat_map(|n| all_words(n, &|_| 3)).collect();
    for i in 0..3 {
        for s in &words {
            let w = write(i, s);
            let ok = proj(i, &w) == *s && proj(i + 1, &w).is_empty() && mind_changes(&w) == 0;
            t.check(ok, || format!("write {i} {s:?}"));
        }
        for s in words.iter().filter(|w| w.len() <= 3) {
            for u in words.iter().filter(|w| w.len() <= 3) {
                let mut st = write(i, s);
                st.extend(write(i, u));
                let mut joined = s.clone();
                joined.extend(u);
                t.check(st == write(i, &joined), || format!("write {i} is not a monoid map on {s:?}, {u:?}"));
            }
        }
    }
    for s in tape_words(7, 2, 2) {
        let count = s.windows(2).filter(|w| w[0].0 != w[1].0).count();
        t.check(mind_changes(&s) == count, || format!("mc {s:?}"));
    }
    for p in fixture_set() {
        for n in 0..=3 {
            let dd = delayed_derivative(&p, &vec![0; n]);
            match derivative(&p, n + 1) {
                Ok(plain) => {
                    for d in 0..=8 {
                        let eq = frontier(&dd, d).ok() == frontier(&plain, d).ok();
                        t.check(eq, || format!("zero delays {n} on {} at {d}", p.label()));
                    }
                }
                Err(e) => t.error(e),
            }
        }
    }
    let plain = classes();
    for p in &plain {
        for q in &plain {
            let ps = [p.clone(), q.clone()];
            let (Ok(inf), Ok(ties)) = (
                tie(TieMode::Infinity, &ps),
                (1..=4).map(|n| tie(TieMode::Finite(n), &ps)).collect::<Result<Vec<_>>>(),
            ) else {
                t.check(false, || format!("tie of {} and {}", p.label(), q.label()));
                continue;
            };
            for n in 0..3 {
                for d in 0..=6 {
                    let Ok(f) = frontier(&ties[n], d) else { continue };
                    let ok = f.members.iter().all(|w| ties[n + 1].contains(w) && inf.contains(w));
                    t.check(ok, || format!("tie {} not inside tie {} at {d}", n + 1, n + 2));
                }
            }
            for c in [&ties[1], &inf] {
                for d in 0..=6 {
                    let h = heart_of(c, &ps, d);
                    match members_upto(&h, d, DEFAULT_CAP) {
                        Ok(ws) => {
                            for w in ws {
                                let ok = ext_approx(c, &w, d).unwrap_or(false);
                                t.check(ok, || format!("{w:?} in {} is not extendible", h.label()));
                            }
                        }
                        Err(e) => t.error(e),
                    }
                }
            }
        }
    }
}

// 4

/// A stream whose column `good` stays in `{0,1}`; the other columns range over `{0,1,2}`.
fn column_stream(rng: &mut ChaCha8Rng, b: usize, len: usize) -> Word {
    let good = rng.gen_range(0..b);
    (0..len).map(|p| if p % b == good { rng.gen_range(0..2) } else { rng.gen_range(0..3) }).collect()
}

fn homog(cfg: &SuiteConfig, t: &mut Tally) {
    let s = homogeneous(&[[0, 1].into()]);
    for b in 1..=4usize {
        let m = homog_fixture_machine(b);
        let l = homog_collapse_learner(m.clone(), b, s.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ b as u64);
        for _ in 0..100 {
            let g = column_stream(&mut rng, b, 8 * b + 24);
            let trace = l.trace(&g);
            let changes = mcl(&trace).len();
            t.check(changes <= b, || format!("b={b}: {changes} mind changes on {g:?}"));
            let out = output_prefix(&m, trace.last().expect("nonempty trace"), &g, 1 << 18, 8);
            t.check(out.len() == 8 && s.contains(&out), || format!("b={b}: output {out:?} on {g:?}"));
        }
    }
}

// 5

fn dnr_square(t: &mut Tally) {
    let sq = dnr_square_reduction(dnr_square_machine(2), 2, 64, 9);
    let target = sq.target();
    let members = match frontier(&sq.source(), 9) {
        Ok(f) => f.members,
        Err(e) => return t.error(e),
    };
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).min(16);
    let chunk = members.len().div_ceil(threads).max(1);
    let results: Vec<Vec<(Word, Option<String>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = members
            .chunks(chunk)
            .map(|part| {
                let (sq, target) = (&sq, &target);
                scope.spawn(move || {
                    part.iter()
                        .map(|g| {
                            let out = sq.apply(g);
                            let why = if !out.dichotomy_failures.is_empty() {
                                Some(format!("dichotomy fails at {:?}", out.dichotomy_failures))
                            } else if !target.contains(&out.delta_prefix) {
                                Some(format!("delta prefix {:?} leaves the target", out.delta_prefix))
                            } else if !target.contains(&out.gamma_output) {
                                Some(format!("output {:?} leaves the target", out.gamma_output))
                            } else {
                                None
                            };
                            (g.clone(), why)
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker")).collect()
    });
    for (g, why) in results.into_iter().flatten() {
        t.check(why.is_none(), || format!("{g:?}: {}", why.clone().unwrap_or_default()));
    }
}

// 6

fn noncup(t: &mut Tally) {
    let m = fixture_machine();
    let cases = [
        (library::odd_half().encode(), fixture("fixtureC"), fixture("fixtureB"), vec![0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0]),
        (library::interleaved_and().encode(), fixture("fixtureA"), fixture("fixtureB"), vec![1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0]),
    ];
    for (phi, vp, vq, g) in cases {
        let ex = match noncup_extract(&m, &phi, &vp, &vq, &g, 3, 8) {
            Ok(ex) => ex,
            Err(e) => {
                t.error(e);
                continue;
            }
        };
        let ext = ext_approx(&vp, &ex.path, 12).unwrap_or(false);
        t.check(ex.path.len() == 8 && vp.contains(&ex.path) && ext, || format!("path {:?} in {}", ex.path, vp.label()));
        for r in &ex.rounds {
            t.check(r.ext_failures.is_empty(), || format!("round {} has non-extendible {:?}", r.i, r.ext_failures));
        }
        for w in &ex.tree {
            t.check(vp.contains(w), || format!("{w:?} outside {}", vp.label()));
        }
    }
}

// 7

fn force(t: &mut Tally) {
    let m = fixture_machine();
    let ps = vec![fixture("fixtureA"), fixture("fixtureB")];
    let echo: SharedLearner = Arc::new(echo_tape(2));
    for k in 0..=6 {
        match (force_mind_changes(&m, &[echo.clone()], &ps, &ForceSpec::new(k)), tie(TieMode::Finite(k + 1), &ps)) {
            (Ok(out), Ok(tree)) => {
                let ok = out.achieved && out.mind_changes == vec![k] && tree.contains(&out.coded);
                t.check(ok, || format!("m={k}: changes {:?}, achieved {}", out.mind_changes, out.achieved));
            }
            (Err(e), _) | (_, Err(e)) => t.error(e),
        }
    }
    let looping: SharedLearner = Arc::new(Constant(library::looping().encode()));
    match force_mind_changes(&m, &[looping], &ps, &ForceSpec::new(2)) {
        Ok(out) => {
            let kind = out.stall.map(|s| s.kind);
            t.check(!out.achieved && kind.as_deref() == Some("diverged"), || format!("looping learner: {kind:?}"));
        }
        Err(e) => t.error(e),
    }
    let team: Vec<SharedLearner> = vec![Arc::new(echo_tape(2)), Arc::new(echo_tape(2))];
    match force_mind_changes(&m, &team, &ps, &ForceSpec::new(3)) {
        Ok(out) => {
            let ok = out.achieved && out.mind_changes.len() == 2 && out.mind_changes.iter().all(|&c| c >= 3);
            t.check(ok, || format!("team counters {:?}", out.mind_changes));
        }
        Err(e) => t.error(e),
    }
}

// 8

fn seeded_team(rng: &mut ChaCha8Rng, size: usize) -> Vec<SharedLearner> {
    let pool = [library::echo(), library::constant(0), library::identity(), library::constant(1)];
    (0..size)
        .map(|_| {
            let a = pool[rng.gen_range(0..pool.len())].encode();
            let b = pool[rng.gen_range(0..pool.len())].encode();
            let cut = rng.gen_range(1..5usize);
            Arc::new(FnLearner::new("switch", move |w| if w.len() < cut { a.clone() } else { b.clone() })) as SharedLearner
        })
        .collect()
}

fn stagewise(cfg: &SuiteConfig, t: &mut Tally) {
    let m = fixture_machine();
    let opponents = [library::echo().encode(), library::constant(0).encode(), library::identity().encode()];
    let (p, q) = (fixture("fixtureB"), fixture("fixtureA"));
    match (timekeeper_build(&m, &p, &q, &opponents, 4, 6), timekeeper_build(&m, &p, &q, &opponents, 4, 6)) {
        (Ok(a), Ok(b)) => {
            t.check(a.transcript.json_lines() == b.transcript.json_lines(), || "timekeeper replay differs".into());
            for k in &a.timekeepers {
                t.check(k.is_well_formed(), || format!("timekeeper {k:?} is not well formed"));
            }
        }
        (Err(e), _) | (_, Err(e)) => t.error(e),
    }
    let (p, q) = (fixture("fixtureA"), fixture("fixtureC"));
    for round in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(round));
        let teams = vec![seeded_team(&mut rng, 2), seeded_team(&mut rng, 1)];
        match (priority_hat(&m, &p, &q, &teams, 5), priority_hat(&m, &p, &q, &teams, 5)) {
            (Ok(a), Ok(b)) => {
                t.check(a.violations.is_empty(), || format!("priority round {round}: {:?}", a.violations));
                t.check(a.transcript.json_lines() == b.transcript.json_lines(), || "priority replay differs".into());
                let snap = |r: &crate::witnesses::PriorityRun| serde_json::to_string(&r.snapshots).unwrap_or_default();
                t.check(snap(&a) == snap(&b), || "priority snapshots differ".into());
                for s in &a.snapshots {
                    for (e, st) in s.teams.iter().enumerate() {
                        let ok = partitions(&st.m, teams[e].len());
                        t.check(ok, || format!("stage {}: M sets of team {e} do not partition", s.stage));
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => t.error(e),
        }
    }
}

/// Along every branch of the `M` map, the sets on the prefixes are disjoint and cover the team.
fn partitions(m: &std::collections::BTreeMap<Word, BTreeSet<usize>>, size: usize) -> bool {
    let maximal = m.keys().filter(|a| !m.keys().any(|b| b.len() > a.len() && b.starts_with(a)));
    maximal.into_iter().all(|alpha| {
        let mut seen = BTreeSet::new();
        let mut total = 0;
        for (_, set) in m.iter().filter(|(b, _)| alpha.starts_with(b)) {
            total += set.len();
            seen.extend(set.iter().copied());
        }
        total == seen.len() && seen == (0..size).collect()
    })
}

// 9

fn implications(cfg: &SuiteConfig, t: &mut Tally) {
    let m = fixture_machine();
    let echo = library::echo().encode();
    let c0 = library::constant(0).encode();
    let progs = [echo.clone(), c0.clone(), library::looping().encode(), library::first_argument().encode()];
    let mut witnesses: Vec<Witness> = progs.iter().cloned().map(Witness::Program).collect();
    witnesses.push(Witness::Learner(Arc::new(Alternating(echo.clone(), c0.clone()))));
    let (e2, c2) = (echo.clone(), c0.clone());
    witnesses.push(Witness::Learner(Arc::new(FnLearner::new("length mod 3", move |w: &[Sym]| {
        if w.len() % 3 == 0 { e2.clone() } else { c2.clone() }
    }))));
    witnesses.push(Witness::Learner(Arc::new(FnLearner::new("late switch", move |w: &[Sym]| {
        if w.len() < 3 { c0.clone() } else { echo.clone() }
    }))));
    let names = ["fixtureA", "fixtureB", "fixtureC"];
    let h = Horizon { budget: cfg.budget, k: 1 };
    for src in names {
        for tgt in names {
            let (s, g) = (fixture(src), fixture(tgt));
            let sample = match frontier(&s, 7) {
                Ok(f) => f.members,
                Err(e) => return t.error(e),
            };
            for w in &witnesses {
                for b in 0..3 {
                    match implication_chain(&m, w, b, &sample, &s, &g, h) {
                        Ok(chain) => t.check(chain_holds(&chain), || format!("{src} to {tgt}, b={b}: {chain:?}")),
                        Err(e) => t.error(e),
                    }
                }
            }
        }
    }
    let layers = vec![fixture("fixtureB"), fixture("fixtureA"), fixture("fixtureC"), full(2)];
    let l = sigma2_union_learner(m.clone(), layers);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..100 {
        let f: Word = (0..rng.gen_range(4..12)).map(|_| rng.gen_range(0..2)).collect();
        let trace = l.trace(&f);
        let tag = l.tag(&f);
        let last = trace.last().expect("nonempty trace");
        let out = output_prefix(&m, last, &f, 1 << 10, f.len());
        let mut expect = vec![tag as Sym];
        expect.extend(&f[..f.len() - 1]);
        let ok = l.tag_correct(&f) && *last == l.program(tag) && mcl(&trace).len() < 4 && out == expect;
        t.check(ok, || format!("{f:?}: tag {tag}, output {out:?}"));
    }
}
