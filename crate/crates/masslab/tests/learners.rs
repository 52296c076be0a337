use std::sync::Arc;

use masslab::fixtures::{classes, fixture_machine};
use masslab::kernel::{library, Nat};
use masslab::learners::*;
use masslab::trees::{frontier, full, homogeneous, ClosedClass};
use masslab::witnesses::{homog_collapse_learner, homog_fixture_machine};
use masslab::word::{all_words, Sym, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> ClosedClass {
    classes().into_iter().find(|c| c.label() == name).unwrap()
}

fn echo() -> Nat {
    library::echo().encode()
}

fn h(budget: u64) -> Horizon {
    Horizon { budget, k: 1 }
}

fn mod3_learner() -> FnLearner {
    FnLearner::new("sum mod 3", |w| Nat::from(w.iter().sum::<u64>() % 3 + 1))
}

#[test]
fn constant_identity_learner_converges_consistently() {
    let m = fixture_machine();
    let a = fixture("fixtureA");
    for g in frontier(&a, 8).unwrap().members {
        let t = simulate(&m, &Constant(echo()), &g, &a, 100);
        assert_eq!(t.mind_changes(), 0);
        assert!(t.converged(1));
        assert_eq!(t.verdict, Verdict::Consistent);
        assert_eq!(t.output, g);
    }
}

#[test]
fn alternating_learner_changes_at_every_step() {
    let m = fixture_machine();
    let l = Alternating(echo(), library::constant(0).encode());
    for k in 1..6 {
        let g: Word = vec![0; 2 * k];
        let t = simulate(&m, &l, &g, &full(2), 100);
        assert_eq!(t.mind_changes(), 2 * k);
        assert_eq!(t.indx.len(), 2);
    }
}

#[test]
fn trace_matches_straight_line_simulation() {
    let m = fixture_machine();
    let l = mod3_learner();
    let g: Word = vec![1, 0, 2, 2, 1, 0, 0, 1];
    let t = simulate(&m, &l, &g, &full(3), 50);
    let mut sum = 0;
    let mut guesses = vec![1u64];
    for &x in &g {
        sum += x;
        guesses.push(sum % 3 + 1);
    }
    let expect: Vec<Nat> = guesses.iter().map(|&v| Nat::from(v)).collect();
    assert_eq!(t.guesses, expect);
    let mut changes = Vec::new();
    for i in 0..g.len() {
        if guesses[i] != guesses[i + 1] {
            changes.push(i);
        }
    }
    assert_eq!(t.mcl, changes);
    assert_eq!(t.stages.len(), g.len() + 1);
    assert_eq!(t.stages.last().unwrap().mc, changes.iter().filter(|&&c| c < g.len()).count());
}

fn definitional_mcl(gs: &[Nat]) -> Vec<usize> {
    let mut out = Vec::new();
    for m in 0..gs.len().saturating_sub(1) {
        if gs[m + 1] != gs[m] {
            out.push(m);
        }
    }
    out
}

proptest! {
    #[test]
    fn mcl_and_indx_match_definitions(g in prop::collection::vec(0u64..3, 0..20)) {
        let m = fixture_machine();
        let t = simulate(&m, &mod3_learner(), &g, &full(3), 20);
        prop_assert_eq!(&t.mcl, &definitional_mcl(&t.guesses));
        let mut seen: Vec<Nat> = Vec::new();
        for x in &t.guesses {
            if !seen.contains(x) {
                seen.push(x.clone());
            }
        }
        prop_assert_eq!(&t.indx, &seen);
        for n in 0..=g.len() {
            let shorter = indx(&t.guesses[..=n]);
            prop_assert!(t.indx.starts_with(&shorter));
        }
    }

    #[test]
    fn bounded_mind_changes_bound_indices(g in prop::collection::vec(0u64..3, 1..16)) {
        let t = simulate(&fixture_machine(), &mod3_learner(), &g, &full(3), 20);
        prop_assert!(t.indx.len() <= t.mind_changes() + 1);
    }
}

#[test]
fn identity_is_a_medvedev_witness() {
    let m = fixture_machine();
    let a = fixture("fixtureA");
    let sample = frontier(&a, 8).unwrap().members;
    let r = verify_class(&m, Kind::Medvedev, &Witness::Program(echo()), &sample, &a, &a, h(100)).unwrap();
    assert!(r.pass());
    assert_eq!(r.passed, sample.len());
}

#[test]
fn alternating_fails_small_mind_change_bounds() {
    let m = fixture_machine();
    let l: SharedLearner = Arc::new(Alternating(echo(), library::constant(0).encode()));
    let sample: Vec<Word> = vec![vec![0; 6]];
    let w = Witness::Learner(l);
    let r = verify_class(&m, Kind::MindChanges(3), &w, &sample, &full(2), &full(2), h(50)).unwrap();
    assert!(!r.pass());
    assert!(r.failures[0].reason.contains("mind changes"));
}

#[test]
fn witness_shape_mismatch_is_an_error() {
    let m = fixture_machine();
    let l: SharedLearner = Arc::new(Constant(echo()));
    let s = vec![vec![0]];
    let r = verify_class(&m, Kind::Medvedev, &Witness::Learner(l.clone()), &s, &full(2), &full(2), h(10));
    assert!(matches!(r, Err(masslab::Error::WitnessKind(_))));
    let r = verify_class(&m, Kind::Programs(2), &Witness::Team(vec![l.clone()]), &s, &full(2), &full(2), h(10));
    assert!(matches!(r, Err(masslab::Error::WitnessKind(_))));
    let r = verify_class(&m, Kind::Team(1), &Witness::Team(vec![l.clone(), l]), &s, &full(2), &full(2), h(10));
    assert!(matches!(r, Err(masslab::Error::WitnessKind(_))));
}

#[test]
fn homog_collapse_passes_bounded_mind_changes() {
    let b = 3;
    let s = homogeneous(&[[0, 1].into()]);
    let m = homog_fixture_machine(b);
    let l: SharedLearner = Arc::new(homog_collapse_learner(m.clone(), b, s.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sample: Vec<Word> = (0..100)
        .map(|_| {
            let good = rng.gen_range(0..b);
            (0..3 * 12).map(|p| if p % b == good { rng.gen_range(0..2) } else { rng.gen_range(0..3) }).collect()
        })
        .collect();
    let target = s;
    let r = verify_class(&m, Kind::MindChanges(b), &Witness::Learner(l), &sample, &full(3), &target, h(1 << 18)).unwrap();
    assert!(r.pass(), "{:?}", r.failures.first());
}

fn witnesses() -> Vec<Witness> {
    let progs = [echo(), library::constant(0).encode(), library::looping().encode(), library::first_argument().encode()];
    let mut out: Vec<Witness> = progs.iter().cloned().map(Witness::Program).collect();
    out.push(Witness::Learner(Arc::new(Alternating(echo(), progs[1].clone()))));
    out.push(Witness::Learner(Arc::new(mod3_learner())));
    out.push(Witness::Learner(Arc::new(FnLearner::new("late switch", move |w: &[Sym]| {
        if w.len() < 3 { progs[1].clone() } else { progs[0].clone() }
    }))));
    out
}

#[test]
fn verdict_implications_hold() {
    let m = fixture_machine();
    let pairs = [("fixtureA", "fixtureA"), ("fixtureB", "fixtureA"), ("fixtureA", "fixtureB"), ("fixtureC", "fixtureC")];
    for (src, tgt) in pairs {
        let (s, t) = (fixture(src), fixture(tgt));
        let sample = frontier(&s, 7).unwrap().members;
        for w in witnesses() {
            for b in 0..3 {
                let chain = implication_chain(&m, &w, b, &sample, &s, &t, h(200)).unwrap();
                assert!(chain_holds(&chain), "{src}->{tgt} b={b} {chain:?}");
            }
        }
    }
}

#[test]
fn medvedev_failures_survive_larger_budgets() {
    let m = fixture_machine();
    let progs = [echo(), library::slow(6).encode(), library::constant(1).encode(), library::slow_constant(5, 1).encode()];
    let (s, t) = (full(2), fixture("fixtureA"));
    let sample: Vec<Word> = all_words(6, &|_| 2);
    for e in progs {
        let mut failed = false;
        for budget in [1, 2, 4, 8, 16, 64, 256] {
            let r = verify_class(&m, Kind::Medvedev, &Witness::Program(e.clone()), &sample, &s, &t, h(budget)).unwrap();
            assert!(!failed || !r.pass(), "budget {budget}");
            failed |= !r.pass();
        }
    }
}

#[test]
fn popperian_probe_separates_total_and_looping_guesses() {
    let m = fixture_machine();
    let sample = all_words(5, &|_| 2);
    let total = popperian_probe(&m, &Constant(echo()), &sample, 1000);
    assert_eq!(total.stalls(), 0);
    let looping = popperian_probe(&m, &Constant(library::looping().encode()), &sample, 1000);
    assert_eq!(looping.stalls(), sample.len());
    assert!(looping.results.iter().all(|(_, p)| *p == Probe::StallObserved { position: 0 }));
}
