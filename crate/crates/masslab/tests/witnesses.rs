use std::collections::BTreeSet;
use std::sync::Arc;

use masslab::disjunction::{tie, TieMode};
use masslab::fixtures::{classes, fixture_machine};
use masslab::kernel::{library, MachineBuilder, Nat};
use masslab::learners::{echo_tape, mcl, output_prefix, Constant, FnLearner, Learner, SharedLearner};
use masslab::trees::{ext_approx, frontier, full, homogeneous, members_upto, ClosedClass, DEFAULT_CAP};
use masslab::witnesses::*;
use masslab::word::{all_words, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> ClosedClass {
    classes().into_iter().find(|c| c.label() == name).unwrap()
}

fn idx(p: masslab::kernel::Program) -> Nat {
    p.encode()
}

// dnr square

#[test]
fn dnr_square_exhaustive_small() {
    let m = dnr_square_machine(2);
    let sq = dnr_square_reduction(m, 2, 64, 7);
    let src = sq.source();
    let members: Vec<Word> = frontier(&src, 7).unwrap().members;
    assert!(!members.is_empty());
    let target = sq.target();
    for g in &members {
        let out = sq.apply(g);
        assert!(out.dichotomy_failures.is_empty(), "{g:?}");
        assert!(target.contains(&out.delta_prefix), "delta {g:?} {:?}", out.delta_prefix);
        assert!(target.contains(&out.gamma_output), "gamma {g:?}");
    }
}

#[test]
fn dnr_square_without_halting_diagonals_keeps_piece_zero() {
    let mut b = MachineBuilder::new();
    for _ in 0..9 {
        b.push("loop", library::looping()).unwrap();
    }
    let sq = dnr_square_reduction(b.build(), 2, 64, 6);
    for g in all_words(6, &|_| 4) {
        let out = sq.apply(&g);
        assert_eq!(out.piece, 0);
        assert!(out.refutations.is_empty());
        assert_eq!(sq.schedule.active(&g), vec![0]);
    }
}

#[test]
fn dnr_square_transcript_is_deterministic() {
    let sq = dnr_square_reduction(dnr_square_machine(2), 2, 64, 6);
    let g = frontier(&sq.source(), 6).unwrap().members[3].clone();
    assert_eq!(sq.transcript(&g).json_lines(), sq.transcript(&g).json_lines());
}

// homogeneous collapse

fn column_stream(rng: &mut ChaCha8Rng, b: usize, good: usize, len: usize) -> Word {
    // column `good` stays inside {0,1}; the other columns are arbitrary in {0,1,2}
    (0..len).map(|p| if p % b == good { rng.gen_range(0..2) } else { rng.gen_range(0..3) }).collect()
}

#[test]
fn homog_collapse_bounds_mind_changes() {
    let s = homogeneous(&[[0, 1].into()]);
    for b in 1..=4usize {
        let m = homog_fixture_machine(b);
        let l = homog_collapse_learner(m.clone(), b, s.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(b as u64);
        for _ in 0..25 {
            let good = rng.gen_range(0..b);
            let g = column_stream(&mut rng, b, good, 8 * b + 24);
            let trace = l.trace(&g);
            assert!(mcl(&trace).len() <= b, "b={b}");
            let run = l.replay(&g);
            assert!(run.violation.is_none());
            let out = output_prefix(&m, trace.last().unwrap(), &g, 1 << 18, 8);
            assert_eq!(out.len(), 8);
            assert!(s.contains(&out));
        }
    }
}

#[test]
fn homog_collapse_with_one_program_never_changes() {
    let s = homogeneous(&[[0, 1].into()]);
    let l = homog_collapse_learner(homog_fixture_machine(1), 1, s);
    let g: Word = vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 1];
    assert!(mcl(&l.trace(&g)).is_empty());
}

#[test]
fn homog_collapse_removes_a_wrong_column() {
    let s = homogeneous(&[[0, 1].into()]);
    let l = homog_collapse_learner(homog_fixture_machine(2), 2, s);
    let g: Word = (0..30).map(|p| if p % 2 == 0 { 2 } else { 1 }).collect();
    let run = l.replay(&g);
    assert_eq!(run.candidates.last().unwrap(), &vec![1]);
    assert_eq!(run.removals.len(), 1);
    assert_eq!(run.removals[0].1, 0);
}

// noncup

fn noncup_fixture(and: bool) -> (Nat, ClosedClass, ClosedClass, Word) {
    if and {
        let g: Word = vec![1, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0];
        (idx(library::interleaved_and()), fixture("fixtureA"), fixture("fixtureB"), g)
    } else {
        let g: Word = vec![0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 1, 0];
        (idx(library::odd_half()), fixture("fixtureC"), fixture("fixtureB"), g)
    }
}

#[test]
fn noncup_paths_are_extendible_members() {
    let m = fixture_machine();
    for and in [false, true] {
        let (phi, vp, vq, g) = noncup_fixture(and);
        let ex = noncup_extract(&m, &phi, &vp, &vq, &g, 3, 8).unwrap();
        assert_eq!(ex.path.len(), 8);
        assert!(vp.contains(&ex.path));
        assert!(ext_approx(&vp, &ex.path, 12).unwrap());
        for r in &ex.rounds {
            assert!(r.ext_failures.is_empty(), "round {}", r.i);
            assert!(r.d_words > 0);
        }
        for t in &ex.tree {
            assert!(vp.contains(t));
        }
    }
}

#[test]
fn noncup_odd_half_recovers_the_oracle() {
    let (phi, vp, vq, g) = noncup_fixture(false);
    let ex = noncup_extract(&fixture_machine(), &phi, &vp, &vq, &g, 2, 8).unwrap();
    assert_eq!(ex.path, g[..8].to_vec());
}

#[test]
fn noncup_constant_program_gives_its_path() {
    let phi = idx(library::constant(0));
    let g: Word = vec![1; 10];
    let ex = noncup_extract(&fixture_machine(), &phi, &full(2), &fixture("fixtureB"), &g, 1, 8).unwrap();
    assert_eq!(ex.path, vec![0; 8]);
}

#[test]
fn noncup_reports_images_outside_vp() {
    let phi = idx(library::constant(1));
    let g: Word = vec![0; 10];
    let err = noncup_extract(&fixture_machine(), &phi, &fixture("fixtureA"), &fixture("fixtureB"), &g, 1, 8);
    assert!(matches!(err, Err(masslab::Error::Hypothesis(_))));
}

#[test]
fn noncup_short_oracle_is_a_resource_error() {
    let (phi, vp, vq, g) = noncup_fixture(false);
    let err = noncup_extract(&fixture_machine(), &phi, &vp, &vq, &g[..5], 1, 8);
    assert!(matches!(err, Err(masslab::Error::Resource(_))));
}

// hyperconcat learner

#[test]
fn hyper_learner_locks_and_outputs_members() {
    let m = fixture_machine();
    let (p, q, r) = (fixture("fixtureC"), fixture("fixtureB"), fixture("fixtureA"));
    let h = hyperconcat_learner(&m, hyper_fixture_psi(), &p, &q, HyperConfig::default());
    let streams = frontier(&r, 12).unwrap().members;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..6 {
        let g = &streams[rng.gen_range(0..streams.len())];
        let trace = h.trace(g);
        match h.status(g) {
            HyperStatus::Locked { rho, m: tail, .. } => {
                assert_eq!(rho, vec![1, 1, 0]);
                assert_eq!(tail, 0);
            }
            other => panic!("{other:?}"),
        }
        let out = output_prefix(h.machine(), trace.last().unwrap(), g, 1 << 10, 8);
        assert_eq!(out.len(), 8, "{g:?}");
        assert!(p.contains(&out));
        assert!(ext_approx(&p, &out, 10).unwrap());
    }
}

#[test]
fn hyper_guard_refutation_is_monotone() {
    let m = fixture_machine();
    let (p, q, r) = (fixture("fixtureC"), fixture("fixtureB"), fixture("fixtureA"));
    let h = hyperconcat_learner(&m, hyper_fixture_psi(), &p, &q, HyperConfig::default());
    let g = frontier(&r, 10).unwrap().members[17].clone();
    for i in 0..h.pairs().len().min(40) {
        let mut refuted = false;
        for n in 0..=g.len() {
            let now = h.refuted(i, &g[..n]);
            assert!(!refuted || now, "pair {i} unrefuted at {n}");
            refuted = now;
        }
    }
}

#[test]
fn hyper_constant_psi_locks_on_the_first_pair() {
    let m = fixture_machine();
    let p = fixture("fixtureC");
    let psi: SharedLearner = Arc::new(Constant(idx(library::odd_half())));
    let h = hyperconcat_learner(&m, psi, &p, &fixture("fixtureB"), HyperConfig::default());
    let g: Word = vec![0, 1, 0, 0, 1, 0, 1, 0];
    assert_eq!(h.status(&g), HyperStatus::Locked { index: 0, rho: vec![], m: 0 });
    assert!(mcl(&h.trace(&g)).is_empty());
}

// sigma2 union

#[test]
fn sigma2_tags_settle_on_the_least_layer() {
    let m = fixture_machine();
    let (a, c) = (fixture("fixtureB"), fixture("fixtureA"));
    let layers = vec![a.clone(), masslab::trees::union(&a, &c), full(2)];
    let l = sigma2_union_learner(m.clone(), layers);
    let zeros: Word = vec![0; 8];
    assert!(mcl(&l.trace(&zeros)).is_empty());
    assert_eq!(l.tag(&zeros), 0);
    let f: Word = vec![0, 1, 0, 1, 0, 0, 1, 0];
    assert_eq!(l.tag(&f), 1);
    assert!(l.tag_correct(&f));
    let g: Word = vec![1, 1, 0, 1, 1, 0, 0, 0];
    assert_eq!(l.tag(&g), 2);
    assert!(l.tag_correct(&g));
    let out = output_prefix(&m, l.trace(&g).last().unwrap(), &g, 1 << 10, 5);
    assert_eq!(out, vec![2, 1, 1, 0, 1]);
}

#[test]
fn sigma2_tag_correct_on_every_member() {
    let layers = vec![fixture("fixtureB"), fixture("fixtureA"), fixture("fixtureC"), full(2)];
    let l = sigma2_union_learner(fixture_machine(), layers.clone());
    for f in all_words(8, &|_| 2) {
        let i = l.tag(&f);
        assert!(i < layers.len());
        assert!(layers[i].contains(&f));
        assert!(layers[..i].iter().all(|p| !p.contains(&f)));
    }
}

// forcing

fn tie_pair() -> Vec<ClosedClass> {
    vec![fixture("fixtureA"), fixture("fixtureB")]
}

#[test]
fn echo_is_forced_exactly_m_times() {
    let m = fixture_machine();
    let echo: SharedLearner = Arc::new(echo_tape(2));
    for k in 0..=6 {
        let out = force_mind_changes(&m, &[echo.clone()], &tie_pair(), &ForceSpec::new(k)).unwrap();
        assert!(out.achieved, "m={k}");
        assert_eq!(out.mind_changes, vec![k]);
        let ps = tie_pair();
        let t = tie(TieMode::Finite(k + 1), &ps).unwrap();
        assert!(t.contains(&out.coded), "m={k}");
        assert!(out.switches() <= k);
    }
}

#[test]
fn constant_learner_stalls() {
    let m = fixture_machine();
    let looping: SharedLearner = Arc::new(Constant(idx(library::looping())));
    let out = force_mind_changes(&m, &[looping], &tie_pair(), &ForceSpec::new(2)).unwrap();
    assert!(!out.achieved);
    assert_eq!(out.stall.unwrap().kind, "diverged");
    let wrong: SharedLearner = Arc::new(Constant(idx(library::constant(1))));
    let out = force_mind_changes(&m, &[wrong], &tie_pair(), &ForceSpec::new(2)).unwrap();
    assert!(!out.achieved);
    assert_eq!(out.stall.unwrap().kind, "wrong-commit");
}

#[test]
fn team_of_two_is_driven_on_both_counters() {
    let m = fixture_machine();
    let team: Vec<SharedLearner> = vec![Arc::new(echo_tape(2)), Arc::new(echo_tape(2))];
    let out = force_mind_changes(&m, &team, &tie_pair(), &ForceSpec::new(3)).unwrap();
    assert!(out.achieved);
    assert!(out.mind_changes.iter().all(|&c| c >= 3));
}

#[test]
fn force_transcripts_replay() {
    let m = fixture_machine();
    let echo: SharedLearner = Arc::new(echo_tape(2));
    let a = force_mind_changes(&m, &[echo.clone()], &tie_pair(), &ForceSpec::new(4)).unwrap();
    let b = force_mind_changes(&m, &[echo], &tie_pair(), &ForceSpec::new(4)).unwrap();
    assert_eq!(a.transcript.json_lines(), b.transcript.json_lines());
}

// timekeeper

#[test]
fn timekeeper_is_well_formed_and_deterministic() {
    let m = fixture_machine();
    let p = fixture("fixtureB");
    let q = fixture("fixtureA");
    let opponents = vec![idx(library::echo()), idx(library::constant(0)), idx(library::identity())];
    let a = timekeeper_build(&m, &p, &q, &opponents, 4, 6).unwrap();
    let b = timekeeper_build(&m, &p, &q, &opponents, 4, 6).unwrap();
    assert_eq!(a.transcript.json_lines(), b.transcript.json_lines());
    for k in &a.timekeepers {
        assert!(k.is_well_formed());
    }
    assert_eq!(a.leaves.len(), 4);
    let hat = a.hat();
    for w in members_upto(hat, 7, DEFAULT_CAP).unwrap() {
        assert!(hat.contains(&w[..w.len().saturating_sub(1)]));
    }
}

#[test]
fn timekeeper_without_opponents_never_acts() {
    let run = timekeeper_build(&fixture_machine(), &fixture("fixtureB"), &full(2), &[], 3, 5).unwrap();
    assert!(run.timekeepers.iter().all(|k| k.is_empty()));
    assert_eq!(run.taus, run.leaves);
}

// priority

fn random_team(rng: &mut ChaCha8Rng, size: usize) -> Vec<SharedLearner> {
    let pool = [library::echo(), library::constant(0), library::identity(), library::constant(1)];
    (0..size)
        .map(|_| {
            let a = pool[rng.gen_range(0..pool.len())].encode();
            let b = pool[rng.gen_range(0..pool.len())].encode();
            let cut = rng.gen_range(1..5usize);
            Arc::new(FnLearner::new("switch", move |w| if w.len() < cut { a.clone() } else { b.clone() }))
                as SharedLearner
        })
        .collect()
}

#[test]
fn priority_invariants_hold_on_seeded_teams() {
    let m = fixture_machine();
    let (p, q) = (fixture("fixtureA"), fixture("fixtureC"));
    for seed in 0..4 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let teams = vec![random_team(&mut rng, 2), random_team(&mut rng, 1)];
        let run = priority_hat(&m, &p, &q, &teams, 5).unwrap();
        assert!(run.violations.is_empty(), "{:?}", run.violations);
        let again = priority_hat(&m, &p, &q, &teams, 5).unwrap();
        assert_eq!(run.transcript.json_lines(), again.transcript.json_lines());
        let hs: Vec<usize> = run.snapshots.iter().map(|s| s.h).collect();
        assert!(hs.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn priority_with_empty_teams_copies_p() {
    let m = fixture_machine();
    let p = fixture("fixtureA");
    let run = priority_hat(&m, &p, &full(2), &[vec![], vec![]], 5).unwrap();
    assert!(run.violations.is_empty());
    let last = run.last();
    for (e, st) in last.teams.iter().enumerate() {
        for (alpha, gamma) in &st.gamma {
            let mut expect = team_root(e);
            let pad = (team_root(1).len() - expect.len()) * usize::from(!alpha.is_empty());
            expect.extend(std::iter::repeat(0).take(pad));
            expect.extend(alpha);
            assert_eq!(gamma, &expect, "team {e} alpha {alpha:?}");
        }
    }
    assert!(run.attention.is_empty());
    let hat = run.hat();
    for w in frontier(&p, 5).unwrap().members {
        let mut tagged = vec![0];
        tagged.extend(&w);
        assert!(hat.contains(&tagged));
    }
}

#[test]
fn priority_never_changing_learner_attends_once_per_branch() {
    let m = fixture_machine();
    let (p, q) = (fixture("fixtureA"), fixture("fixtureB"));
    let team: Vec<SharedLearner> = vec![Arc::new(Constant(idx(library::constant(1))))];
    let run = priority_hat(&m, &p, &q, &[team], 6).unwrap();
    assert!(run.violations.is_empty());
    assert!(run.attention.values().all(|&n| n <= 1), "{:?}", run.attention);
    let st = &run.last().teams[0];
    let total: BTreeSet<usize> = st.m.values().flatten().copied().collect();
    assert_eq!(total, [0].into());
}

#[test]
fn priority_change_moves_learner_to_children() {
    let m = fixture_machine();
    let (p, q) = (full(2), full(2));
    let a = idx(library::constant(0));
    let b = idx(library::constant(1));
    let team: Vec<SharedLearner> =
        vec![Arc::new(FnLearner::new("late", move |w| if w.len() < 4 { a.clone() } else { b.clone() }))];
    let run = priority_hat(&m, &p, &q, &[team], 4).unwrap();
    assert!(run.violations.is_empty(), "{:?}", run.violations);
    assert!(run.transcript.events.iter().any(|e| e.action == "attention" && e.delta["changed"] == true));
    let st = &run.last().teams[0];
    assert!(!st.m.get(&Vec::new()).is_some_and(|s| s.contains(&0)));
}
