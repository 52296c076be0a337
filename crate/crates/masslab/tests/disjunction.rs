use masslab::disjunction::{code, con, decode, heart, heart_of, mind_changes, proj, tie, write, TapeWord, TieMode};
use masslab::fixtures;
use masslab::oracle;
use masslab::trees::{ext_approx, frontier, ClosedClass};
use proptest::prelude::*;

fn pairs() -> Vec<(ClosedClass, ClosedClass)> {
    let fs = fixtures::classes();
    let mut out = Vec::new();
    for p in &fs {
        for q in &fs {
            out.push((p.clone(), q.clone()));
        }
    }
    out
}

#[test]
fn alternating_mind_changes() {
    for k in 1..6 {
        let s: TapeWord = (0..2 * k).map(|j| (j % 2, 0)).collect();
        assert_eq!(mind_changes(&s), 2 * k - 1);
    }
}

#[test]
fn tie_one_members_use_one_tape() {
    let fs = fixtures::classes();
    let t = tie(TieMode::Finite(1), &[fs[0].clone(), fs[1].clone()]).unwrap();
    for w in frontier(&t, 5).unwrap().members {
        let s = decode(2, &w);
        assert!(s.iter().all(|e| e.0 == s[0].0));
    }
}

#[test]
fn tie_matches_oracle() {
    for (p, q) in pairs() {
        let ps = [p.clone(), q.clone()];
        let tp: Vec<_> = ps.iter().map(|c| oracle::enumerate(c, 8)).collect();
        for mode in [TieMode::Finite(1), TieMode::Finite(2), TieMode::Finite(3), TieMode::Infinity] {
            let t = tie(mode, &ps).unwrap();
            for d in 0..=6 {
                let brute = oracle::tie(mode.bound(), &tp, d);
                assert_eq!(frontier(&t, d).unwrap(), brute.frontier(), "{} at {d}", t.label());
            }
        }
    }
}

#[test]
fn tie_is_monotone_in_n() {
    for (p, q) in pairs() {
        let ps = [p, q];
        for n in 1..4 {
            let a = tie(TieMode::Finite(n), &ps).unwrap();
            let b = tie(TieMode::Finite(n + 1), &ps).unwrap();
            let inf = tie(TieMode::Infinity, &ps).unwrap();
            for d in 0..=6 {
                for w in frontier(&a, d).unwrap().members {
                    assert!(b.contains(&w) && inf.contains(&w));
                }
            }
        }
    }
}

#[test]
fn omega_and_infinity_trees_coincide() {
    let fs = fixtures::classes();
    let ps = [fs[0].clone(), fs[2].clone()];
    let a = tie(TieMode::Omega, &ps).unwrap();
    let b = tie(TieMode::Infinity, &ps).unwrap();
    for d in 0..=6 {
        assert_eq!(frontier(&a, d).unwrap().members, frontier(&b, d).unwrap().members);
    }
}

#[test]
fn heart_matches_oracle_and_is_extendible() {
    for (p, q) in pairs() {
        let ps = [p.clone(), q.clone()];
        let tp: Vec<_> = ps.iter().map(|c| oracle::enumerate(c, 8)).collect();
        for mode in [TieMode::Finite(2), TieMode::Infinity] {
            let t = tie(mode, &ps).unwrap();
            for d in 0..=6 {
                let h = heart_of(&t, &ps, d);
                let brute = oracle::heart(&oracle::tie(mode.bound(), &tp, d), &tp, d);
                assert_eq!(frontier(&h, d).unwrap(), brute.frontier(), "{} at {d}", h.label());
                for w in brute.words.iter() {
                    assert!(ext_approx(&t, w, d).unwrap(), "{w:?} not extendible in {}", t.label());
                }
            }
        }
    }
}

#[test]
fn heart_examples() {
    let fs = fixtures::classes();
    let ps = [fs[1].clone(), fs[0].clone()];
    let h = heart(TieMode::Infinity, &ps, 4).unwrap();
    assert!(h.contains(&[]));
    assert!(h.contains(&code(2, &[(0, 0), (1, 1), (0, 0)])));
    assert!(!h.contains(&code(2, &[(0, 0), (0, 1)])));
    assert!(!h.contains(&code(2, &[(1, 1), (1, 1)])));
    let dead = [fs[3].clone(), fs[0].clone()];
    assert!(!heart(TieMode::Infinity, &dead, 4).unwrap().contains(&[]));
}

#[test]
fn con_examples() {
    let fs = fixtures::classes();
    let ps = [fs[0].clone(), fs[1].clone()];
    assert!(con(&ps, &[]));
    assert!(!con(&ps, &[(0, 1), (1, 0), (0, 1)]));
    assert!(con(&ps, &[(0, 1), (1, 0), (0, 0)]));
}

fn arb_tape_word() -> impl Strategy<Value = TapeWord> {
    proptest::collection::vec((0usize..2, 0u64..3), 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projections_partition(s in arb_tape_word()) {
        prop_assert_eq!(proj(0, &s).len() + proj(1, &s).len(), s.len());
        if !s.is_empty() {
            prop_assert!(mind_changes(&s) < s.len());
        }
    }

    #[test]
    fn write_proj_adjunction(i in 0usize..3, s in proptest::collection::vec(0u64..5, 0..12), t in proptest::collection::vec(0u64..5, 0..6)) {
        prop_assert_eq!(proj(i, &write(i, &s)), s.clone());
        prop_assert!(proj(i + 1, &write(i, &s)).is_empty());
        prop_assert_eq!(mind_changes(&write(i, &s)), 0);
        let mut st = write(i, &s);
        st.extend(write(i, &t));
        let mut joined = s.clone();
        joined.extend(&t);
        prop_assert_eq!(st, write(i, &joined));
    }

    #[test]
    fn mind_change_formula(s in arb_tape_word()) {
        let mut count = 0;
        for n in 0..s.len().saturating_sub(1) {
            if s[n].0 != s[n + 1].0 {
                count += 1;
            }
        }
        prop_assert_eq!(mind_changes(&s), count);
    }

    #[test]
    fn con_matches_prefix_definition(s in arb_tape_word()) {
        let fs = fixtures::classes();
        let ps = [fs[0].clone(), fs[2].clone()];
        let brute = (0..=s.len()).all(|n| (0..2).all(|i| ps[i].contains(&proj(i, &s[..n]))));
        prop_assert_eq!(con(&ps, &s), brute);
    }
}
