use masslab::concat::{
    arrow, btie, comm_concat, concat, concat_family, delayed_derivative, derivative, hyper_split, hyperconcat,
    recursive_meet, sharp, sqcap, LeafIndex,
};
use masslab::fixtures;
use masslab::oracle::{self, Trunc};
use masslab::trees::{empty, frontier, full, members_upto, singleton, ClosedClass};
use masslab::word::{deinterleave, interleave, Word};

fn fixture_set() -> Vec<ClosedClass> {
    let mut v = fixtures::classes();
    v.push(fixtures::base());
    v
}

fn t(c: &ClosedClass, d: usize) -> Trunc {
    oracle::enumerate(c, d)
}

#[test]
fn concat_matches_oracle() {
    for p in fixture_set() {
        for q in fixture_set() {
            for d in 0..=8 {
                let got = frontier(&concat(&p, &q), d).unwrap();
                assert_eq!(got, oracle::concat(&t(&p, d), &t(&q, d), d).frontier(), "{} {} {d}", p.label(), q.label());
            }
        }
    }
}

#[test]
fn concat_below_a_leaf_is_a_shift() {
    let fs = fixture_set();
    for p in &fs {
        for q in &fs {
            let c = concat(p, q);
            for rho in oracle::enumerate(p, 6).leaves() {
                for d in rho.len()..=8 {
                    let below: Vec<Word> = frontier(&c, d)
                        .unwrap()
                        .members
                        .into_iter()
                        .filter(|w| w.starts_with(&rho))
                        .map(|w| w[rho.len()..].to_vec())
                        .collect();
                    assert_eq!(below, frontier(q, d - rho.len()).unwrap().members);
                }
            }
        }
    }
}

#[test]
fn concat_examples() {
    let fs = fixtures::classes();
    let a = &fs[0];
    for d in 0..=6 {
        assert_eq!(frontier(&concat(a, &fs[1]), d).unwrap(), frontier(a, d).unwrap());
    }
    let leaf0 = singleton(&[0], &[]);
    let c = concat(&leaf0, &fs[1]);
    for d in 1..=6 {
        let shifted: Vec<Word> = frontier(&fs[1], d - 1)
            .unwrap()
            .members
            .into_iter()
            .map(|w| [vec![0], w].concat())
            .collect();
        assert_eq!(frontier(&c, d).unwrap().members, shifted);
    }
}

#[test]
fn comm_concat_matches_oracle_and_swaps() {
    let fs = fixture_set();
    for p in &fs {
        for q in &fs {
            for d in 0..=8 {
                let (tp, tq) = (t(p, d), t(q, d));
                let brute = oracle::product(&oracle::concat(&tp, &tq, d), &oracle::concat(&tq, &tp, d), d);
                let pq = frontier(&comm_concat(p, q), d).unwrap();
                assert_eq!(pq, brute.frontier());
                let qp = comm_concat(q, p);
                if d % 2 == 0 {
                    for w in &pq.members {
                        let (f, g) = deinterleave(w);
                        assert!(qp.contains(&interleave(&g, &f).unwrap()));
                    }
                }
            }
        }
    }
}

#[test]
fn comm_concat_with_empty_side() {
    let a = fixtures::classes()[0].clone();
    let c = comm_concat(&a, &empty());
    assert!(!c.contains(&[]));
}

#[test]
fn family_matches_oracle() {
    let fs = fixture_set();
    for p in &fs {
        for d in 0..=8 {
            let items = [fs[0].clone(), fs[2].clone(), fs[3].clone()];
            let rest = fs[4].clone();
            let fam = concat_family(p, &items, Some(&rest)).unwrap();
            let qs: Vec<Trunc> = items.iter().chain(std::iter::once(&rest)).map(|q| t(q, d)).collect();
            assert_eq!(frontier(&fam, d).unwrap(), oracle::family(&t(p, d), &qs, d).frontier(), "{} {d}", p.label());
        }
    }
}

#[test]
fn constant_family_is_concat() {
    let fs = fixture_set();
    for p in &fs {
        for q in &fs {
            let fam = concat_family(p, std::slice::from_ref(q), None).unwrap();
            for d in 0..=7 {
                assert_eq!(frontier(&fam, d).unwrap(), frontier(&concat(p, q), d).unwrap());
            }
        }
    }
}

#[test]
fn family_routes_each_leaf_to_its_own_suffix() {
    let b = fixtures::classes()[1].clone();
    let items: Vec<ClosedClass> = (0..4).map(|i| singleton(&[], &[i % 2, 1 - i % 2])).collect();
    let fam = concat_family(&b, &items, None).unwrap();
    let leaves = LeafIndex::new(&b).upto(5);
    assert_eq!(leaves[..3], [vec![1], vec![0, 1], vec![0, 0, 1]]);
    for (n, rho) in leaves.iter().enumerate().take(4) {
        let mut w = rho.clone();
        w.extend([n as u64 % 2, 1 - n as u64 % 2]);
        assert!(fam.contains(&w));
        let mut bad = rho.clone();
        bad.push(1 - n as u64 % 2);
        assert!(!fam.contains(&bad));
    }
}

#[test]
fn recursive_meet_matches_oracle() {
    let base = fixtures::base();
    let fs = fixtures::classes();
    let meet = recursive_meet(&base, &fs[..3]).unwrap();
    for d in 0..=8 {
        let qs: Vec<Trunc> = fs[..3].iter().map(|q| t(q, d)).collect();
        assert_eq!(frontier(&meet, d).unwrap(), oracle::family(&t(&base, d), &qs, d).frontier());
        let constant = recursive_meet(&base, &fs[..1]).unwrap();
        assert_eq!(frontier(&constant, d).unwrap(), frontier(&concat(&base, &fs[0]), d).unwrap());
    }
}

#[test]
fn derivatives_match_oracle() {
    for p in fixture_set() {
        assert_eq!(frontier(&derivative(&p, 1).unwrap(), 8).unwrap(), frontier(&p, 8).unwrap());
        for n in 1..=3 {
            let dp = derivative(&p, n).unwrap();
            for d in 0..=8 {
                assert_eq!(frontier(&dp, d).unwrap(), oracle::derivative(&t(&p, d), n, d).frontier());
            }
        }
        let two = derivative(&p, 2).unwrap();
        let c = concat(&p, &p);
        for w in oracle::enumerate(&full(3), 6).words {
            assert_eq!(two.contains(&w), c.contains(&w));
        }
    }
}

#[test]
fn zero_delays_give_plain_derivatives() {
    for p in fixture_set() {
        for len in 0..=3 {
            let dd = delayed_derivative(&p, &vec![0; len]);
            let plain = derivative(&p, len + 1).unwrap();
            for d in 0..=8 {
                assert_eq!(frontier(&dd, d).unwrap(), frontier(&plain, d).unwrap());
            }
        }
    }
}

#[test]
fn delayed_derivative_matches_oracle() {
    let taus: [&[u64]; 5] = [&[2], &[3, 1], &[1, 4], &[0, 5, 6], &[100]];
    for p in fixture_set() {
        for tau in taus {
            let dd = delayed_derivative(&p, tau);
            for d in 0..=8 {
                assert_eq!(frontier(&dd, d).unwrap(), oracle::delayed(&t(&p, d), tau, d).frontier(), "{} {tau:?} {d}", p.label());
            }
        }
        let late = delayed_derivative(&p, &[100]);
        assert_eq!(frontier(&late, 8).unwrap(), frontier(&p, 8).unwrap());
    }
}

#[test]
fn btie_layers_nest() {
    for p in fixture_set() {
        let layered = btie(&p, 4).unwrap();
        assert_eq!(frontier(&layered.layers()[0], 8).unwrap(), frontier(&p, 8).unwrap());
        for i in 0..3 {
            let (a, b) = (&layered.layers()[i], &layered.layers()[i + 1]);
            let fa = frontier(a, 8).unwrap().members;
            assert!(fa.iter().all(|w| b.contains(w)));
            let has_short_leaf = oracle::enumerate(&p, 8).leaves().iter().any(|l| l.len() >= 1 && l.len() <= 2);
            if has_short_leaf && i == 0 {
                let count = |c: &ClosedClass| members_upto(c, 8, 1 << 20).unwrap().len();
                assert!(count(b) > count(a), "{}", p.label());
            }
        }
        for w in frontier(&layered.union(), 6).unwrap().members {
            let n = layered.layer_of(&w).unwrap();
            assert!(n == 0 || !layered.layers()[n - 1].contains(&w));
        }
    }
}

/// In the `♯`-separated presentation a word lies in the union when its tail after the last
/// `♯` is in the layer selected by its `♯`-count; every interval `[σ]` meets it.
#[test]
fn sharp_presentation_meets_every_interval() {
    for p in fixture_set() {
        let layered = btie(&p, 8).unwrap();
        let in_s = |w: &[u64]| {
            let count = w.iter().filter(|&&s| s == 2).count();
            let tail = match w.iter().rposition(|&s| s == 2) {
                Some(i) => &w[i + 1..],
                None => w,
            };
            count < 8 && layered.layers()[count].contains(tail)
        };
        for sigma in oracle::enumerate(&full(3), 6).words {
            let count = sigma.iter().filter(|&&s| s == 2).count();
            let layer = &layered.layers()[(count + 1).min(7)];
            let hit = frontier(layer, 3).unwrap().members.into_iter().any(|h| {
                let mut w = sigma.clone();
                w.push(2);
                w.extend(h);
                in_s(&w)
            });
            assert!(hit || count + 1 >= 8 || oracle::enumerate(&p, 3).frontier().members.is_empty(), "{}", p.label());
        }
    }
}

#[test]
fn hyperconcat_matches_oracle() {
    let fs = fixture_set();
    for q in &fs {
        for p in &fs {
            let h = hyperconcat(q, p);
            for d in 0..=10 {
                assert_eq!(frontier(&h, d).unwrap(), oracle::hyper(&t(q, d), &t(p, d), d).frontier(), "{} {d}", h.label());
            }
        }
    }
}

#[test]
fn hyperconcat_examples() {
    let fs = fixtures::classes();
    let b = fs[1].clone();
    let zeros = singleton(&[], &[0]);
    let h = hyperconcat(&zeros, &b);
    let w = [1, 0, 0, 1, 0, 0, 0];
    assert!(h.contains(&w));
    let s = hyper_split(&zeros, &b, &w).unwrap();
    assert_eq!(s.blocks, vec![vec![1], vec![0, 1]]);
    assert_eq!(s.tau, vec![0, 0]);
    assert_eq!(s.rest, vec![0, 0]);
    assert!(!h.contains(&[1, 1]));
    let dead = singleton(&[], &[]);
    let hd = hyperconcat(&dead, &b);
    for d in 0..=6 {
        assert_eq!(frontier(&hd, d).unwrap(), frontier(&b, d).unwrap());
    }
}

#[test]
fn arrow_and_sqcap_match_oracle() {
    let fs = fixture_set();
    for p in &fs {
        for q in &fs {
            let s = sharp(p, q);
            for d in 0..=6 {
                let (tp, tq) = (t(p, d), t(q, d));
                assert_eq!(frontier(&arrow(p, q), d).unwrap(), oracle::arrow(&tp, &tq, s, d).frontier());
                assert_eq!(frontier(&sqcap(p, q), d).unwrap(), oracle::sqcap(&tp, &tq, d).frontier());
            }
            for w in frontier(&arrow(p, q), 6).unwrap().members {
                assert!(w.iter().filter(|&&x| x == s).count() <= 1);
            }
        }
        for d in 0..=6 {
            assert_eq!(frontier(&sqcap(&full(3), p), d).unwrap().members, frontier(&full(3), d).unwrap().members);
        }
    }
}
