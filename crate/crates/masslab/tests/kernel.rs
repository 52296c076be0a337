use masslab::kernel::{
    corpus, fixpoint, library, recursion, DiagCoding, Machine, MachineBuilder, Nat, Outcome, Program,
};
use proptest::prelude::*;

fn idx(p: &Program) -> Nat {
    p.encode()
}

#[test]
fn constant_echo_and_loop() {
    let m = Machine::standard();
    assert_eq!(m.run(&idx(&library::constant(7)), &[], 0, 10).unwrap(), Outcome::Halted(7u64.into()));
    assert_eq!(m.run(&idx(&library::echo()), &[3, 1, 4], 1, 3).unwrap(), Outcome::Halted(1u64.into()));
    assert_eq!(m.run(&idx(&library::looping()), &[], 0, 1_000_000).unwrap(), Outcome::StillRunning);
}

#[test]
fn phi_sigma_uses_word_length_as_budget() {
    let m = Machine::standard();
    assert_eq!(
        m.phi_sigma(&idx(&library::constant(0)), &[1, 1], 5).unwrap(),
        Outcome::Halted(0u64.into())
    );
    assert_eq!(m.phi_sigma(&idx(&library::constant(0)), &[], 0).unwrap(), Outcome::StillRunning);
    let slow = idx(&library::slow(10));
    for len in 0..20 {
        let sigma = vec![0; len];
        let halted = matches!(m.phi_sigma(&slow, &sigma, 0).unwrap(), Outcome::Halted(_));
        assert_eq!(halted, len >= 10, "length {len}");
    }
}

#[test]
fn reads_past_the_oracle_are_reported() {
    let m = Machine::standard();
    assert_eq!(m.run(&idx(&library::echo()), &[5], 3, 100).unwrap(), Outcome::OracleOutOfRange);
}

#[test]
fn malformed_index_is_a_decode_error() {
    let m = Machine::standard();
    assert!(m.run(&Nat::from(5000u64), &[], 0, 10).is_err());
    assert!(m.run(&Nat::from(3u64), &[], 0, 10).is_err());
}

#[test]
fn smn_freezes_leading_arguments() {
    let m = Machine::standard();
    let add = idx(&library::add());
    for a in 0..6u64 {
        for b in 0..6u64 {
            let e = m.smn(&add, &[a.into()]).unwrap();
            assert_eq!(m.run(&e, &[], b, 1000).unwrap(), Outcome::Halted((a + b).into()));
        }
    }
    assert_eq!(m.smn(&add, &[]).unwrap(), add);
    assert_eq!(m.smn(&add, &[2u64.into()]).unwrap(), m.smn(&add, &[2u64.into()]).unwrap());
    assert!(m.smn(&Nat::from(9000u64), &[1u64.into()]).is_err());
}

#[test]
fn nested_smn_keeps_argument_order() {
    let m = Machine::standard();
    let prog = masslab::kernel::assemble(".arity 3\nset r9 10\nmul r3 r0 r9\nadd r3 r3 r1\nmul r3 r3 r9\nadd r3 r3 r2\nhalt r3").unwrap();
    let e = idx(&prog);
    let once = m.smn(&e, &[1u64.into()]).unwrap();
    let twice = m.smn(&once, &[2u64.into()]).unwrap();
    assert_eq!(m.run(&twice, &[], 3, 1000).unwrap(), Outcome::Halted(123u64.into()));
    let both = m.smn(&e, &[1u64.into(), 2u64.into()]).unwrap();
    assert_eq!(m.run(&both, &[], 3, 1000).unwrap(), Outcome::Halted(123u64.into()));
}

#[test]
fn fixpoint_of_constant_builder() {
    let m = Machine::standard();
    let b = idx(&library::constant_builder(42));
    let n = fixpoint(&m, &b, 10_000).unwrap();
    assert_eq!(m.run(&n, &[], 0, 10_000).unwrap(), Outcome::Halted(42u64.into()));
}

#[test]
fn fixpoint_of_quine_builder_outputs_itself() {
    let m = Machine::standard();
    let b = idx(&library::quine_builder());
    let n = fixpoint(&m, &b, 10_000).unwrap();
    assert_eq!(m.run(&n, &[], 0, 10_000).unwrap(), Outcome::Halted(n.clone()));
}

#[test]
fn fixpoint_of_identity_builder_exists() {
    let m = Machine::standard();
    let b = idx(&library::identity_builder());
    let n = fixpoint(&m, &b, 10_000).unwrap();
    assert_eq!(recursion::apply_builder(&m, &b, &n, 10_000).unwrap(), n);
}

#[test]
fn fixpoint_rejects_divergent_builder() {
    let m = Machine::standard();
    assert!(fixpoint(&m, &idx(&library::looping()), 1000).is_err());
}

#[test]
fn recursion_grid_agreement() {
    let m = Machine::standard();
    for b in [library::constant_builder(42), library::quine_builder(), library::constant_builder(3)] {
        let b = idx(&b);
        let n = fixpoint(&m, &b, 10_000).unwrap();
        let bn = recursion::apply_builder(&m, &b, &n, 10_000).unwrap();
        for len in 0..10 {
            let oracle: Vec<u64> = (0..len as u64).collect();
            for x in 0..10 {
                let lhs = m.run(&n, &oracle, x, 10_000).unwrap();
                let rhs = m.run(&bn, &oracle, x, 10_000).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn diag_pair_of_constants() {
    let m = Machine::standard();
    let c3 = idx(&library::constant(3));
    let z = m.diag_pair(&c3, &c3);
    assert_eq!(
        m.run_stats(&z, &[], z.clone(), 10_000).unwrap().outcome,
        Outcome::Halted(Nat::pair(&3u64.into(), &3u64.into()))
    );
    let lp = idx(&library::looping());
    let zl = m.diag_pair(&lp, &c3);
    for budget in [10, 100, 10_000] {
        assert_eq!(m.run_stats(&zl, &[], zl.clone(), budget).unwrap().outcome, Outcome::StillRunning);
    }
}

#[test]
fn diag_pair_is_injective_on_samples() {
    let m = Machine::standard();
    let mut seen = std::collections::HashSet::new();
    for v in 0..10u64 {
        for u in 0..10u64 {
            assert!(seen.insert(m.diag_pair(&Nat::from(v * 7919), &Nat::from(u * 104729))));
        }
    }
}

#[test]
fn diag_identity_for_halting_constants() {
    let m = Machine::standard();
    for a in 0..5u64 {
        for b in 0..10u64 {
            let (v, u) = (idx(&library::constant(a)), idx(&library::constant(b)));
            let z = m.diag_pair(&v, &u);
            let out = m.run_stats(&z, &[], z.clone(), 10_000).unwrap().outcome;
            assert_eq!(out, Outcome::Halted(Nat::pair(&a.into(), &b.into())));
        }
    }
}

#[test]
fn base_coded_diag_slots() {
    let mut b = MachineBuilder::new().coding(DiagCoding::Base(2));
    b.push("one", library::constant(1)).unwrap();
    b.push("zero", library::constant(0)).unwrap();
    let z = b.push_diag(0, 1).unwrap();
    let zz = b.push_diag(0, 0).unwrap();
    let m = b.build();
    assert_eq!(m.diag_pair(&0u64.into(), &1u64.into()), Nat::from(z));
    assert_eq!(m.run(&z.into(), &[], z, 1000).unwrap(), Outcome::Halted(2u64.into()));
    assert_eq!(m.run(&zz.into(), &[], zz, 1000).unwrap(), Outcome::Halted(3u64.into()));
}

#[test]
fn corpus_round_trips() {
    let records = library::corpus();
    for (_, p) in &records {
        assert_eq!(&Program::decode(&p.encode()).unwrap(), p);
    }
    let text = corpus::write(&records);
    let parsed = corpus::parse(&text).unwrap();
    assert_eq!(parsed.len(), records.len());
    for (r, (name, p)) in parsed.iter().zip(&records) {
        assert_eq!(&r.name, name);
        assert_eq!(&r.program, p);
    }
    let shipped = include_str!("../fixtures/corpus.masm");
    assert_eq!(shipped, text, "fixtures/corpus.masm is stale");
}

#[test]
fn corpus_rejects_wrong_index() {
    let bad = "@ 70000 wrong\nhalt r0\n";
    assert!(corpus::parse(bad).is_err());
}

fn arb_oracle() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0u64..4, 0..12)
}

fn sample_programs() -> Vec<Nat> {
    library::corpus()
        .into_iter()
        .filter(|(_, p)| p.arity == 1)
        .map(|(_, p)| p.encode())
        .collect()
}

proptest! {
    #[test]
    fn budget_monotone(pi in 0usize..12, oracle in arb_oracle(), x in 0u64..6, s in 0u64..40, extra in 0u64..40) {
        let m = Machine::standard();
        let progs = sample_programs();
        let e = &progs[pi % progs.len()];
        if let Outcome::Halted(v) = m.run(e, &oracle, x, s).unwrap() {
            prop_assert_eq!(m.run(e, &oracle, x, s + extra).unwrap(), Outcome::Halted(v));
        }
    }

    #[test]
    fn oracle_padding_preserves_halting(pi in 0usize..12, oracle in arb_oracle(), pad in arb_oracle(), x in 0u64..6) {
        let m = Machine::standard();
        let progs = sample_programs();
        let e = &progs[pi % progs.len()];
        let stats = m.run_stats(e, &oracle, x.into(), 200).unwrap();
        if let Outcome::Halted(_) = stats.outcome {
            let mut longer = oracle.clone();
            longer.extend(pad);
            prop_assert_eq!(m.run(e, &longer, x, 200).unwrap(), stats.outcome.clone());
            if let Some(r) = stats.max_read {
                prop_assert_eq!(m.run(e, &oracle[..=r], x, 200).unwrap(), stats.outcome);
            }
        }
    }

    #[test]
    fn smn_add_exhaustive(a in 0u64..1000, b in 0u64..1000) {
        let m = Machine::standard();
        let e = m.smn(&library::add().encode(), &[a.into()]).unwrap();
        prop_assert_eq!(m.run(&e, &[], b, 100).unwrap(), Outcome::Halted((a + b).into()));
    }
}
