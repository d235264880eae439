mod common;

use std::collections::BTreeSet;

use common::*;
use gtcheck_core::complement::{complement_auto, complement_cartesian, complement_dual, verify_complement};
use gtcheck_core::gtype::{sync_product, GlobalType};
use gtcheck_core::realisability::{
    accept_completion, check_p2p_realisable, check_sync_realisable, cross_model_property_test, Check, Verdict,
    Witness,
};
use gtcheck_core::trace::{Arrow, Msc};
use proptest::prelude::*;

fn with_complement(name: &str) -> (GlobalType, GlobalType) {
    let g = fixture(name);
    let c = complement_auto(&g, 6).map(|c| c.gtype).unwrap_or_else(|_| complement_cartesian(&g).gtype);
    (g, c)
}

/// Bounded form of condition (CC): every trace of the projection product is a trace of `g`.
fn cc_by_enumeration(g: &GlobalType, n: usize) -> bool {
    let p = sync_product(&g.project(), "p");
    let traces: BTreeSet<Vec<Arrow>> = bounded_exists(p.automaton(), n);
    traces.iter().all(|w| exists(g.automaton(), w))
}

fn witness_of(c: &Check) -> Option<String> {
    match c {
        Check::Fails(Witness::Execution(e)) => Some(format!("{e:?}")),
        Check::Fails(Witness::Word(w)) => Some(format!("{w:?}")),
        _ => None,
    }
}

#[test]
fn synchronous_verdicts_on_fixtures() {
    let real = fixture("real");
    let v = check_sync_realisable(&real, &complement_cartesian(&real).gtype).unwrap();
    assert!(v.realisable() && v.sanity_lower_inclusion);

    let (nonreal, c) = with_complement("nonreal");
    assert!(verify_complement(&nonreal, &c, 5).unwrap().passed);
    let v = check_sync_realisable(&nonreal, &c).unwrap();
    assert!(!v.cc_holds && v.deadlock_free.is_none());
    let w = v.cc_counterexample.unwrap();
    assert!(!exists(nonreal.automaton(), &w));
    assert!(exists(c.automaton(), &w));
    assert!(accepts(sync_product(&nonreal.project(), "p").automaton(), &w));

    let (deadlock, c) = with_complement("deadlock");
    let v = check_sync_realisable(&deadlock, &c).unwrap();
    assert!(v.cc_holds);
    assert_eq!(v.deadlock_free, Some(false));
    assert!(v.deadlock_witness.is_some());

    for name in FIXTURES {
        let (g, c) = with_complement(name);
        let v = check_sync_realisable(&g, &c).unwrap();
        assert!(v.sanity_lower_inclusion, "{name}");
        assert_eq!(v.realisable(), v.cc_holds && v.deadlock_free == Some(true));
    }
    assert!(check_sync_realisable(&real, &fixture("gsd")).is_err());
}

#[test]
fn cc_matches_enumeration_on_fixtures() {
    for name in FIXTURES {
        let (g, c) = with_complement(name);
        if !verify_complement(&g, &c, 5).unwrap().passed {
            continue;
        }
        let v = check_sync_realisable(&g, &c).unwrap();
        assert_eq!(v.cc_holds, cc_by_enumeration(&g, 5), "{name}");
    }
}

#[test]
fn accept_completion_examples() {
    let gsd = fixture("gsd");
    let c = accept_completion(&gsd);
    let expected: BTreeSet<Vec<Arrow>> =
        ["", "p->q:m1", "p->q':m2", "p->q:m1;r->q':m3"].iter().map(|w| arrows(&gsd, w)).collect();
    assert_eq!(accepted_words(c.automaton(), 5), expected);
    let cc = accept_completion(&c);
    assert_eq!(accepted_words(cc.automaton(), 5), expected);
    assert!(c.member_existential(&Msc::of(&arrows(&gsd, "p->q:m1"))));
}

#[test]
fn p2p_verdicts_on_fixtures() {
    let (real, c) = with_complement("real");
    let v = check_p2p_realisable(&real, &c, 2, 8).unwrap();
    assert!(v.conditions().iter().all(|(_, c)| c.holds()));
    assert_eq!(v.overall(), Verdict::Holds);

    let (cross, c) = with_complement("cross");
    let v = check_p2p_realisable(&cross, &c, 2, 8).unwrap();
    assert!(v.cond1_rsc.fails());
    assert_eq!(v.overall(), Verdict::Fails);
    match &v.cond1_rsc {
        Check::Fails(Witness::Execution(e)) => {
            let m = gtcheck_core::semantics::msc_of_execution(e, 2);
            assert!(!m.is_rsc_schedulable());
            assert_eq!(m.num_events(), 4);
        }
        other => panic!("{other:?}"),
    }

    let (nonreal, c) = with_complement("nonreal");
    let v = check_p2p_realisable(&nonreal, &c, 2, 8).unwrap();
    assert!(v.cond4_synch.fails());
    assert_eq!(v.overall(), Verdict::Fails);

    let (gsd, c) = with_complement("gsd");
    let v = check_p2p_realisable(&gsd, &c, 2, 8).unwrap();
    assert!(v.cond4_synch.holds());
}

#[test]
fn overall_verdict_is_a_conjunction() {
    for name in FIXTURES {
        let (g, c) = with_complement(name);
        let v = check_p2p_realisable(&g, &c, 2, 6).unwrap();
        let conds = v.conditions();
        let expected = if conds.iter().any(|(_, c)| c.fails()) {
            Verdict::Fails
        } else if conds.iter().all(|(_, c)| c.holds()) {
            Verdict::Holds
        } else {
            Verdict::Unknown
        };
        assert_eq!(v.overall(), expected, "{name}");
        assert!(!v.cond4_synch.is_unknown());
    }
}

#[test]
fn bounded_failures_persist_at_larger_bounds() {
    for name in FIXTURES {
        let (g, c) = with_complement(name);
        let small = check_p2p_realisable(&g, &c, 1, 6).unwrap();
        for bound in 2..=3 {
            let big = check_p2p_realisable(&g, &c, bound, 6).unwrap();
            for ((label, a), (_, b)) in small.conditions().iter().zip(big.conditions().iter()).take(3) {
                if let Some(w) = witness_of(a) {
                    assert_eq!(witness_of(b), Some(w), "{name} {label} at {bound}");
                }
            }
            assert_eq!(big.cond4_synch.holds(), small.cond4_synch.holds());
        }
    }
}

#[test]
fn cross_model_examples() {
    let empty = cross_model_property_test(&[], 2, 6).unwrap();
    assert!(empty.passed() && empty.checked == 0);
    let (nonreal, c) = with_complement("nonreal");
    let r = cross_model_property_test(&[(nonreal, c)], 2, 6).unwrap();
    assert!(r.passed());
    assert_eq!(r.p2p_realisable, 0);
    let suite: Vec<(GlobalType, GlobalType)> = FIXTURES.iter().map(|n| with_complement(n)).collect();
    let r = cross_model_property_test(&suite, 2, 6).unwrap();
    assert!(r.passed());
    assert_eq!(r.checked, FIXTURES.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cc_agrees_with_enumeration(seed in any::<u64>(), processes in 2usize..=3) {
        let g = random_type(&mut rng(seed), Shape::small(processes), "r").determinise();
        let c = complement_dual(&g).unwrap();
        prop_assume!(verify_complement(&g, &c, 5).unwrap().passed);
        let v = check_sync_realisable(&g, &c).unwrap();
        prop_assert!(v.sanity_lower_inclusion);
        if v.cc_holds {
            prop_assert!(cc_by_enumeration(&g, 5));
        } else {
            let w = v.cc_counterexample.clone().unwrap();
            prop_assert!(!exists(g.automaton(), &w));
            if w.len() <= 5 {
                prop_assert!(!cc_by_enumeration(&g, 5));
            }
        }
    }

    #[test]
    fn p2p_realisable_implies_synch_realisable(seed in any::<u64>(), processes in 2usize..=3) {
        let g = random_type(&mut rng(seed), Shape::small(processes), "r").determinise();
        let c = complement_dual(&g).unwrap();
        let v = check_p2p_realisable(&g, &c, 2, 6).unwrap();
        if v.overall() == Verdict::Holds {
            prop_assert!(check_sync_realisable(&g, &c).unwrap().realisable());
        }
        prop_assert!(!v.cond4_synch.is_unknown());
    }
}
