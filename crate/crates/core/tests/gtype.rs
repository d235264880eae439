mod common;

use std::collections::BTreeSet;

use common::*;
use gtcheck_core::automata::Nfa;
use gtcheck_core::complement::complement_renunciation;
use gtcheck_core::formats::parse_gt;
use gtcheck_core::gtype::{sync_product, GlobalType};
use gtcheck_core::oracle::{bounded_existential, enumerate_canonical};
use gtcheck_core::semantics::Action;
use gtcheck_core::trace::{Arrow, Msc};
use proptest::prelude::*;

fn local_words(g: &GlobalType, process: &str, n: usize) -> BTreeSet<Vec<String>> {
    let system = g.project();
    let p = g.decl().process(process).unwrap();
    let m = system.machine(p).automaton();
    let mut out = BTreeSet::new();
    let mut layer: Vec<Vec<Action>> = vec![vec![]];
    for len in 0..=n {
        for w in &layer {
            if m.accepts(w) {
                out.insert(w.iter().map(|a| a.show(g.decl())).collect());
            }
        }
        if len == n {
            break;
        }
        layer = layer
            .iter()
            .flat_map(|w| {
                m.alphabet().iter().map(move |a| {
                    let mut v = w.clone();
                    v.push(*a);
                    v
                })
            })
            .collect();
    }
    out
}

fn strings(v: &[&[&str]]) -> BTreeSet<Vec<String>> {
    v.iter().map(|w| w.iter().map(|s| s.to_string()).collect()).collect()
}

#[test]
fn choices_examples() {
    let gsd = fixture("gsd");
    assert_eq!(gsd.choices(gsd.state("s0").unwrap()).unwrap(), arrows(&gsd, "p->q:m1;p->q':m2"));
    assert_eq!(gsd.choices(gsd.state("s1").unwrap()).unwrap(), arrows(&gsd, "r->q':m3"));
    assert!(gsd.choices(gsd.state("s3").unwrap()).unwrap().is_empty());
    assert!(gsd.choices(99).is_err());
}

#[test]
fn classification_examples() {
    let gsd = fixture("gsd");
    let g0 = fixture("g0");
    assert!(gsd.is_deterministic() && gsd.is_sender_driven() && gsd.is_commutation_deterministic());
    assert!(g0.is_commutation_closed());
    assert!(!g0.is_sender_driven() && !g0.is_commutation_deterministic());
    assert!(!complement_renunciation(&gsd).unwrap().is_commutation_closed());
    for name in ["real", "deadlock", "cross", "single"] {
        assert!(fixture(name).is_commutation_closed(), "{name}");
    }
    let lone = parse_gt("gtype lone { processes: p, q; messages: m; states: s0*; }").unwrap();
    assert!(lone.is_sender_driven());
    let two = parse_gt("gtype two { processes: p, q; messages: m; states: a*, b*+; }").unwrap();
    assert!(!two.is_deterministic());
    assert!(two.determinise().is_deterministic());
}

#[test]
fn projection_examples() {
    let single = fixture("single");
    assert_eq!(local_words(&single, "p", 3), strings(&[&["p!q:m"]]));
    assert_eq!(local_words(&single, "q", 3), strings(&[&["q?p:m"]]));

    let gsd = fixture("gsd");
    let one: BTreeSet<Vec<String>> = local_words(&gsd, "p", 1).into_iter().filter(|w| w.len() == 1).collect();
    assert_eq!(one, strings(&[&["p!q:m1"], &["p!q':m2"]]));

    let g0 = fixture("g0");
    let r = local_words(&g0, "r", 4);
    let expected: BTreeSet<Vec<String>> = (0..=4).map(|k| vec!["r!s:m2".to_string(); k]).collect();
    assert_eq!(r, expected);
}

#[test]
fn synchronous_product_examples() {
    let single = fixture("single");
    let p = sync_product(&single.project(), "p");
    assert_eq!(accepted_words(p.automaton(), 4), BTreeSet::from([arrows(&single, "p->q:m")]));
    for g in fixtures() {
        let p = sync_product(&g.project(), "p");
        for w in accepted_words(g.automaton(), 6) {
            assert!(accepts(p.automaton(), &w), "{}", g.name());
        }
    }
}

#[test]
fn gt_product_examples() {
    let gsd = fixture("gsd");
    let mut all = Nfa::new(gsd.arrows().iter().copied());
    let s = all.add_state("all", true);
    all.set_initial(s).unwrap();
    for a in gsd.arrows() {
        all.add_transition(s, Some(a), s).unwrap();
    }
    let all = GlobalType::new("all", gsd.decl().clone(), all).unwrap();
    assert_eq!(
        bounded_existential(&gsd.product(&all).unwrap(), 5).unwrap(),
        bounded_existential(&gsd, 5).unwrap()
    );
    let g0 = fixture("g0");
    let gg = g0.product(&g0).unwrap();
    assert_eq!(accepted_words(gg.automaton(), 6), accepted_words(g0.automaton(), 6));
    assert!(gsd.product(&g0).is_err());
}

#[test]
fn existential_membership_examples() {
    let gsd = fixture("gsd");
    let m1 = Msc::of(&arrows(&gsd, "p->q:m1;r->q':m3"));
    let m2 = Msc::of(&arrows(&gsd, "p->q':m2"));
    assert!(gsd.member_existential(&m1) && gsd.member_existential(&m2));
    let r = complement_renunciation(&gsd).unwrap();
    assert!(!r.member_existential(&m2) && !r.member_existential(&m1));
    assert!(!gsd.member_existential(&Msc::empty()));
    assert!(fixture("g0").member_existential(&Msc::empty()));
}

#[test]
fn universal_membership_examples() {
    let gsd = fixture("gsd");
    let m1 = Msc::of(&arrows(&gsd, "p->q:m1;r->q':m3"));
    assert!(!gsd.member_universal(&m1));
    assert!(gsd.member_universal(&Msc::of(&arrows(&gsd, "p->q':m2"))));
    assert!(!gsd.member_universal(&Msc::empty()));
    let g0 = fixture("g0");
    assert!(g0.member_universal(&Msc::empty()));
    for m in enumerate_canonical(g0.arrows(), 5).unwrap() {
        assert_eq!(g0.member_universal(&m), g0.member_existential(&m));
    }
}

#[test]
fn membership_agrees_with_oracle_on_fixtures() {
    for g in fixtures() {
        let dual = dual_of(&g);
        for m in enumerate_canonical(g.arrows(), 5).unwrap() {
            assert_eq!(g.member_existential(&m), exists(g.automaton(), m.word()), "{}", g.name());
            assert_eq!(g.member_universal(&m), forall(g.automaton(), m.word()), "{}", g.name());
            assert_eq!(dual.member_existential(&m), !g.member_universal(&m), "{}", g.name());
        }
    }
}

fn dual_of(g: &GlobalType) -> GlobalType {
    let nfa = g.automaton().determinise().complete().dual().to_nfa();
    GlobalType::new("dual", g.decl().clone(), nfa).unwrap()
}

fn shape(processes: usize) -> Shape {
    Shape::small(processes)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_types_agree_with_oracles(seed in any::<u64>(), processes in 2usize..=4) {
        let g = random_type(&mut rng(seed), shape(processes), "r");
        let det = g.determinise();
        prop_assert_eq!(bounded_existential(&g, 4).unwrap(), bounded_existential(&det, 4).unwrap());
        let universe: BTreeSet<Vec<Arrow>> = universe(g.arrows(), 4);
        for w in &universe {
            let m = Msc::of(w);
            prop_assert_eq!(g.member_existential(&m), exists(g.automaton(), w));
            prop_assert_eq!(g.member_universal(&m), forall(g.automaton(), w));
        }
        let c = g.classify();
        prop_assert!(!c.sender_driven || c.commutation_deterministic);
        prop_assert!(!c.commutation_deterministic || c.deterministic);
        prop_assert!(!c.sender_driven || c.deterministic);
        prop_assert_eq!(c.participant_count, g.participants().len());
        if processes <= 3 {
            prop_assert!(c.commutation_closed);
        }
        prop_assert!(sync_product(&g.project(), "p").is_commutation_closed());
    }

    #[test]
    fn next_arrow_recursion_matches_membership(seed in any::<u64>()) {
        let s = Shape { deterministic: true, commutation_deterministic: true, ..shape(4) };
        let g = random_type(&mut rng(seed), s, "cd");
        for m in enumerate_canonical(g.arrows(), 4).unwrap() {
            prop_assert_eq!(g.member_by_next_msc(&m).unwrap(), g.member_existential(&m));
        }
    }
}

#[test]
fn next_arrow_recursion_needs_commutation_determinism() {
    let g0 = fixture("g0");
    assert!(g0.member_by_next_msc(&Msc::empty()).is_err());
}
