mod common;

use common::{brute_hom_exists, brute_qcsp, random_structure};
use itertools::Itertools;
use proptest::prelude::*;
use qcsp_core::collapse::{apply_collapsing, build_collapse_structure, chen_reduction, qcsp_via_collapsibility};
use qcsp_core::fixtures;
use qcsp_core::format::{parse_sentence, parse_structure, print_sentence, print_structure};
use qcsp_core::generate::{exhaustive_sentences, SentenceConfig, SentenceSampler};
use qcsp_core::logic::{
    canonical_database, canonical_query, from_partitioned, normalize_alternation, to_partitioned, BlockTag,
};
use qcsp_core::microcosm::{
    backward_reduce, backward_reduce_traced, forward_reduce, microcosm_structure, satisfied_by_constant,
};
use qcsp_core::solvers::{csp_eval, qcsp_eval, qcsp_eval_with, GameOptions};
use qcsp_core::structures::find_homomorphism;
use qcsp_core::{Atom, Error, Mapping, PHSentence, Quantifier, Structure, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const F: &str = "F";

fn sample(seed: u64, config: SentenceConfig, n: usize) -> Vec<PHSentence> {
    SentenceSampler::new(seed, config).take(n).collect()
}

fn sorted_atoms(phi: &PHSentence) -> Vec<Atom> {
    phi.body().iter().cloned().sorted().dedup().collect()
}

fn edge_sentence() -> impl Strategy<Value = PHSentence> {
    any::<u64>().prop_map(|seed| {
        let config = SentenceConfig::over(&fixtures::edge_signature()).vars(1, 5).atoms(5);
        SentenceSampler::new(seed, config).sample()
    })
}

fn edge_pp_sentence() -> impl Strategy<Value = PHSentence> {
    any::<u64>().prop_map(|seed| {
        let config = SentenceConfig::over(&fixtures::edge_signature())
            .vars(1, 5)
            .atoms(5)
            .universal_probability(0.0);
        SentenceSampler::new(seed, config).sample()
    })
}

fn edge_structure() -> impl Strategy<Value = Structure> {
    (1usize..=3, any::<u64>(), 0.2f64..0.8).prop_map(|(size, seed, density)| {
        random_structure(&mut ChaCha8Rng::seed_from_u64(seed), &fixtures::edge_signature(), size, density)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn csp_is_homomorphism_from_the_database(b in edge_structure(), phi in edge_pp_sentence()) {
        let db = canonical_database(&phi, b.signature()).unwrap();
        let hom = find_homomorphism(&db.structure, &b, &db.pins).unwrap().is_some();
        prop_assert_eq!(csp_eval(&b, &phi).unwrap(), hom);
        prop_assert_eq!(hom, brute_hom_exists(&db.structure, &b));
    }

    #[test]
    fn game_evaluation_matches_enumeration(b in edge_structure(), phi in edge_sentence()) {
        prop_assert_eq!(qcsp_eval(&b, &phi).unwrap(), brute_qcsp(&b, &phi));
    }

    #[test]
    fn canonical_query_is_equivalent(phi in edge_pp_sentence()) {
        let db = canonical_database(&phi, &fixtures::edge_signature()).unwrap();
        let q = canonical_query(&db.structure);
        for b in [fixtures::k2(), fixtures::k3(), fixtures::p1(), fixtures::l1()] {
            prop_assert_eq!(csp_eval(&b, &phi).unwrap(), csp_eval(&b, &q).unwrap());
        }
    }

    #[test]
    fn partitioned_round_trip(phi in edge_sentence()) {
        let back = from_partitioned(&to_partitioned(&phi).unwrap()).unwrap();
        prop_assert_eq!(back.prefix(), phi.prefix());
        prop_assert_eq!(sorted_atoms(&back), sorted_atoms(&phi));
    }

    #[test]
    fn sentence_text_round_trip(phi in edge_sentence()) {
        prop_assert_eq!(parse_sentence(&print_sentence(&phi)).unwrap(), phi);
    }

    #[test]
    fn structure_text_round_trip(b in edge_structure()) {
        prop_assert_eq!(parse_structure(&print_structure(&b)).unwrap(), b);
    }

    #[test]
    fn backward_output_is_well_shaped(seed in any::<u64>()) {
        let sig = fixtures::edge_signature();
        let config = SentenceConfig::over(&sig).with_symbol(F, 2, 2).vars(1, 6).atoms(6);
        let phi = SentenceSampler::new(seed, config).sample();
        let trace = backward_reduce_traced(&phi, F).unwrap();
        prop_assert!(trace.output.body().iter().all(|a| a.symbol != F));
        let Some(p) = trace.pruned else {
            prop_assert_eq!(phi.universals().count(), 0);
            return Ok(());
        };
        if trace.rejection.is_some() {
            prop_assert!(trace.output.is_bottom());
            return Ok(());
        }
        let base = p.base();
        let edges: Vec<(usize, usize)> = base.relation(F).into_iter().flatten().map(|t| (t[0], t[1])).collect();
        let universals = p.universal_elements();
        // Every kept existential is the head of an F-path from a universal.
        let mut reached = vec![false; base.size()];
        let mut stack = universals.clone();
        let mut seen = vec![false; base.size()];
        while let Some(x) = stack.pop() {
            for &(s, t) in &edges {
                if s == x && !reached[t] {
                    reached[t] = true;
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        for e in p.existential_elements() {
            prop_assert!(reached[e], "existential {} kept without a path", p.labels()[e]);
        }
        // An F-edge into a universal comes from the universal itself or
        // from an existential quantified after it.
        for &(s, t) in &edges {
            if p.tag_of(t) == BlockTag::A && s != t {
                prop_assert_eq!(p.tag_of(s), BlockTag::E);
                prop_assert!(p.block_of(s) > p.block_of(t));
            }
        }
        prop_assert!(p.universal_elements().len() == phi.universals().count());
    }
}

#[test]
fn bottom_is_false_everywhere() {
    for (_, b) in fixtures::all() {
        assert!(!qcsp_eval(&b, &PHSentence::bottom()).unwrap());
        assert!(!csp_eval(&b, &PHSentence::bottom()).unwrap());
    }
}

#[test]
fn evaluators_agree_on_existential_sentences() {
    for (i, (name, b)) in fixtures::all().into_iter().enumerate() {
        let config = SentenceConfig::over(b.signature()).vars(1, 6).atoms(6).universal_probability(0.0);
        for phi in sample(i as u64, config, 500) {
            assert_eq!(qcsp_eval(&b, &phi).unwrap(), csp_eval(&b, &phi).unwrap(), "{name}: {phi}");
        }
    }
}

#[test]
fn weakening_a_universal_keeps_truth() {
    for (i, (name, b)) in fixtures::all().into_iter().enumerate() {
        let config = SentenceConfig::over(b.signature()).vars(1, 6).atoms(5);
        for phi in sample(50 + i as u64, config, 200) {
            if !qcsp_eval(&b, &phi).unwrap() {
                continue;
            }
            for (pos, (q, _)) in phi.prefix().iter().enumerate() {
                if *q != Quantifier::Forall {
                    continue;
                }
                let mut prefix = phi.prefix().to_vec();
                prefix[pos].0 = Quantifier::Exists;
                let weaker = PHSentence::new(prefix, phi.body().to_vec()).unwrap();
                assert!(qcsp_eval(&b, &weaker).unwrap(), "{name}: {phi} at {pos}");
            }
        }
    }
}

#[test]
fn normalization_preserves_truth() {
    for (i, (name, b)) in fixtures::all().into_iter().enumerate() {
        let config = SentenceConfig::over(b.signature()).vars(1, 6).atoms(5);
        for phi in sample(100 + i as u64, config, 200) {
            let n = normalize_alternation(&phi).unwrap();
            let alternates = n
                .prefix()
                .iter()
                .enumerate()
                .all(|(k, (q, _))| *q == if k % 2 == 0 { Quantifier::Forall } else { Quantifier::Exists });
            assert!(alternates && n.prefix().len().is_multiple_of(2), "{n}");
            assert_eq!(qcsp_eval(&b, &phi).unwrap(), qcsp_eval(&b, &n).unwrap(), "{name}: {phi}");
        }
    }
}

#[test]
fn constants_pin_elements() {
    let b = fixtures::p1();
    // ∃v E(@0,v) holds on the path 0 → 1, ∃v E(@1,v) does not.
    let at = |k| PHSentence::exists(&["v"], vec![Atom::new("E", vec![Term::Const(k), Term::var("v")])]).unwrap();
    assert!(csp_eval(&b, &at(0)).unwrap());
    assert!(!csp_eval(&b, &at(1)).unwrap());
    assert!(qcsp_eval(&b, &at(0)).unwrap());
    assert!(!qcsp_eval(&b, &at(1)).unwrap());
    assert_eq!(parse_sentence(&print_sentence(&at(1))).unwrap(), at(1));
}

#[test]
fn node_budget_is_enforced() {
    let b = fixtures::k3();
    let vars: Vec<String> = (0..8).map(|i| format!("x{i}")).collect();
    let prefix = vars.iter().map(|v| (Quantifier::Forall, v.clone())).collect();
    let phi = PHSentence::new(prefix, vec![]).unwrap();
    let err = qcsp_eval_with(&b, &phi, GameOptions { node_budget: 100 }).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded(_)));
    assert!(qcsp_eval(&b, &phi).unwrap());
}

#[test]
fn collapsing_a_true_sentence_keeps_it_true() {
    let cores = [fixtures::k2(), fixtures::u2(), fixtures::l1(), fixtures::k3()];
    for (i, b) in cores.into_iter().enumerate() {
        let config = SentenceConfig::over(b.signature()).vars(1, 6).atoms(4).quantifiers(4, 3);
        for phi in sample(200 + i as u64, config, 100) {
            if !qcsp_eval(&b, &phi).unwrap() {
                continue;
            }
            for j in 0..=3 {
                for a in b.elements() {
                    assert!(qcsp_via_collapsibility(&b, &phi, j, a).unwrap(), "{phi} j={j} a={a}");
                }
            }
        }
    }
}

#[test]
fn collapse_structure_agrees_with_expanded_sentence() {
    for b in [fixtures::k2(), fixtures::u2()] {
        for phi in exhaustive_sentences(b.signature(), 2, 2, 3) {
            let universals: Vec<&str> = phi.universals().collect();
            for lambda in universals.iter().copied().powerset() {
                for a in b.elements() {
                    let d = build_collapse_structure(&b, &phi, &lambda, a).unwrap();
                    let hom = find_homomorphism(&d, &b, &Mapping::new()).unwrap().is_some();
                    let collapsed = apply_collapsing(&phi, &lambda, a).unwrap();
                    let expanded = chen_reduction(&collapsed, b.size(), lambda.len()).unwrap();
                    assert_eq!(hom, csp_eval(&b, &expanded).unwrap(), "{phi} {lambda:?} a={a}");
                }
            }
        }
    }
}

#[test]
fn forward_then_backward_is_equivalent() {
    let fixtures = [("K2", fixtures::k2()), ("P1", fixtures::p1()), ("U2", fixtures::u2()), ("K3", fixtures::k3())];
    for (i, (name, b)) in fixtures.into_iter().enumerate() {
        let sig = b.signature();
        let random = sample(300 + i as u64, SentenceConfig::over(sig).vars(1, 7).atoms(5), 200);
        for phi in exhaustive_sentences(sig, 2, 2, 3).into_iter().chain(random) {
            let forward = forward_reduce(&phi, F).unwrap();
            let round = backward_reduce(&forward, F).unwrap();
            assert_eq!(qcsp_eval(&b, &phi).unwrap(), qcsp_eval(&b, &round).unwrap(), "{name}: {phi}");
        }
    }
}

#[test]
fn forward_instances_are_c_valid() {
    for (_, b) in fixtures::all() {
        let c = microcosm_structure(&b, F).unwrap();
        for phi in exhaustive_sentences(b.signature(), 2, 2, 3) {
            assert!(satisfied_by_constant(&c, &forward_reduce(&phi, F).unwrap(), b.size()));
        }
    }
}
