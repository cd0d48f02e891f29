//! Brute-force reference implementations shared by the integration tests.
//! Nothing here uses the library's search code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use itertools::Itertools;
use qcsp_core::{Element, PHSentence, Quantifier, Signature, Structure, Term};
use rand::Rng;

/// Plain game-tree evaluation: every variable is bound before any atom is
/// looked at.
pub fn brute_qcsp(b: &Structure, phi: &PHSentence) -> bool {
    if phi.is_bottom() {
        return false;
    }
    let mut env = BTreeMap::new();
    play(b, phi, 0, &mut env)
}

fn play(b: &Structure, phi: &PHSentence, depth: usize, env: &mut BTreeMap<String, Element>) -> bool {
    let Some((q, v)) = phi.prefix().get(depth) else {
        return phi.body().iter().all(|a| {
            let t: Vec<Element> = a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(x) => env[x],
                    Term::Const(c) => *c,
                })
                .collect();
            b.holds(&a.symbol, &t)
        });
    };
    let outcome = |x: Element, env: &mut BTreeMap<String, Element>| {
        env.insert(v.clone(), x);
        let r = play(b, phi, depth + 1, env);
        env.remove(v);
        r
    };
    match q {
        Quantifier::Forall => b.elements().all(|x| outcome(x, env)),
        Quantifier::Exists => b.elements().any(|x| outcome(x, env)),
    }
}

/// Every total map `b -> b` that preserves all relations.
pub fn brute_endomorphisms(b: &Structure) -> Vec<Vec<Element>> {
    let m = b.size();
    (0..m)
        .map(|_| 0..m)
        .multi_cartesian_product()
        .filter(|h| preserves(b, b, h))
        .collect()
}

pub fn preserves(src: &Structure, dst: &Structure, h: &[Element]) -> bool {
    src.relations().all(|(rel, _, tuples)| {
        tuples
            .iter()
            .all(|t| dst.holds(rel, &t.iter().map(|&x| h[x]).collect::<Vec<_>>()))
    })
}

pub fn brute_is_core(b: &Structure) -> bool {
    brute_endomorphisms(b).iter().all(|h| h.iter().all_unique())
}

pub fn brute_hom_exists(src: &Structure, dst: &Structure) -> bool {
    (0..src.size())
        .map(|_| 0..dst.size())
        .multi_cartesian_product()
        .any(|h| preserves(src, dst, &h))
}

/// A random structure over `sig` with `size` elements; each tuple is present
/// with probability `density`.
pub fn random_structure(rng: &mut impl Rng, sig: &Signature, size: usize, density: f64) -> Structure {
    let mut s = Structure::new(sig.clone(), size).unwrap();
    for (name, arity) in sig.symbols() {
        for t in (0..*arity).map(|_| 0..size).multi_cartesian_product() {
            if rng.gen_bool(density) {
                s.add_tuple(name, t).unwrap();
            }
        }
    }
    s
}

/// The directed graph on `size` vertices whose edges are the set bits of
/// `mask`, read row-major.
pub fn graph_from_mask(size: usize, mask: u32) -> Structure {
    let mut s = Structure::new(qcsp_core::fixtures::edge_signature(), size).unwrap();
    for i in 0..size * size {
        if mask >> i & 1 == 1 {
            s.add_tuple("E", vec![i / size, i % size]).unwrap();
        }
    }
    s
}
