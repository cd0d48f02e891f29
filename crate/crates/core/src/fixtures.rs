//! The small named structures used throughout the tests and the CLI.

use crate::structures::{Signature, Structure};

/// `{E/2}`.
pub fn edge_signature() -> Signature {
    Signature::new([("E", 2)]).expect("valid signature")
}

/// `{U0/1, U1/1}`.
pub fn unary_signature() -> Signature {
    Signature::new([("U0", 1), ("U1", 1)]).expect("valid signature")
}

/// Complete loopless digraph on `n` vertices.
pub fn complete_graph(n: usize) -> Structure {
    let edges = (0..n)
        .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| vec![x, y]))
        .collect();
    Structure::from_relations(edge_signature(), n, [("E", edges)]).expect("valid structure")
}

pub fn k2() -> Structure {
    complete_graph(2)
}

pub fn k3() -> Structure {
    complete_graph(3)
}

/// A single arc `0 → 1`.
pub fn p1() -> Structure {
    Structure::from_relations(edge_signature(), 2, [("E", vec![vec![0, 1]])]).expect("valid structure")
}

/// `({0,1}; U0 = {0}, U1 = {1})`.
pub fn u2() -> Structure {
    Structure::from_relations(unary_signature(), 2, [("U0", vec![vec![0]]), ("U1", vec![vec![1]])])
        .expect("valid structure")
}

/// The one-element loop.
pub fn l1() -> Structure {
    Structure::from_relations(edge_signature(), 1, [("E", vec![vec![0, 0]])]).expect("valid structure")
}

/// Looks a fixture up by name (`K2`, `K3`, `P1`, `U2`, `L1`).
pub fn by_name(name: &str) -> Option<Structure> {
    Some(match name {
        "K2" => k2(),
        "K3" => k3(),
        "P1" => p1(),
        "U2" => u2(),
        "L1" => l1(),
        _ => return None,
    })
}

pub fn all() -> Vec<(&'static str, Structure)> {
    vec![("K2", k2()), ("K3", k3()), ("P1", p1()), ("U2", u2()), ("L1", l1())]
}
