//! The c-valid structure `C` built from any `B`, and the reductions in both
//! directions between QCSP(B) and QCSP(C).
//!
//! `C` adds one element `c` to `B`. Every relation of `B` gains all tuples
//! that mention `c`, and the new binary relation `F` holds everywhere except
//! on pairs `(x, c)` with `x` in `B`. So along an `F`-edge, membership in
//! `B` propagates forwards and being `c` propagates backwards.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::logic::{
    from_partitioned, to_partitioned, Atom, BlockTag, PHSentence, PartitionedStructure, Quantifier,
    Term,
};
use crate::structures::{reduct, Element, Structure};

pub const DEFAULT_F_SYMBOL: &str = "F";

pub fn microcosm_structure(b: &Structure, f_name: &str) -> Result<Structure> {
    let signature = b.signature().extended(f_name, 2)?;
    let m = b.size();
    let c = m;
    let mut out = Structure::new(signature, m + 1)?;
    for (rel, arity, tuples) in b.relations() {
        for t in tuples {
            out.add_tuple(rel, t.clone())?;
        }
        for t in (0..arity).map(|_| 0..=m).multi_cartesian_product() {
            if t.contains(&c) {
                out.add_tuple(rel, t)?;
            }
        }
    }
    for x in 0..=m {
        for y in 0..=m {
            if y != c || x == c {
                out.add_tuple(f_name, vec![x, y])?;
            }
        }
    }
    Ok(out)
}

fn check_f_usage(phi: &PHSentence, f_name: &str) -> Result<()> {
    match phi.body().iter().find(|a| a.symbol == f_name && a.args.len() != 2) {
        Some(a) => Err(Error::ArityMismatch {
            symbol: f_name.to_string(),
            expected: 2,
            found: a.args.len(),
        }),
        None => Ok(()),
    }
}

/// `QCSP(B) → QCSP(C)`: prepends a fresh universal `a` and links it, every
/// universal, and every existential to every existential by `F`.
pub fn forward_reduce(phi: &PHSentence, f_name: &str) -> Result<PHSentence> {
    if phi.is_bottom() {
        return Err(Error::Bottom);
    }
    if phi.has_constants() {
        return Err(Error::ConstantsNotAllowed);
    }
    if phi.body().iter().any(|a| a.symbol == f_name) {
        return Err(Error::NameClash(f_name.to_string()));
    }
    let taken: BTreeSet<&str> = phi.variables().collect();
    let fresh = std::iter::once("a".to_string())
        .chain((1..).map(|i| format!("a{i}")))
        .find(|n| !taken.contains(n.as_str()))
        .expect("unbounded supply of names");

    let mut prefix = vec![(Quantifier::Forall, fresh.clone())];
    prefix.extend(phi.prefix().iter().cloned());
    let mut body = phi.body().to_vec();

    if !phi.prefix().is_empty() {
        let p = to_partitioned(phi)?;
        let name = |e: Element| p.labels()[e].as_str();
        let existentials: Vec<&str> = p.existential_elements().into_iter().map(name).collect();
        let universals: Vec<&str> = p.universal_elements().into_iter().map(name).collect();
        let edge = |x: &str, y: &str| Atom::vars(f_name, &[x, y]);
        body.extend(existentials.iter().map(|y| edge(&fresh, y)));
        body.extend(existentials.iter().cartesian_product(&existentials).map(|(y, z)| edge(y, z)));
        body.extend(universals.iter().cartesian_product(&existentials).map(|(x, y)| edge(x, y)));
    }
    PHSentence::new(prefix, body)
}

/// Intermediate state of [`backward_reduce`], exposed for inspection.
#[derive(Debug, Clone)]
pub struct BackwardTrace {
    /// The input's partitioned structure with existentials not reachable
    /// from a universal removed (their blocks emptied); `None` when nothing
    /// is left.
    pub pruned: Option<PartitionedStructure>,
    /// Why the output is ⊥, if it is.
    pub rejection: Option<Rejection>,
    pub output: PHSentence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    /// An `F`-path of length ≥ 1 joins two distinct universals.
    UniversalToUniversal { from: String, to: String },
    /// An existential reaches a universal quantified after it.
    ExistentialBeforeUniversal { existential: String, universal: String },
}

/// Elements reachable from `start` by `F`-paths of length ≥ 1.
fn reach(start: Element, successors: &[Vec<Element>]) -> Vec<bool> {
    let mut seen = vec![false; successors.len()];
    let mut stack: Vec<Element> = successors[start].clone();
    while let Some(x) = stack.pop() {
        if !seen[x] {
            seen[x] = true;
            stack.extend(&successors[x]);
        }
    }
    seen
}

fn successors(s: &Structure, f_name: &str) -> Vec<Vec<Element>> {
    let mut succ = vec![Vec::new(); s.size()];
    for t in s.relation(f_name).into_iter().flatten() {
        succ[t[0]].push(t[1]);
    }
    succ
}

/// `QCSP(C) → QCSP(B)`. See [`backward_reduce_traced`].
pub fn backward_reduce(phi: &PHSentence, f_name: &str) -> Result<PHSentence> {
    backward_reduce_traced(phi, f_name).map(|t| t.output)
}

/// Reduces a sentence over `σ ⊎ {F}` to one over `σ`:
///
/// 1. Existentials with no `F`-path (length ≥ 1) from a universal are
///    deleted with their atoms; in `C` they can always be `c`.
/// 2. The result is ⊥ if an `F`-path joins two distinct universals, or if
///    an existential has an `F`-path to a universal quantified after it.
///    Either way the universal player can force a violated `F`-atom.
/// 3. Otherwise the `F`-atoms are dropped.
///
/// An `F`-cycle returning to the universal it starts from is not rejected
/// when all of its existentials come after that universal: setting them to
/// `c` exactly when the universal is `c` satisfies it.
pub fn backward_reduce_traced(phi: &PHSentence, f_name: &str) -> Result<BackwardTrace> {
    if phi.is_bottom() {
        return Err(Error::Bottom);
    }
    if phi.has_constants() {
        return Err(Error::ConstantsNotAllowed);
    }
    check_f_usage(phi, f_name)?;
    if phi.universals().next().is_none() {
        // Every existential is unreachable and every atom goes with it.
        return Ok(BackwardTrace {
            pruned: None,
            rejection: None,
            output: PHSentence::new(Vec::new(), Vec::new())?,
        });
    }
    let p = to_partitioned(phi)?;
    let base = p.base();
    let succ = successors(base, f_name);
    let universals = p.universal_elements();

    let mut reached = vec![false; base.size()];
    for &u in &universals {
        for (x, r) in reach(u, &succ).into_iter().enumerate() {
            reached[x] |= r;
        }
    }
    let kept: Vec<Element> = base
        .elements()
        .filter(|&x| p.tag_of(x) == BlockTag::A || reached[x])
        .collect();
    let mut renumber = vec![None; base.size()];
    for (i, &x) in kept.iter().enumerate() {
        renumber[x] = Some(i);
    }
    let pruned_base = base.induced(&kept)?;
    let blocks = p
        .blocks()
        .iter()
        .map(|&(tag, e)| (tag, e.and_then(|e| renumber[e])))
        .collect();
    let labels = kept.iter().map(|&x| p.labels()[x].clone()).collect();
    let pruned = PartitionedStructure::new(pruned_base, blocks)?.with_labels(labels)?;

    let rejection = find_rejection(&pruned, f_name);
    let output = if rejection.is_some() {
        PHSentence::bottom()
    } else {
        let keep: Vec<&str> = pruned.base().signature().names().filter(|n| *n != f_name).collect();
        let sigma = reduct(pruned.base(), &keep)?;
        let reduced = PartitionedStructure::new(sigma, pruned.blocks().to_vec())?
            .with_labels(pruned.labels().to_vec())?;
        from_partitioned(&reduced)?
    };
    Ok(BackwardTrace {
        pruned: Some(pruned),
        rejection,
        output,
    })
}

fn find_rejection(p: &PartitionedStructure, f_name: &str) -> Option<Rejection> {
    let succ = successors(p.base(), f_name);
    let label = |e: Element| p.labels()[e].clone();
    for u in p.universal_elements() {
        let r = reach(u, &succ);
        if let Some(v) = p.universal_elements().into_iter().find(|&v| v != u && r[v]) {
            return Some(Rejection::UniversalToUniversal {
                from: label(u),
                to: label(v),
            });
        }
    }
    for e in p.existential_elements() {
        let r = reach(e, &succ);
        if let Some(u) = p
            .universal_elements()
            .into_iter()
            .find(|&u| r[u] && p.block_of(u) > p.block_of(e))
        {
            return Some(Rejection::ExistentialBeforeUniversal {
                existential: label(e),
                universal: label(u),
            });
        }
    }
    None
}

/// The all-`c` assignment: does it satisfy every atom of `phi` in `c_struct`?
pub fn satisfied_by_constant(c_struct: &Structure, phi: &PHSentence, c: Element) -> bool {
    phi.body().iter().all(|a| {
        let t: Vec<Element> = a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(_) => c,
                Term::Const(k) => *k,
            })
            .collect();
        c_struct.holds(&a.symbol, &t)
    })
}
