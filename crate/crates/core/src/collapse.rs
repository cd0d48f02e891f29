//! Collapsings of positive Horn sentences, the expansion of a collapsing into
//! a primitive positive sentence with constants, the constant-free structure
//! built from that expansion, and the collapsibility-based decision
//! procedure.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::logic::{Atom, PHSentence, Quantifier, Term};
use crate::structures::{checked_pow, find_homomorphism, is_core, tuple_at, Element, Mapping, Structure};

/// Replaces every universal variable not in `survivors` by the constant `a`
/// and drops it from the prefix.
pub fn apply_collapsing<S: AsRef<str>>(phi: &PHSentence, survivors: &[S], a: Element) -> Result<PHSentence> {
    if phi.is_bottom() {
        return Ok(PHSentence::bottom());
    }
    if phi.has_constants() {
        return Err(Error::ConstantsNotAllowed);
    }
    let universals: BTreeSet<&str> = phi.universals().collect();
    let keep: BTreeSet<&str> = survivors.iter().map(AsRef::as_ref).collect();
    if let Some(bad) = keep.iter().find(|s| !universals.contains(*s)) {
        return Err(Error::NotUniversal(bad.to_string()));
    }
    let collapsed = |v: &str| universals.contains(v) && !keep.contains(v);
    let prefix = phi
        .prefix()
        .iter()
        .filter(|(_, v)| !collapsed(v))
        .cloned()
        .collect();
    let body = phi
        .body()
        .iter()
        .map(|atom| {
            let args = atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) if collapsed(v) => Term::Const(a),
                    other => other.clone(),
                })
                .collect();
            Atom::new(atom.symbol.clone(), args)
        })
        .collect();
    PHSentence::new(prefix, body)
}

/// Name of the variable standing for existential `var` under the
/// assignment `alpha` to the survivors that precede it: `v[u=0,w=1]`.
pub fn pair_name(var: &str, alpha: &[(&str, Element)]) -> String {
    let inner = alpha.iter().map(|(u, x)| format!("{u}={x}")).join(",");
    format!("{var}[{inner}]")
}

struct Expansion {
    prefix_vars: Vec<String>,
    atoms: Vec<Atom>,
}

/// Every assignment of `0..m` to `vars`, lexicographically.
fn assignments<'a>(vars: &[&'a str], m: usize) -> impl Iterator<Item = Vec<(&'a str, Element)>> + 'a {
    let vars = vars.to_vec();
    let count = checked_pow(m, vars.len()).expect("assignment count fits in usize");
    (0..count).map(move |i| {
        let values = tuple_at(i, m, vars.len());
        vars.iter().copied().zip(values).collect()
    })
}

fn expand(phi_prime: &PHSentence, domain_size: usize, max_survivors: usize) -> Result<Expansion> {
    if domain_size == 0 {
        return Err(Error::EmptyDomain);
    }
    let survivors: Vec<&str> = phi_prime.universals().collect();
    if survivors.len() > max_survivors {
        return Err(Error::TooManySurvivors {
            found: survivors.len(),
            max: max_survivors,
        });
    }
    // Survivors quantified before each existential.
    let mut preceding: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut seen = Vec::new();
    let mut prefix_vars = Vec::new();
    for (q, v) in phi_prime.prefix() {
        match q {
            Quantifier::Forall => seen.push(v.as_str()),
            Quantifier::Exists => {
                for alpha in assignments(&seen, domain_size) {
                    prefix_vars.push(pair_name(v, &alpha));
                }
                preceding.insert(v.as_str(), seen.clone());
            }
        }
    }
    let mut atoms = Vec::new();
    let mut emitted = BTreeSet::new();
    for alpha in assignments(&survivors, domain_size) {
        let value: BTreeMap<&str, Element> = alpha.iter().copied().collect();
        for atom in phi_prime.body() {
            let args = atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => Term::Const(*c),
                    Term::Var(v) => match value.get(v.as_str()) {
                        Some(&x) => Term::Const(x),
                        None => {
                            let restricted: Vec<(&str, Element)> =
                                preceding[v.as_str()].iter().map(|u| (*u, value[u])).collect();
                            Term::Var(pair_name(v, &restricted))
                        }
                    },
                })
                .collect();
            let atom = Atom::new(atom.symbol.clone(), args);
            if emitted.insert(atom.clone()) {
                atoms.push(atom);
            }
        }
    }
    Ok(Expansion { prefix_vars, atoms })
}

/// Expands a collapsing into a primitive positive sentence with constants
/// whose variables are pairs of an existential and an assignment to the
/// surviving universals before it. True in `b` (of size `domain_size`)
/// exactly when the collapsing is.
pub fn chen_reduction(phi_prime: &PHSentence, domain_size: usize, max_survivors: usize) -> Result<PHSentence> {
    if phi_prime.is_bottom() {
        return Ok(PHSentence::bottom());
    }
    let e = expand(phi_prime, domain_size, max_survivors)?;
    PHSentence::new(
        e.prefix_vars.into_iter().map(|v| (Quantifier::Exists, v)).collect(),
        e.atoms,
    )
}

/// `D(λ)` with element names: `0..m` are named by themselves, the pair
/// elements by [`pair_name`].
pub fn build_collapse_structure_labelled<S: AsRef<str>>(
    b: &Structure,
    phi: &PHSentence,
    lambda: &[S],
    a: Element,
) -> Result<(Structure, Vec<String>)> {
    if !is_core(b) {
        return Err(Error::NotACore);
    }
    collapse_structure(b, phi, lambda, a)
}

/// Builds `D(λ)`: the elements of `b`, one element per pair variable of the
/// expanded `(|λ|, a)`-collapsing, the expanded atoms with constants read
/// as elements of `b`, and every tuple of `b` on its own elements.
pub fn build_collapse_structure<S: AsRef<str>>(
    b: &Structure,
    phi: &PHSentence,
    lambda: &[S],
    a: Element,
) -> Result<Structure> {
    build_collapse_structure_labelled(b, phi, lambda, a).map(|(s, _)| s)
}

fn collapse_structure<S: AsRef<str>>(
    b: &Structure,
    phi: &PHSentence,
    lambda: &[S],
    a: Element,
) -> Result<(Structure, Vec<String>)> {
    if phi.is_bottom() {
        return Err(Error::Bottom);
    }
    if a >= b.size() {
        return Err(Error::ElementOutOfRange {
            element: a,
            size: b.size(),
        });
    }
    phi.check_against(b)?;
    let phi_prime = apply_collapsing(phi, lambda, a)?;
    let e = expand(&phi_prime, b.size(), lambda.len())?;
    let m = b.size();
    let index: BTreeMap<&str, Element> = e
        .prefix_vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), m + i))
        .collect();
    let mut d = Structure::new(b.signature().clone(), m + e.prefix_vars.len())?;
    for (rel, _, tuples) in b.relations() {
        for t in tuples {
            d.add_tuple(rel, t.clone())?;
        }
    }
    for atom in &e.atoms {
        let t = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => *c,
                Term::Var(v) => index[v.as_str()],
            })
            .collect();
        d.add_tuple(&atom.symbol, t)?;
    }
    let labels = (0..m).map(|x| x.to_string()).chain(e.prefix_vars).collect();
    Ok((d, labels))
}

/// Decides `b ⊨ phi` by checking that every `D(λ)`, over all survivor sets
/// of size `min(j, #universals)`, maps homomorphically to `b`.
///
/// This is exact when `b` is `(j, a)`-collapsible, and is implied by
/// `b ⊨ phi` in any case.
pub fn qcsp_via_collapsibility(b: &Structure, phi: &PHSentence, j: usize, a: Element) -> Result<bool> {
    if !is_core(b) {
        return Err(Error::NotACore);
    }
    if phi.is_bottom() {
        return Ok(false);
    }
    let universals: Vec<&str> = phi.universals().collect();
    let size = j.min(universals.len());
    for lambda in universals.iter().copied().combinations(size) {
        let (d, _) = collapse_structure(b, phi, &lambda, a)?;
        if find_homomorphism(&d, b, &Mapping::new())?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}
