//! Relational signatures, finite structures and homomorphism search.
//!
//! Elements of a structure of size `m` are the integers `0..m`. Relations are
//! stored as ordered tuple sets so that printing and iteration are
//! deterministic.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub type Element = usize;
pub type Tuple = Vec<Element>;

/// Default cap on the domain size produced by [`power_structure`].
pub const DEFAULT_POWER_BOUND: usize = 1 << 16;

/// An ordered list of relation symbols with their arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature::default();
        for (name, arity) in symbols {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    fn push(&mut self, name: String, arity: usize) -> Result<()> {
        if arity == 0 {
            return Err(Error::ZeroArity(name));
        }
        if self.index_of(&name).is_some() {
            return Err(Error::DuplicateSymbol(name));
        }
        self.symbols.push((name, arity));
        Ok(())
    }

    /// Returns `self ⊎ {name/arity}`.
    pub fn extended(&self, name: &str, arity: usize) -> Result<Self> {
        if self.index_of(name).is_some() {
            return Err(Error::NameClash(name.to_string()));
        }
        let mut sig = self.clone();
        sig.push(name.to_string(), arity)?;
        Ok(sig)
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.index_of(name).map(|i| self.symbols[i].1)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(|(n, _)| n.as_str())
    }
}

/// A finite relational structure on the domain `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    signature: Signature,
    size: usize,
    relations: Vec<BTreeSet<Tuple>>,
}

impl Structure {
    /// A structure with every relation empty.
    pub fn new(signature: Signature, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyDomain);
        }
        let relations = vec![BTreeSet::new(); signature.len()];
        Ok(Structure {
            signature,
            size,
            relations,
        })
    }

    pub fn from_relations<'a, I>(signature: Signature, size: usize, relations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Vec<Tuple>)>,
    {
        let mut s = Structure::new(signature, size)?;
        for (name, tuples) in relations {
            for t in tuples {
                s.add_tuple(name, t)?;
            }
        }
        Ok(s)
    }

    /// Inserts a tuple; returns whether it was new.
    pub fn add_tuple(&mut self, name: &str, tuple: Tuple) -> Result<bool> {
        let idx = self
            .signature
            .index_of(name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        self.add_tuple_at(idx, tuple)
    }

    pub(crate) fn add_tuple_at(&mut self, idx: usize, tuple: Tuple) -> Result<bool> {
        let (name, arity) = &self.signature.symbols[idx];
        if tuple.len() != *arity {
            return Err(Error::ArityMismatch {
                symbol: name.clone(),
                expected: *arity,
                found: tuple.len(),
            });
        }
        if let Some(&bad) = tuple.iter().find(|&&e| e >= self.size) {
            return Err(Error::ElementOutOfRange {
                element: bad,
                size: self.size,
            });
        }
        Ok(self.relations[idx].insert(tuple))
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.size
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Tuple>> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    pub fn relation_at(&self, idx: usize) -> &BTreeSet<Tuple> {
        &self.relations[idx]
    }

    /// `(name, arity, tuples)` in signature order.
    pub fn relations(&self) -> impl Iterator<Item = (&str, usize, &BTreeSet<Tuple>)> {
        self.signature
            .symbols
            .iter()
            .zip(&self.relations)
            .map(|((n, a), r)| (n.as_str(), *a, r))
    }

    pub fn holds(&self, name: &str, tuple: &[Element]) -> bool {
        self.relation(name).is_some_and(|r| r.contains(tuple))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    /// The substructure induced on `elements`, renumbered so that
    /// `elements[i]` becomes `i`.
    pub fn induced(&self, elements: &[Element]) -> Result<Structure> {
        let mut index = vec![None; self.size];
        for (i, &e) in elements.iter().enumerate() {
            if e >= self.size {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    size: self.size,
                });
            }
            index[e] = Some(i);
        }
        let mut out = Structure::new(self.signature.clone(), elements.len())?;
        for (ri, rel) in self.relations.iter().enumerate() {
            for t in rel {
                let mapped: Option<Tuple> = t.iter().map(|&e| index[e]).collect();
                if let Some(mapped) = mapped {
                    out.relations[ri].insert(mapped);
                }
            }
        }
        Ok(out)
    }

    /// Renames element `e` to `perm[e]`; `perm` must be a permutation.
    pub fn relabel(&self, perm: &[Element]) -> Result<Structure> {
        let mut out = Structure::new(self.signature.clone(), self.size)?;
        for (ri, rel) in self.relations.iter().enumerate() {
            for t in rel {
                out.add_tuple_at(ri, t.iter().map(|&e| perm[e]).collect())?;
            }
        }
        Ok(out)
    }

    /// Appends `count` isolated elements.
    pub fn with_isolated(&self, count: usize) -> Structure {
        let mut out = self.clone();
        out.size += count;
        out
    }
}

/// A partial (or total) function between domains.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mapping {
    entries: BTreeMap<Element, Element>,
}

impl Mapping {
    pub fn new() -> Self {
        Mapping::default()
    }

    pub fn from_total(images: &[Element]) -> Self {
        images.iter().copied().enumerate().collect()
    }

    pub fn insert(&mut self, from: Element, to: Element) -> Option<Element> {
        self.entries.insert(from, to)
    }

    pub fn get(&self, from: Element) -> Option<Element> {
        self.entries.get(&from).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Element, Element)> + '_ {
        self.entries.iter().map(|(&a, &b)| (a, b))
    }

    /// The images of `0..n`, if every one of them is defined.
    pub fn to_total(&self, n: usize) -> Option<Vec<Element>> {
        (0..n).map(|e| self.get(e)).collect()
    }

    /// `other ∘ self`: first apply `self`, then `other`.
    pub fn then(&self, other: &Mapping) -> Mapping {
        self.iter()
            .filter_map(|(a, b)| other.get(b).map(|c| (a, c)))
            .collect()
    }

    pub fn is_injective(&self) -> bool {
        let images: BTreeSet<_> = self.entries.values().collect();
        images.len() == self.entries.len()
    }
}

impl FromIterator<(Element, Element)> for Mapping {
    fn from_iter<T: IntoIterator<Item = (Element, Element)>>(iter: T) -> Self {
        Mapping {
            entries: iter.into_iter().collect(),
        }
    }
}

fn check_same_signature(a: &Structure, b: &Structure) -> Result<()> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch);
    }
    Ok(())
}

/// Checks that a total `map` sends every tuple of `src` into `dst`.
pub fn is_homomorphism(src: &Structure, dst: &Structure, map: &Mapping) -> Result<bool> {
    check_same_signature(src, dst)?;
    let Some(images) = map.to_total(src.size) else {
        return Ok(false);
    };
    if images.iter().any(|&e| e >= dst.size) {
        return Ok(false);
    }
    Ok(src.relations.iter().zip(&dst.relations).all(|(rs, rd)| {
        rs.iter()
            .all(|t| rd.contains(&t.iter().map(|&e| images[e]).collect::<Vec<_>>()))
    }))
}

/// Searches for a homomorphism `src → dst` extending `pins`.
///
/// The search is exhaustive, so `None` means no such homomorphism exists.
pub fn find_homomorphism(
    src: &Structure,
    dst: &Structure,
    pins: &Mapping,
) -> Result<Option<Mapping>> {
    check_same_signature(src, dst)?;
    let mut domains = Domains::full(src.size, dst.size);
    for (from, to) in pins.iter() {
        if from >= src.size {
            return Err(Error::ElementOutOfRange {
                element: from,
                size: src.size,
            });
        }
        if to >= dst.size {
            return Err(Error::ElementOutOfRange {
                element: to,
                size: dst.size,
            });
        }
        domains.restrict_to(from, to);
    }
    let problem = HomProblem::new(src, dst, false);
    Ok(problem.solve(domains).map(|v| Mapping::from_total(&v)))
}

/// Looks for an endomorphism whose image misses at least one element.
fn non_surjective_endomorphism(b: &Structure) -> Option<Vec<Element>> {
    let problem = HomProblem::new(b, b, false);
    b.elements().find_map(|missing| {
        let mut domains = Domains::full(b.size, b.size);
        for x in b.elements() {
            domains.remove(x, missing);
        }
        problem.solve(domains)
    })
}

/// Whether every endomorphism of `b` is an automorphism.
///
/// A surjective endomorphism of a finite structure permutes each relation,
/// so it suffices to rule out non-surjective endomorphisms.
pub fn is_core(b: &Structure) -> bool {
    non_surjective_endomorphism(b).is_none()
}

/// Repeatedly retracts onto the image of a non-surjective endomorphism until
/// none remains. The result is an induced substructure of `b`, renumbered.
pub fn core_of(b: &Structure) -> Structure {
    let mut current = b.clone();
    while let Some(f) = non_surjective_endomorphism(&current) {
        let image: BTreeSet<Element> = f.into_iter().collect();
        let image: Vec<Element> = image.into_iter().collect();
        current = current
            .induced(&image)
            .expect("image elements are in range and nonempty");
    }
    current
}

pub fn is_isomorphic(s: &Structure, t: &Structure) -> Result<bool> {
    check_same_signature(s, t)?;
    if s.size != t.size || s.relations.iter().zip(&t.relations).any(|(a, b)| a.len() != b.len()) {
        return Ok(false);
    }
    // An injective homomorphism between equal-size structures with equal
    // tuple counts is a bijection onto every relation.
    let problem = HomProblem::new(s, t, true);
    Ok(problem.solve(Domains::full(s.size, t.size)).is_some())
}

/// Index of the tuple `coords` among all `m^k` tuples in lexicographic order.
pub fn tuple_index(coords: &[Element], m: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * m + c)
}

/// Inverse of [`tuple_index`].
pub fn tuple_at(mut index: usize, m: usize, k: usize) -> Tuple {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
    out
}

pub fn power_structure(b: &Structure, k: usize) -> Result<Structure> {
    power_structure_bounded(b, k, DEFAULT_POWER_BOUND)
}

/// The `k`-th direct power; element `i` is the `i`-th `k`-tuple in
/// lexicographic order.
pub fn power_structure_bounded(b: &Structure, k: usize, bound: usize) -> Result<Structure> {
    if k == 0 {
        return Err(Error::InvalidSentence("power exponent must be positive".into()));
    }
    let size = checked_pow(b.size, k).filter(|&s| s <= bound).ok_or(Error::SizeBound {
        size: checked_pow(b.size, k).unwrap_or(usize::MAX),
        bound,
    })?;
    let mut out = Structure::new(b.signature.clone(), size)?;
    for (ri, rel) in b.relations.iter().enumerate() {
        let arity = b.signature.symbols[ri].1;
        let tuples: Vec<&Tuple> = rel.iter().collect();
        if tuples.is_empty() {
            continue;
        }
        // Every choice of k tuples of the relation, read column by column.
        for pick in itertools::Itertools::multi_cartesian_product((0..k).map(|_| tuples.iter())) {
            let t: Tuple = (0..arity)
                .map(|col| tuple_index(&pick.iter().map(|row| row[col]).collect::<Vec<_>>(), b.size))
                .collect();
            out.relations[ri].insert(t);
        }
    }
    Ok(out)
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    (0..exp).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

/// Keeps only the named relations (in their original order).
pub fn reduct<S: AsRef<str>>(s: &Structure, keep: &[S]) -> Result<Structure> {
    for name in keep {
        if s.signature.index_of(name.as_ref()).is_none() {
            return Err(Error::UnknownSymbol(name.as_ref().to_string()));
        }
    }
    let kept: Vec<usize> = (0..s.signature.len())
        .filter(|&i| keep.iter().any(|k| k.as_ref() == s.signature.symbols[i].0))
        .collect();
    let signature = Signature {
        symbols: kept.iter().map(|&i| s.signature.symbols[i].clone()).collect(),
    };
    Ok(Structure {
        signature,
        size: s.size,
        relations: kept.iter().map(|&i| s.relations[i].clone()).collect(),
    })
}

/// Candidate images for each source element, stored as one flat bitmap.
#[derive(Clone)]
pub(crate) struct Domains {
    m: usize,
    bits: Vec<bool>,
    sizes: Vec<usize>,
}

impl Domains {
    pub(crate) fn full(n: usize, m: usize) -> Self {
        Domains {
            m,
            bits: vec![true; n * m],
            sizes: vec![m; n],
        }
    }

    fn contains(&self, x: usize, v: usize) -> bool {
        self.bits[x * self.m + v]
    }

    pub(crate) fn remove(&mut self, x: usize, v: usize) -> bool {
        let slot = &mut self.bits[x * self.m + v];
        if *slot {
            *slot = false;
            self.sizes[x] -= 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn restrict_to(&mut self, x: usize, v: usize) {
        for w in 0..self.m {
            if w != v {
                self.remove(x, w);
            }
        }
    }

    fn values(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.m).filter(move |&v| self.contains(x, v))
    }
}

struct Constraint {
    rel: usize,
    scope: Vec<usize>,
}

/// Backtracking homomorphism search maintaining generalized arc consistency.
pub(crate) struct HomProblem<'a> {
    dst: &'a Structure,
    n: usize,
    constraints: Vec<Constraint>,
    watching: Vec<Vec<usize>>,
    injective: bool,
}

impl<'a> HomProblem<'a> {
    pub(crate) fn new(src: &Structure, dst: &'a Structure, injective: bool) -> Self {
        let mut constraints = Vec::new();
        let mut watching = vec![Vec::new(); src.size];
        for (rel, tuples) in src.relations.iter().enumerate() {
            for t in tuples {
                let ci = constraints.len();
                let mut seen = BTreeSet::new();
                for &x in t {
                    if seen.insert(x) {
                        watching[x].push(ci);
                    }
                }
                constraints.push(Constraint {
                    rel,
                    scope: t.clone(),
                });
            }
        }
        HomProblem {
            dst,
            n: src.size,
            constraints,
            watching,
            injective,
        }
    }

    pub(crate) fn solve(&self, mut domains: Domains) -> Option<Vec<Element>> {
        if domains.sizes.contains(&0) {
            return None;
        }
        let all: Vec<usize> = (0..self.constraints.len()).collect();
        if !self.propagate(&mut domains, all) {
            return None;
        }
        let mut assigned = vec![false; self.n];
        self.search(domains, &mut assigned)
    }

    fn search(&self, domains: Domains, assigned: &mut [bool]) -> Option<Vec<Element>> {
        let next = (0..self.n)
            .filter(|&x| !assigned[x])
            .min_by_key(|&x| domains.sizes[x]);
        let Some(x) = next else {
            return Some((0..self.n).map(|x| domains.values(x).next().unwrap()).collect());
        };
        assigned[x] = true;
        for v in domains.values(x).collect::<Vec<_>>() {
            let mut d = domains.clone();
            d.restrict_to(x, v);
            let mut queue: Vec<usize> = self.watching[x].clone();
            if self.injective {
                for y in 0..self.n {
                    if y != x && d.remove(y, v) {
                        if d.sizes[y] == 0 {
                            queue.clear();
                            break;
                        }
                        queue.extend(&self.watching[y]);
                    }
                }
                if (0..self.n).any(|y| d.sizes[y] == 0) {
                    continue;
                }
            }
            if self.propagate(&mut d, queue) {
                if let Some(sol) = self.search(d, assigned) {
                    return Some(sol);
                }
            }
        }
        assigned[x] = false;
        None
    }

    /// Revises constraints until a fixpoint; false on a wipe-out.
    fn propagate(&self, d: &mut Domains, mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; self.constraints.len()];
        for &c in &queue {
            queued[c] = true;
        }
        while let Some(ci) = queue.pop() {
            queued[ci] = false;
            let c = &self.constraints[ci];
            let arity = c.scope.len();
            let mut supported = vec![false; arity * d.m];
            for t in self.dst.relation_at(c.rel) {
                let fits = (0..arity).all(|i| {
                    d.contains(c.scope[i], t[i])
                        && (0..i).all(|j| c.scope[j] != c.scope[i] || t[j] == t[i])
                });
                if fits {
                    for i in 0..arity {
                        supported[i * d.m + t[i]] = true;
                    }
                }
            }
            for i in 0..arity {
                let x = c.scope[i];
                let mut changed = false;
                for v in 0..d.m {
                    if !supported[i * d.m + v] && d.remove(x, v) {
                        changed = true;
                    }
                }
                if d.sizes[x] == 0 {
                    return false;
                }
                if changed {
                    for &other in &self.watching[x] {
                        if other != ci && !queued[other] {
                            queued[other] = true;
                            queue.push(other);
                        }
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn identity_on_k2() {
        let f = find_homomorphism(&k2(), &k2(), &Mapping::new()).unwrap().unwrap();
        assert!(is_homomorphism(&k2(), &k2(), &f).unwrap());
    }

    #[test]
    fn k3_does_not_map_to_k2() {
        assert_eq!(find_homomorphism(&k3(), &k2(), &Mapping::new()).unwrap(), None);
    }

    #[test]
    fn pins_can_block_a_homomorphism() {
        let pins: Mapping = [(0, 0), (1, 0)].into_iter().collect();
        assert_eq!(find_homomorphism(&k2(), &k2(), &pins).unwrap(), None);
        let pins: Mapping = [(0, 1)].into_iter().collect();
        let f = find_homomorphism(&k2(), &k2(), &pins).unwrap().unwrap();
        assert_eq!(f.to_total(2), Some(vec![1, 0]));
    }

    #[test]
    fn homomorphism_errors() {
        assert_eq!(
            find_homomorphism(&k2(), &u2(), &Mapping::new()),
            Err(Error::SignatureMismatch)
        );
        let pins: Mapping = [(0, 5)].into_iter().collect();
        assert!(matches!(
            find_homomorphism(&k2(), &k2(), &pins),
            Err(Error::ElementOutOfRange { element: 5, .. })
        ));
    }

    #[test]
    fn isomorphism_examples() {
        assert!(is_isomorphic(&k2(), &k2()).unwrap());
        assert!(!is_isomorphic(&k2(), &p1()).unwrap());
        let rotated = k3().relabel(&[1, 2, 0]).unwrap();
        assert!(is_isomorphic(&k3(), &rotated).unwrap());
        // Same size and tuple count, different shape.
        let path = Structure::from_relations(edge_signature(), 3, [("E", vec![vec![0, 1], vec![1, 2]])]).unwrap();
        let split = Structure::from_relations(edge_signature(), 3, [("E", vec![vec![0, 1], vec![2, 2]])]).unwrap();
        assert!(!is_isomorphic(&path, &split).unwrap());
    }

    #[test]
    fn core_examples() {
        assert!(is_core(&k2()));
        assert!(is_core(&l1()));
        assert!(!is_core(&k2().with_isolated(1)));
        let core = core_of(&k2().with_isolated(1));
        assert!(is_isomorphic(&core, &k2()).unwrap());
        assert_eq!(core_of(&k2()), k2());
        let lollipop = Structure::from_relations(
            edge_signature(),
            2,
            [("E", vec![vec![0, 0], vec![0, 1], vec![1, 1]])],
        )
        .unwrap();
        assert_eq!(core_of(&lollipop), l1());
    }

    #[test]
    fn power_examples() {
        assert!(is_isomorphic(&power_structure(&k2(), 1).unwrap(), &k2()).unwrap());
        let sq = power_structure(&k2(), 2).unwrap();
        assert_eq!(sq.size(), 4);
        assert_eq!(sq.relation("E").unwrap().len(), 4);
        // (0,1)->(1,0) is the pair of edges 0->1 and 1->0.
        assert!(sq.holds("E", &[tuple_index(&[0, 1], 2), tuple_index(&[1, 0], 2)]));
        assert_eq!(power_structure(&l1(), 3).unwrap(), l1());
        assert!(matches!(
            power_structure_bounded(&k3(), 3, 26),
            Err(Error::SizeBound { size: 27, bound: 26 })
        ));
    }

    #[test]
    fn tuple_indexing_round_trips() {
        for i in 0..27 {
            assert_eq!(tuple_index(&tuple_at(i, 3, 3), 3), i);
        }
    }

    #[test]
    fn reduct_examples() {
        let r = reduct(&u2(), &["U0"]).unwrap();
        assert_eq!(r.signature().symbols(), &[("U0".to_string(), 1)]);
        assert_eq!(r.relation("U0").unwrap().iter().cloned().collect::<Vec<_>>(), vec![vec![0]]);
        assert_eq!(reduct(&u2(), &["U0", "U1"]).unwrap(), u2());
        assert_eq!(reduct(&u2(), &["Q"]), Err(Error::UnknownSymbol("Q".into())));
    }

    #[test]
    fn structure_invariants_enforced() {
        assert_eq!(Structure::new(edge_signature(), 0), Err(Error::EmptyDomain));
        let mut s = Structure::new(edge_signature(), 2).unwrap();
        assert!(matches!(s.add_tuple("E", vec![0, 2]), Err(Error::ElementOutOfRange { .. })));
        assert!(matches!(s.add_tuple("E", vec![0]), Err(Error::ArityMismatch { .. })));
        assert_eq!(Signature::new([("E", 0)]), Err(Error::ZeroArity("E".into())));
        assert_eq!(Signature::new([("E", 2), ("E", 1)]), Err(Error::DuplicateSymbol("E".into())));
    }
}
