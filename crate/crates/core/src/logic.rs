//! Sentences: positive Horn (with primitive positive as the all-existential
//! case), prenex first-order, and the partitioned-structure encoding of a
//! positive Horn sentence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::structures::{Element, Mapping, Signature, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn flip(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Element),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "@{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub symbol: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            symbol: symbol.into(),
            args,
        }
    }

    /// Shorthand for an atom whose arguments are all variables.
    pub fn vars(symbol: &str, vars: &[&str]) -> Self {
        Atom::new(symbol, vars.iter().map(|v| Term::var(*v)).collect())
    }

    fn check(&self, signature: &Signature, size: usize) -> Result<()> {
        let arity = signature
            .arity(&self.symbol)
            .ok_or_else(|| Error::UnknownSymbol(self.symbol.clone()))?;
        if arity != self.args.len() {
            return Err(Error::ArityMismatch {
                symbol: self.symbol.clone(),
                expected: arity,
                found: self.args.len(),
            });
        }
        for t in &self.args {
            if let Term::Const(c) = t {
                if *c >= size {
                    return Err(Error::ElementOutOfRange { element: *c, size });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.symbol)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A positive Horn sentence `Q1 x1 … Qn xn (A1 ∧ … ∧ Ak)`, or `⊥`.
///
/// An empty body is the true sentence. Atoms may carry constant terms,
/// which covers the constant-augmented problem variants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PHSentence {
    prefix: Vec<(Quantifier, String)>,
    body: Vec<Atom>,
    bottom: bool,
}

impl PHSentence {
    pub fn new(prefix: Vec<(Quantifier, String)>, body: Vec<Atom>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (_, v) in &prefix {
            if !seen.insert(v.as_str()) {
                return Err(Error::InvalidSentence(format!("variable `{v}` quantified twice")));
            }
        }
        for atom in &body {
            for v in atom.args.iter().filter_map(Term::as_var) {
                if !seen.contains(v) {
                    return Err(Error::InvalidSentence(format!("variable `{v}` is not quantified")));
                }
            }
        }
        Ok(PHSentence {
            prefix,
            body,
            bottom: false,
        })
    }

    /// The primitive positive sentence `∃vars. body`.
    pub fn exists(vars: &[&str], body: Vec<Atom>) -> Result<Self> {
        PHSentence::new(
            vars.iter().map(|v| (Quantifier::Exists, v.to_string())).collect(),
            body,
        )
    }

    pub fn bottom() -> Self {
        PHSentence {
            prefix: Vec::new(),
            body: Vec::new(),
            bottom: true,
        }
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom
    }

    pub fn prefix(&self) -> &[(Quantifier, String)] {
        &self.prefix
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.prefix.iter().map(|(_, v)| v.as_str())
    }

    pub fn quantified_by(&self, q: Quantifier) -> impl Iterator<Item = &str> {
        self.prefix
            .iter()
            .filter(move |(p, _)| *p == q)
            .map(|(_, v)| v.as_str())
    }

    pub fn universals(&self) -> impl Iterator<Item = &str> {
        self.quantified_by(Quantifier::Forall)
    }

    pub fn existentials(&self) -> impl Iterator<Item = &str> {
        self.quantified_by(Quantifier::Exists)
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.prefix.iter().position(|(_, v)| v == var)
    }

    /// ⊥ counts as primitive positive.
    pub fn is_primitive_positive(&self) -> bool {
        self.prefix.iter().all(|(q, _)| *q == Quantifier::Exists)
    }

    pub fn has_constants(&self) -> bool {
        self.body
            .iter()
            .any(|a| a.args.iter().any(|t| matches!(t, Term::Const(_))))
    }

    /// Checks symbols, arities and constants against a structure.
    pub fn check_against(&self, b: &Structure) -> Result<()> {
        self.check_against_signature(b.signature(), b.size())
    }

    pub(crate) fn check_against_signature(&self, signature: &Signature, size: usize) -> Result<()> {
        self.body.iter().try_for_each(|a| a.check(signature, size))
    }

    /// The signature read off the atoms, in order of first use.
    pub fn inferred_signature(&self) -> Result<Signature> {
        let mut symbols: Vec<(String, usize)> = Vec::new();
        for atom in &self.body {
            match symbols.iter().find(|(n, _)| *n == atom.symbol) {
                Some((_, arity)) if *arity != atom.args.len() => {
                    return Err(Error::ArityMismatch {
                        symbol: atom.symbol.clone(),
                        expected: *arity,
                        found: atom.args.len(),
                    })
                }
                Some(_) => {}
                None => symbols.push((atom.symbol.clone(), atom.args.len())),
            }
        }
        Signature::new(symbols)
    }
}

impl fmt::Display for PHSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bottom {
            return f.write_str("⊥");
        }
        for (q, v) in &self.prefix {
            let sym = match q {
                Quantifier::Forall => '∀',
                Quantifier::Exists => '∃',
            };
            write!(f, "{sym}{v} ")?;
        }
        if self.body.is_empty() {
            return f.write_str("⊤");
        }
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// The canonical database of a primitive positive sentence.
///
/// `elements[e]` is the variable or constant that element `e` stands for;
/// `pins` sends each constant's element to the constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDatabase {
    pub structure: Structure,
    pub pins: Mapping,
    pub elements: Vec<Term>,
}

/// Elements are numbered by first occurrence while scanning the body, then
/// any quantified variables that occur in no atom follow in prefix order.
fn number_terms(phi: &PHSentence) -> BTreeMap<Term, Element> {
    let mut index = BTreeMap::new();
    let body_terms = phi.body.iter().flat_map(|a| a.args.iter().cloned());
    let prefix_terms = phi.prefix.iter().map(|(_, v)| Term::Var(v.clone()));
    for t in body_terms.chain(prefix_terms) {
        let next = index.len();
        index.entry(t).or_insert(next);
    }
    index
}

fn build_database(phi: &PHSentence, signature: &Signature) -> Result<CanonicalDatabase> {
    if phi.bottom {
        return Err(Error::Bottom);
    }
    let index = number_terms(phi);
    let mut elements = vec![Term::Const(0); index.len()];
    for (t, &e) in &index {
        elements[e] = t.clone();
    }
    let mut structure = Structure::new(signature.clone(), index.len())?;
    for atom in &phi.body {
        let tuple = atom.args.iter().map(|t| index[t]).collect();
        structure.add_tuple(&atom.symbol, tuple)?;
    }
    let pins = index
        .iter()
        .filter_map(|(t, &e)| match t {
            Term::Const(c) => Some((e, *c)),
            Term::Var(_) => None,
        })
        .collect();
    Ok(CanonicalDatabase {
        structure,
        pins,
        elements,
    })
}

/// Canonical database of a primitive positive sentence over `signature`.
///
/// Fails on ⊥ and on sentences with no variables and no constants (the
/// database would have an empty domain).
pub fn canonical_database(phi: &PHSentence, signature: &Signature) -> Result<CanonicalDatabase> {
    if phi.bottom {
        return Err(Error::Bottom);
    }
    if !phi.is_primitive_positive() {
        return Err(Error::NotPrimitivePositive);
    }
    build_database(phi, signature)
}

/// `∃x0…∃x(m−1)` followed by one atom per tuple.
pub fn canonical_query(s: &Structure) -> PHSentence {
    let name = |e: Element| format!("x{e}");
    let prefix = s.elements().map(|e| (Quantifier::Exists, name(e))).collect();
    let body = s
        .relations()
        .flat_map(|(rel, _, tuples)| {
            tuples
                .iter()
                .map(move |t| Atom::new(rel, t.iter().map(|&e| Term::Var(name(e))).collect()))
        })
        .collect();
    PHSentence::new(prefix, body).expect("canonical query is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockTag {
    A,
    E,
}

impl From<Quantifier> for BlockTag {
    fn from(q: Quantifier) -> Self {
        match q {
            Quantifier::Forall => BlockTag::A,
            Quantifier::Exists => BlockTag::E,
        }
    }
}

impl From<BlockTag> for Quantifier {
    fn from(t: BlockTag) -> Self {
        match t {
            BlockTag::A => Quantifier::Forall,
            BlockTag::E => Quantifier::Exists,
        }
    }
}

/// A sentence viewed as a structure whose domain is split into ordered
/// singleton-or-empty blocks, each tagged universal or existential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedStructure {
    base: Structure,
    blocks: Vec<(BlockTag, Option<Element>)>,
    labels: Vec<String>,
}

impl PartitionedStructure {
    /// Labels default to `u<e>` for universal and `v<e>` for existential
    /// elements.
    pub fn new(base: Structure, blocks: Vec<(BlockTag, Option<Element>)>) -> Result<Self> {
        let mut labels = vec![String::new(); base.size()];
        let mut covered = vec![false; base.size()];
        for &(tag, occupant) in &blocks {
            let Some(e) = occupant else { continue };
            if e >= base.size() {
                return Err(Error::InvalidPartition(format!("occupant {e} is not an element")));
            }
            if covered[e] {
                return Err(Error::InvalidPartition(format!("element {e} occupies two blocks")));
            }
            covered[e] = true;
            labels[e] = match tag {
                BlockTag::A => format!("u{e}"),
                BlockTag::E => format!("v{e}"),
            };
        }
        if let Some(e) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidPartition(format!("element {e} lies in no block")));
        }
        Ok(PartitionedStructure {
            base,
            blocks,
            labels,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.base.size() {
            return Err(Error::InvalidPartition("one label per element required".into()));
        }
        let distinct: BTreeSet<_> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidPartition("labels must be distinct".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn base(&self) -> &Structure {
        &self.base
    }

    pub fn blocks(&self) -> &[(BlockTag, Option<Element>)] {
        &self.blocks
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Occupants of blocks with the given tag, in block order.
    pub fn occupants(&self, tag: BlockTag) -> Vec<Element> {
        self.blocks
            .iter()
            .filter(|(t, _)| *t == tag)
            .filter_map(|(_, e)| *e)
            .collect()
    }

    pub fn universal_elements(&self) -> Vec<Element> {
        self.occupants(BlockTag::A)
    }

    pub fn existential_elements(&self) -> Vec<Element> {
        self.occupants(BlockTag::E)
    }

    pub fn tag_of(&self, e: Element) -> BlockTag {
        self.blocks
            .iter()
            .find(|(_, o)| *o == Some(e))
            .map(|(t, _)| *t)
            .expect("every element occupies a block")
    }

    /// Index of the block holding `e`.
    pub fn block_of(&self, e: Element) -> usize {
        self.blocks
            .iter()
            .position(|(_, o)| *o == Some(e))
            .expect("every element occupies a block")
    }
}

/// Encodes a constant-free sentence as a partitioned structure over the
/// signature used by its atoms. Block `i` holds the `i`-th prefix variable.
pub fn to_partitioned(phi: &PHSentence) -> Result<PartitionedStructure> {
    if phi.bottom {
        return Err(Error::Bottom);
    }
    if phi.has_constants() {
        return Err(Error::ConstantsNotAllowed);
    }
    let signature = phi.inferred_signature()?;
    to_partitioned_over(phi, &signature)
}

/// As [`to_partitioned`], with an explicit (super-)signature for the base.
pub fn to_partitioned_over(phi: &PHSentence, signature: &Signature) -> Result<PartitionedStructure> {
    if phi.bottom {
        return Err(Error::Bottom);
    }
    if phi.has_constants() {
        return Err(Error::ConstantsNotAllowed);
    }
    if phi.prefix.is_empty() {
        // No variables means an empty domain, which structures cannot have.
        return Err(Error::EmptyDomain);
    }
    let db = build_database(phi, signature)?;
    let element_of: BTreeMap<&str, Element> = db
        .elements
        .iter()
        .enumerate()
        .filter_map(|(e, t)| t.as_var().map(|v| (v, e)))
        .collect();
    let blocks = phi
        .prefix
        .iter()
        .map(|(q, v)| (BlockTag::from(*q), Some(element_of[v.as_str()])))
        .collect();
    let labels = db
        .elements
        .iter()
        .map(|t| t.as_var().expect("constant-free").to_string())
        .collect();
    PartitionedStructure::new(db.structure, blocks)?.with_labels(labels)
}

/// Reads the sentence off a partitioned structure; empty blocks are skipped.
pub fn from_partitioned(p: &PartitionedStructure) -> Result<PHSentence> {
    let prefix = p
        .blocks
        .iter()
        .filter_map(|&(tag, e)| e.map(|e| (Quantifier::from(tag), p.labels[e].clone())))
        .collect();
    let body = p
        .base
        .relations()
        .flat_map(|(rel, _, tuples)| {
            tuples.iter().map(move |t| {
                Atom::new(rel, t.iter().map(|&e| Term::Var(p.labels[e].clone())).collect())
            })
        })
        .collect();
    PHSentence::new(prefix, body)
}

fn fresh_name(base: &str, taken: &mut BTreeSet<String>) -> String {
    let name = (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken.contains(n))
        .expect("unbounded supply of names");
    taken.insert(name.clone());
    name
}

/// Pads the prefix with vacuous variables `d1, d2, …` so it reads
/// `∀∃∀∃…∀∃`.
pub fn normalize_alternation(phi: &PHSentence) -> Result<PHSentence> {
    if phi.bottom {
        return Err(Error::Bottom);
    }
    let mut taken: BTreeSet<String> = phi.variables().map(str::to_string).collect();
    let mut prefix = Vec::with_capacity(phi.prefix.len());
    let mut expected = Quantifier::Forall;
    for (q, v) in &phi.prefix {
        if *q != expected {
            prefix.push((expected, fresh_name("d", &mut taken)));
            expected = expected.flip();
        }
        prefix.push((*q, v.clone()));
        expected = expected.flip();
    }
    if expected == Quantifier::Exists {
        prefix.push((Quantifier::Exists, fresh_name("d", &mut taken)));
    }
    PHSentence::new(prefix, phi.body.clone())
}

/// Quantifier-free first-order formulas with equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn negation(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        let terms = |ts: &'a [Term], out: &mut BTreeSet<&'a str>| {
            out.extend(ts.iter().filter_map(Term::as_var));
        };
        match self {
            Formula::Atom(a) => terms(&a.args, out),
            Formula::Eq(l, r) => {
                out.extend(l.as_var());
                out.extend(r.as_var());
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }
}

/// A prenex first-order sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FOSentence {
    prefix: Vec<(Quantifier, String)>,
    matrix: Formula,
}

impl FOSentence {
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: Formula) -> Result<Self> {
        let bound: BTreeSet<&str> = prefix.iter().map(|(_, v)| v.as_str()).collect();
        if bound.len() != prefix.len() {
            return Err(Error::InvalidSentence("variable quantified twice".into()));
        }
        let mut free = BTreeSet::new();
        matrix.collect_vars(&mut free);
        if let Some(v) = free.iter().find(|v| !bound.contains(*v)) {
            return Err(Error::InvalidSentence(format!("variable `{v}` is free")));
        }
        Ok(FOSentence { prefix, matrix })
    }

    pub fn prefix(&self) -> &[(Quantifier, String)] {
        &self.prefix
    }

    pub fn matrix(&self) -> &Formula {
        &self.matrix
    }
}
