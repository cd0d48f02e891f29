//! Reference decision procedures: CSP through homomorphism search, QCSP
//! through plain game-tree recursion, and a first-order model checker.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::{canonical_database, Atom, FOSentence, Formula, PHSentence, Quantifier, Term};
use crate::structures::{find_homomorphism, Element, Structure};

/// Default number of game-tree nodes [`qcsp_eval`] may visit.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Decides `b ⊨ phi` for a primitive positive `phi` (constants allowed) by
/// searching for a homomorphism from its canonical database. ⊥ is false.
pub fn csp_eval(b: &Structure, phi: &PHSentence) -> Result<bool> {
    if phi.is_bottom() {
        return Ok(false);
    }
    if !phi.is_primitive_positive() {
        return Err(Error::NotPrimitivePositive);
    }
    phi.check_against(b)?;
    if phi.prefix().is_empty() && phi.body().is_empty() {
        return Ok(true);
    }
    let db = canonical_database(phi, b.signature())?;
    Ok(find_homomorphism(&db.structure, b, &db.pins)?.is_some())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameOptions {
    /// Evaluation aborts with [`Error::BudgetExceeded`] past this many nodes.
    pub node_budget: u64,
}

impl Default for GameOptions {
    fn default() -> Self {
        GameOptions {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

pub fn qcsp_eval(b: &Structure, phi: &PHSentence) -> Result<bool> {
    qcsp_eval_with(b, phi, GameOptions::default())
}

#[derive(Clone, Copy)]
enum Slot {
    Var(usize),
    Const(Element),
}

struct Game<'a> {
    b: &'a Structure,
    kinds: Vec<Quantifier>,
    // atoms_at[i]: atoms whose last variable sits at prefix position i
    atoms_at: Vec<Vec<(usize, Vec<Slot>)>>,
    nodes: u64,
    budget: u64,
}

impl Game<'_> {
    fn holds(&self, atoms: &[(usize, Vec<Slot>)], assignment: &[Element]) -> bool {
        atoms.iter().all(|(rel, slots)| {
            let t: Vec<Element> = slots
                .iter()
                .map(|s| match *s {
                    Slot::Var(i) => assignment[i],
                    Slot::Const(c) => c,
                })
                .collect();
            self.b.relation_at(*rel).contains(&t)
        })
    }

    fn play(&mut self, depth: usize, assignment: &mut Vec<Element>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if depth == self.kinds.len() {
            return Ok(true);
        }
        let q = self.kinds[depth];
        for v in self.b.elements() {
            assignment.push(v);
            let won = self.holds(&self.atoms_at[depth], assignment) && self.play(depth + 1, assignment)?;
            assignment.pop();
            match (q, won) {
                (Quantifier::Forall, false) => return Ok(false),
                (Quantifier::Exists, true) => return Ok(true),
                _ => {}
            }
        }
        Ok(q == Quantifier::Forall)
    }
}

/// Decides `b ⊨ phi` for a positive Horn `phi` (constants allowed) by
/// recursion over the quantifier prefix: universals conjoin over the whole
/// domain, existentials disjoin. Each atom is tested as soon as its last
/// variable is bound.
pub fn qcsp_eval_with(b: &Structure, phi: &PHSentence, options: GameOptions) -> Result<bool> {
    if phi.is_bottom() {
        return Ok(false);
    }
    phi.check_against(b)?;
    let position: BTreeMap<&str, usize> = phi.variables().enumerate().map(|(i, v)| (v, i)).collect();
    let n = phi.prefix().len();
    let mut ground = Vec::new();
    let mut atoms_at = vec![Vec::new(); n];
    for atom in phi.body() {
        let rel = b.signature().index_of(&atom.symbol).expect("checked above");
        let slots: Vec<Slot> = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Slot::Var(position[v.as_str()]),
                Term::Const(c) => Slot::Const(*c),
            })
            .collect();
        let last = slots
            .iter()
            .filter_map(|s| match s {
                Slot::Var(i) => Some(*i),
                Slot::Const(_) => None,
            })
            .max();
        match last {
            Some(i) => atoms_at[i].push((rel, slots)),
            None => ground.push((rel, slots)),
        }
    }
    let mut game = Game {
        b,
        kinds: phi.prefix().iter().map(|(q, _)| *q).collect(),
        atoms_at,
        nodes: 0,
        budget: options.node_budget,
    };
    if !game.holds(&ground, &[]) {
        return Ok(false);
    }
    game.play(0, &mut Vec::with_capacity(n))
}

fn check_formula(d: &Structure, f: &Formula) -> Result<()> {
    let check_term = |t: &Term| match t {
        Term::Const(c) if *c >= d.size() => Err(Error::ElementOutOfRange {
            element: *c,
            size: d.size(),
        }),
        _ => Ok(()),
    };
    match f {
        Formula::Atom(Atom { symbol, args }) => {
            let arity = d
                .signature()
                .arity(symbol)
                .ok_or_else(|| Error::UnknownSymbol(symbol.clone()))?;
            if arity != args.len() {
                return Err(Error::ArityMismatch {
                    symbol: symbol.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            args.iter().try_for_each(check_term)
        }
        Formula::Eq(l, r) => check_term(l).and(check_term(r)),
        Formula::Not(g) => check_formula(d, g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().try_for_each(|g| check_formula(d, g)),
    }
}

type Assignment<'a> = BTreeMap<&'a str, Element>;

fn value(t: &Term, env: &Assignment) -> Element {
    match t {
        Term::Var(v) => env[v.as_str()],
        Term::Const(c) => *c,
    }
}

fn eval_matrix(d: &Structure, f: &Formula, env: &Assignment) -> bool {
    match f {
        Formula::Atom(a) => {
            let t: Vec<Element> = a.args.iter().map(|t| value(t, env)).collect();
            d.holds(&a.symbol, &t)
        }
        Formula::Eq(l, r) => value(l, env) == value(r, env),
        Formula::Not(g) => !eval_matrix(d, g, env),
        Formula::And(gs) => gs.iter().all(|g| eval_matrix(d, g, env)),
        Formula::Or(gs) => gs.iter().any(|g| eval_matrix(d, g, env)),
    }
}

fn eval_prefix<'a>(d: &Structure, theta: &'a FOSentence, depth: usize, env: &mut Assignment<'a>) -> bool {
    let Some((q, var)) = theta.prefix().get(depth) else {
        return eval_matrix(d, theta.matrix(), env);
    };
    let mut branch = |v: Element| {
        env.insert(var.as_str(), v);
        eval_prefix(d, theta, depth + 1, env)
    };
    match q {
        Quantifier::Forall => d.elements().all(&mut branch),
        Quantifier::Exists => d.elements().any(&mut branch),
    }
}

/// Tarskian truth of a prenex first-order sentence in `d`.
pub fn eval_fo(d: &Structure, theta: &FOSentence) -> Result<bool> {
    check_formula(d, theta.matrix())?;
    Ok(eval_prefix(d, theta, 0, &mut Assignment::new()))
}

/// `∀x ¬(U0(x) ∧ U1(x))`, which defines CSP of the two-element structure
/// with singleton unaries `U0 = {0}` and `U1 = {1}`.
pub fn theta_u2() -> FOSentence {
    let both = Formula::And(vec![
        Formula::Atom(Atom::vars("U0", &["x"])),
        Formula::Atom(Atom::vars("U1", &["x"])),
    ]);
    FOSentence::new(vec![(Quantifier::Forall, "x".into())], Formula::negation(both)).expect("closed")
}
