//! Instance generators: bounded-exhaustive enumeration and seeded random
//! sampling of constant-free positive Horn sentences.

use itertools::Itertools;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::logic::{Atom, PHSentence, Quantifier, Term};
use crate::structures::Signature;

/// Every atom over `vars` for every symbol of `signature`.
pub fn all_atoms(signature: &Signature, vars: &[String]) -> Vec<Atom> {
    let mut out = Vec::new();
    for (name, arity) in signature.symbols() {
        if vars.is_empty() {
            continue;
        }
        for args in (0..*arity).map(|_| vars.iter()).multi_cartesian_product() {
            out.push(Atom::new(name.clone(), args.into_iter().map(|v| Term::Var(v.clone())).collect()));
        }
    }
    out
}

/// All quantifier prefixes with exactly `universals` universals `u1, u2, …`
/// and `existentials` existentials `v1, v2, …`, in every interleaving.
pub fn prefixes(universals: usize, existentials: usize) -> Vec<Vec<(Quantifier, String)>> {
    let n = universals + existentials;
    (0..n)
        .combinations(universals)
        .map(|upos| {
            let (mut u, mut v) = (0, 0);
            (0..n)
                .map(|i| {
                    if upos.contains(&i) {
                        u += 1;
                        (Quantifier::Forall, format!("u{u}"))
                    } else {
                        v += 1;
                        (Quantifier::Exists, format!("v{v}"))
                    }
                })
                .collect()
        })
        .collect()
}

/// Every constant-free sentence with at most the given numbers of
/// universals, existentials and (distinct) atoms.
pub fn exhaustive_sentences(
    signature: &Signature,
    max_universals: usize,
    max_existentials: usize,
    max_atoms: usize,
) -> Vec<PHSentence> {
    let mut out = Vec::new();
    for nu in 0..=max_universals {
        for ne in 0..=max_existentials {
            for prefix in prefixes(nu, ne) {
                let vars: Vec<String> = prefix.iter().map(|(_, v)| v.clone()).collect();
                let atoms = all_atoms(signature, &vars);
                for k in 0..=max_atoms.min(atoms.len()) {
                    for body in atoms.iter().cloned().combinations(k) {
                        out.push(PHSentence::new(prefix.clone(), body).expect("well formed"));
                    }
                }
            }
        }
    }
    out
}

/// Shape of randomly sampled sentences.
#[derive(Debug, Clone)]
pub struct SentenceConfig {
    /// `(name, arity, weight)`; symbols are drawn proportionally to weight.
    pub symbols: Vec<(String, usize, u32)>,
    pub min_vars: usize,
    pub max_vars: usize,
    pub max_universals: usize,
    pub max_existentials: usize,
    pub max_atoms: usize,
    pub universal_probability: f64,
}

impl SentenceConfig {
    /// Uniform weights over `signature`.
    pub fn over(signature: &Signature) -> Self {
        SentenceConfig {
            symbols: signature.symbols().iter().map(|(n, a)| (n.clone(), *a, 1)).collect(),
            min_vars: 1,
            max_vars: 4,
            max_universals: usize::MAX,
            max_existentials: usize::MAX,
            max_atoms: 4,
            universal_probability: 0.5,
        }
    }

    pub fn vars(mut self, min: usize, max: usize) -> Self {
        self.min_vars = min;
        self.max_vars = max;
        self
    }

    pub fn atoms(mut self, max: usize) -> Self {
        self.max_atoms = max;
        self
    }

    pub fn quantifiers(mut self, max_universals: usize, max_existentials: usize) -> Self {
        self.max_universals = max_universals;
        self.max_existentials = max_existentials;
        self
    }

    pub fn universal_probability(mut self, p: f64) -> Self {
        self.universal_probability = p;
        self
    }

    /// Adds a symbol with the given weight.
    pub fn with_symbol(mut self, name: &str, arity: usize, weight: u32) -> Self {
        self.symbols.push((name.to_string(), arity, weight));
        self
    }
}

/// A seeded stream of random sentences.
pub struct SentenceSampler {
    rng: ChaCha8Rng,
    config: SentenceConfig,
}

impl SentenceSampler {
    pub fn new(seed: u64, config: SentenceConfig) -> Self {
        SentenceSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
        }
    }

    pub fn sample(&mut self) -> PHSentence {
        let c = &self.config;
        let n = self.rng.gen_range(c.min_vars..=c.max_vars);
        let (mut nu, mut ne) = (0, 0);
        let mut prefix = Vec::with_capacity(n);
        for _ in 0..n {
            let want_universal = self.rng.gen_bool(c.universal_probability);
            let universal = (want_universal && nu < c.max_universals) || ne >= c.max_existentials;
            if universal && nu >= c.max_universals {
                break;
            }
            if universal {
                nu += 1;
                prefix.push((Quantifier::Forall, format!("u{nu}")));
            } else {
                ne += 1;
                prefix.push((Quantifier::Exists, format!("v{ne}")));
            }
        }
        let total: u32 = c.symbols.iter().map(|s| s.2).sum();
        let atom_count = if prefix.is_empty() || total == 0 {
            0
        } else {
            self.rng.gen_range(0..=c.max_atoms)
        };
        let mut body = Vec::with_capacity(atom_count);
        for _ in 0..atom_count {
            let mut pick = self.rng.gen_range(0..total);
            let (name, arity, _) = c
                .symbols
                .iter()
                .find(|s| {
                    if pick < s.2 {
                        true
                    } else {
                        pick -= s.2;
                        false
                    }
                })
                .expect("pick below total weight");
            let args = (0..*arity)
                .map(|_| Term::Var(prefix[self.rng.gen_range(0..prefix.len())].1.clone()))
                .collect();
            body.push(Atom::new(name.clone(), args));
        }
        PHSentence::new(prefix, body).expect("well formed")
    }
}

impl Iterator for SentenceSampler {
    type Item = PHSentence;

    fn next(&mut self) -> Option<PHSentence> {
        Some(self.sample())
    }
}
