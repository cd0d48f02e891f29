//! Seeded cross-checks of every construction against the reference
//! evaluators.

use std::fmt;

use itertools::Itertools;

use crate::collapse::{apply_collapsing, chen_reduction, qcsp_via_collapsibility};
use crate::error::Result;
use crate::fixtures;
use crate::generate::{exhaustive_sentences, SentenceConfig, SentenceSampler};
use crate::logic::{canonical_database, PHSentence};
use crate::microcosm::{backward_reduce, forward_reduce, microcosm_structure, DEFAULT_F_SYMBOL};
use crate::polymorphism::find_nu;
use crate::solvers::{csp_eval, eval_fo, qcsp_eval, theta_u2};
use crate::structures::Structure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Microcosm,
    Chen,
    Collapse,
    Fo,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "microcosm" => Ok(Suite::Microcosm),
            "chen" => Ok(Suite::Chen),
            "collapse" => Ok(Suite::Collapse),
            "fo" => Ok(Suite::Fo),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

/// One instance on which two routes disagreed.
#[derive(Debug, Clone)]
pub struct Discrepancy {
    pub check: String,
    pub structure: Structure,
    pub sentence: PHSentence,
    pub expected: bool,
    pub actual: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checked: usize,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
}

impl Report {
    fn compare(&mut self, check: &str, b: &Structure, phi: &PHSentence, expected: bool, actual: bool) {
        self.checked += 1;
        if expected != actual {
            self.discrepancies.push(Discrepancy {
                check: check.to_string(),
                structure: b.clone(),
                sentence: phi.clone(),
                expected,
                actual,
            });
        }
    }

    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for note in &self.notes {
            writeln!(f, "{note}")?;
        }
        write!(f, "checked {} instances, {} discrepancies", self.checked, self.discrepancies.len())
    }
}

pub fn run(suite: Suite, samples: usize, seed: u64) -> Result<Report> {
    match suite {
        Suite::Microcosm => microcosm_suite(samples, seed),
        Suite::Chen => chen_suite(samples, seed),
        Suite::Collapse => collapse_suite(samples, seed),
        Suite::Fo => fo_suite(),
    }
}

pub fn microcosm_fixtures() -> Vec<(&'static str, Structure)> {
    vec![
        ("K2", fixtures::k2()),
        ("P1", fixtures::p1()),
        ("U2", fixtures::u2()),
        ("K3", fixtures::k3()),
    ]
}

fn microcosm_suite(samples: usize, seed: u64) -> Result<Report> {
    let f = DEFAULT_F_SYMBOL;
    let mut report = Report::default();
    for (i, (name, b)) in microcosm_fixtures().into_iter().enumerate() {
        let c = microcosm_structure(&b, f)?;
        let sig = b.signature();
        let exhaustive = exhaustive_sentences(sig, 2, 2, 3);
        let random = SentenceSampler::new(seed.wrapping_add(i as u64), SentenceConfig::over(sig).vars(1, 8).atoms(6))
            .take(samples);
        for phi in exhaustive.into_iter().chain(random) {
            let expected = qcsp_eval(&b, &phi)?;
            report.compare("forward", &b, &phi, expected, qcsp_eval(&c, &forward_reduce(&phi, f)?)?);
            let round = backward_reduce(&forward_reduce(&phi, f)?, f)?;
            report.compare("round trip", &b, &phi, expected, qcsp_eval(&b, &round)?);
        }
        let config = SentenceConfig::over(sig).with_symbol(f, 2, 2).vars(1, 6).atoms(6);
        for phi in SentenceSampler::new(seed.wrapping_add(100 + i as u64), config).take(samples) {
            let expected = qcsp_eval(&c, &phi)?;
            report.compare("backward", &c, &phi, expected, qcsp_eval(&b, &backward_reduce(&phi, f)?)?);
        }
        report.notes.push(format!("{name}: forward, round-trip and backward checks done"));
    }
    Ok(report)
}

fn chen_suite(samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::default();
    for (i, (name, b)) in [("K2", fixtures::k2()), ("U2", fixtures::u2())].into_iter().enumerate() {
        let sig = b.signature();
        let random = SentenceSampler::new(
            seed.wrapping_add(i as u64),
            SentenceConfig::over(sig).vars(1, 5).atoms(4).quantifiers(3, 3),
        )
        .take(samples);
        for phi in exhaustive_sentences(sig, 2, 2, 3).into_iter().chain(random) {
            let universals: Vec<&str> = phi.universals().collect();
            for survivors in universals.iter().copied().powerset() {
                for a in b.elements() {
                    let collapsed = apply_collapsing(&phi, &survivors, a)?;
                    let expanded = chen_reduction(&collapsed, b.size(), survivors.len())?;
                    report.compare("chen", &b, &collapsed, qcsp_eval(&b, &collapsed)?, csp_eval(&b, &expanded)?);
                }
            }
        }
        report.notes.push(format!("{name}: every survivor set and collapse element checked"));
    }
    Ok(report)
}

fn collapse_suite(samples: usize, seed: u64) -> Result<Report> {
    let mut report = Report::default();
    let cores = [("K2", fixtures::k2()), ("U2", fixtures::u2()), ("L1", fixtures::l1())];
    for (i, (name, b)) in cores.into_iter().enumerate() {
        if find_nu(&b, 3)?.is_none() {
            report.notes.push(format!("{name}: no ternary near-unanimity polymorphism; skipped"));
            continue;
        }
        let config = SentenceConfig::over(b.signature()).vars(1, 7).atoms(5).quantifiers(4, 3);
        for phi in SentenceSampler::new(seed.wrapping_add(i as u64), config).take(samples) {
            let expected = qcsp_eval(&b, &phi)?;
            for a in b.elements() {
                report.compare("collapsibility", &b, &phi, expected, qcsp_via_collapsibility(&b, &phi, 2, a)?);
            }
        }
        report.notes.push(format!("{name}: ternary NU found; (2,a)-collapsing decision checked"));
    }
    // With at most two universals every universal survives, so the
    // structures D(λ) decide the sentence outright.
    let b = fixtures::u2();
    for phi in exhaustive_sentences(b.signature(), 2, 2, 3) {
        let expected = qcsp_eval(&b, &phi)?;
        for a in b.elements() {
            report.compare("D(λ)", &b, &phi, expected, qcsp_via_collapsibility(&b, &phi, 2, a)?);
        }
    }
    Ok(report)
}

fn fo_suite() -> Result<Report> {
    let mut report = Report::default();
    let b = fixtures::u2();
    let theta = theta_u2();
    for phi in exhaustive_sentences(b.signature(), 0, 4, 4) {
        if phi.prefix().is_empty() {
            continue;
        }
        let db = canonical_database(&phi, b.signature())?;
        report.compare("fo", &b, &phi, csp_eval(&b, &phi)?, eval_fo(&db.structure, &theta)?);
    }
    report.notes.push("U2: ∀x ¬(U0(x) ∧ U1(x)) checked on canonical databases".into());
    Ok(report)
}
