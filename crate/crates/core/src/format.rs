//! Line-oriented text formats.
//!
//! Structures (`.rel`):
//!
//! ```text
//! # K2
//! domain 2
//! relation E 2
//! 0 1
//! 1 0
//! end
//! ```
//!
//! Sentences (`.ph`): an optional `prefix` line of `A <var>` / `E <var>`
//! pairs, then one `atom <rel> <term>…` line per atom, where a term is a
//! variable or `@<element>`. The single line `false` is ⊥. `#` starts a
//! comment in both formats.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::logic::{Atom, PHSentence, Quantifier, Term};
use crate::structures::{Signature, Structure, Tuple};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn number(&self, what: &str) -> Result<usize> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected {what}, found `{}`", self.text)))
    }
}

/// Non-empty lines split into tokens, comments removed.
fn lines(input: &str) -> Vec<Vec<Token<'_>>> {
    input
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let text = raw.split('#').next().unwrap_or("");
            let mut tokens = Vec::new();
            let mut start = None;
            for (col, ch) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
                match (ch.is_whitespace(), start) {
                    (false, None) => start = Some(col),
                    (true, Some(s)) => {
                        tokens.push(Token {
                            text: &text[s..col],
                            line: i + 1,
                            column: text[..s].chars().count() + 1,
                        });
                        start = None;
                    }
                    _ => {}
                }
            }
            tokens
        })
        .filter(|t| !t.is_empty())
        .collect()
}

fn eof_error(input: &str, message: &str) -> Error {
    Error::Parse {
        line: input.lines().count().max(1),
        column: 1,
        message: message.to_string(),
    }
}

fn expect_len(line: &[Token], n: usize, what: &str) -> Result<()> {
    if line.len() == n {
        Ok(())
    } else {
        let at = line.get(n).unwrap_or(&line[0]);
        Err(at.error(format!("expected {what}")))
    }
}

pub fn parse_structure(input: &str) -> Result<Structure> {
    let lines = lines(input);
    let mut iter = lines.iter();
    let first = iter.next().ok_or_else(|| eof_error(input, "expected `domain <m>`"))?;
    if first[0].text != "domain" {
        return Err(first[0].error("expected `domain <m>`"));
    }
    expect_len(first, 2, "`domain <m>`")?;
    let size = first[1].number("a domain size")?;
    if size == 0 {
        return Err(first[1].error("domain must be nonempty"));
    }

    let mut symbols: Vec<(String, usize)> = Vec::new();
    let mut relations: Vec<Vec<Tuple>> = Vec::new();
    let mut open: Option<usize> = None;
    for line in iter {
        let head = &line[0];
        match (open, head.text) {
            (None, "relation") => {
                expect_len(line, 3, "`relation <name> <arity>`")?;
                let name = line[1].text;
                if symbols.iter().any(|(n, _)| n == name) {
                    return Err(line[1].error(format!("relation `{name}` declared twice")));
                }
                let arity = line[2].number("an arity")?;
                if arity == 0 {
                    return Err(line[2].error("arity must be positive"));
                }
                symbols.push((name.to_string(), arity));
                relations.push(Vec::new());
                open = Some(symbols.len() - 1);
            }
            (None, _) => return Err(head.error("expected `relation <name> <arity>`")),
            (Some(_), "end") => {
                expect_len(line, 1, "`end`")?;
                open = None;
            }
            (Some(r), _) => {
                let arity = symbols[r].1;
                if line.len() != arity {
                    return Err(head.error(format!(
                        "relation `{}` has arity {arity}, tuple has {} entries",
                        symbols[r].0,
                        line.len()
                    )));
                }
                let tuple = line
                    .iter()
                    .map(|t| {
                        let e = t.number("an element")?;
                        if e >= size {
                            return Err(t.error(format!("element {e} outside domain of size {size}")));
                        }
                        Ok(e)
                    })
                    .collect::<Result<Tuple>>()?;
                relations[r].push(tuple);
            }
        }
    }
    if let Some(r) = open {
        return Err(eof_error(input, &format!("relation `{}` is missing `end`", symbols[r].0)));
    }
    let names: Vec<String> = symbols.iter().map(|(n, _)| n.clone()).collect();
    let signature = Signature::new(symbols)?;
    Structure::from_relations(signature, size, names.iter().map(String::as_str).zip(relations))
}

pub fn print_structure(s: &Structure) -> String {
    print_structure_labelled(s, None)
}

/// As [`print_structure`], listing element names as comments when given.
pub fn print_structure_labelled(s: &Structure, labels: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(labels) = labels {
        for (e, l) in labels.iter().enumerate() {
            let _ = writeln!(out, "# {e}: {l}");
        }
    }
    let _ = writeln!(out, "domain {}", s.size());
    for (name, arity, tuples) in s.relations() {
        let _ = writeln!(out, "relation {name} {arity}");
        for t in tuples {
            let row: Vec<String> = t.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out.push_str("end\n");
    }
    out
}

fn parse_term(t: &Token) -> Result<Term> {
    match t.text.strip_prefix('@') {
        Some(rest) => rest
            .parse()
            .map(Term::Const)
            .map_err(|_| t.error(format!("bad constant `{}`", t.text))),
        None => Ok(Term::Var(t.text.to_string())),
    }
}

pub fn parse_sentence(input: &str) -> Result<PHSentence> {
    let lines = lines(input);
    if let Some(first) = lines.first() {
        if first[0].text == "false" {
            expect_len(first, 1, "`false` alone")?;
            if let Some(extra) = lines.get(1) {
                return Err(extra[0].error("nothing may follow `false`"));
            }
            return Ok(PHSentence::bottom());
        }
    }
    let mut prefix: Vec<(Quantifier, String)> = Vec::new();
    let mut body = Vec::new();
    let mut arities: Vec<(&str, usize)> = Vec::new();
    let mut seen_prefix = false;
    for (i, line) in lines.iter().enumerate() {
        let head = &line[0];
        match head.text {
            "prefix" => {
                if seen_prefix || i > 0 {
                    return Err(head.error("`prefix` must be the first line and appear once"));
                }
                seen_prefix = true;
                let pairs = &line[1..];
                if pairs.len() % 2 != 0 {
                    return Err(pairs[pairs.len() - 1].error("quantifier without a variable"));
                }
                for pair in pairs.chunks(2) {
                    let q = match pair[0].text {
                        "A" => Quantifier::Forall,
                        "E" => Quantifier::Exists,
                        other => return Err(pair[0].error(format!("expected `A` or `E`, found `{other}`"))),
                    };
                    let var = pair[1].text;
                    if var.starts_with('@') {
                        return Err(pair[1].error("variables may not start with `@`"));
                    }
                    if prefix.iter().any(|(_, v)| v == var) {
                        return Err(pair[1].error(format!("variable `{var}` quantified twice")));
                    }
                    prefix.push((q, var.to_string()));
                }
            }
            "atom" => {
                if line.len() < 3 {
                    return Err(head.error("expected `atom <rel> <term>…`"));
                }
                let args = line[2..]
                    .iter()
                    .map(|t| {
                        let term = parse_term(t)?;
                        if let Term::Var(v) = &term {
                            if !prefix.iter().any(|(_, p)| p == v) {
                                return Err(t.error(format!("variable `{v}` is not quantified")));
                            }
                        }
                        Ok(term)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let symbol = line[1].text;
                match arities.iter().find(|(name, _)| *name == symbol) {
                    Some(&(_, arity)) if arity != args.len() => {
                        return Err(line[1].error(format!(
                            "`{symbol}` used with {} arguments, earlier with {arity}",
                            args.len()
                        )));
                    }
                    Some(_) => {}
                    None => arities.push((symbol, args.len())),
                }
                body.push(Atom::new(symbol, args));
            }
            "false" => return Err(head.error("`false` must be the only line")),
            other => return Err(head.error(format!("expected `prefix` or `atom`, found `{other}`"))),
        }
    }
    PHSentence::new(prefix, body)
}

pub fn print_sentence(phi: &PHSentence) -> String {
    if phi.is_bottom() {
        return "false\n".to_string();
    }
    let mut out = String::from("prefix");
    for (q, v) in phi.prefix() {
        let tag = match q {
            Quantifier::Forall => "A",
            Quantifier::Exists => "E",
        };
        let _ = write!(out, " {tag} {v}");
    }
    out.push('\n');
    for atom in phi.body() {
        let _ = write!(out, "atom {}", atom.symbol);
        for t in &atom.args {
            let _ = write!(out, " {t}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    #[test]
    fn structure_round_trip_on_fixtures() {
        for (_, s) in all() {
            assert_eq!(parse_structure(&print_structure(&s)).unwrap(), s);
        }
    }

    #[test]
    fn parse_k2_with_comments() {
        let text = "# complete graph\ndomain 2\nrelation E 2\n0 1  # forward\n1 0\nend\n";
        assert_eq!(parse_structure(text).unwrap(), k2());
    }

    fn parse_err(r: Result<impl std::fmt::Debug>) -> (usize, usize) {
        match r {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn structure_diagnostics() {
        assert_eq!(parse_err(parse_structure("domain 2\nrelation E 2\n0 2\nend\n")), (3, 3));
        assert_eq!(parse_err(parse_structure("domain 2\nrelation E 2\n0 1\n")), (3, 1));
        assert_eq!(parse_err(parse_structure("relation E 2\n")), (1, 1));
        assert_eq!(parse_err(parse_structure("domain 0\n")), (1, 8));
        assert_eq!(parse_err(parse_structure("domain 2\nrelation E 2\n0\nend\n")), (3, 1));
        assert_eq!(parse_err(parse_structure("domain 2\n  bogus\n")), (2, 3));
    }

    #[test]
    fn sentence_formats() {
        let text = "prefix A x E y\natom E x y\n";
        let phi = parse_sentence(text).unwrap();
        assert_eq!(phi.to_string(), "∀x ∃y E(x,y)");
        assert_eq!(print_sentence(&phi), text);
        assert!(parse_sentence("false\n").unwrap().is_bottom());
        assert_eq!(print_sentence(&PHSentence::bottom()), "false\n");
        let empty = parse_sentence("").unwrap();
        assert!(empty.prefix().is_empty() && empty.body().is_empty());
        let c = parse_sentence("prefix E v\natom E @1 v\n").unwrap();
        assert_eq!(c.to_string(), "∃v E(@1,v)");
        assert_eq!(parse_sentence(&print_sentence(&c)).unwrap(), c);
    }

    #[test]
    fn sentence_diagnostics() {
        assert_eq!(parse_err(parse_sentence("prefix A x\natom E x y\n")), (2, 10));
        assert_eq!(parse_err(parse_sentence("prefix A x Q y\n")), (1, 12));
        assert_eq!(parse_err(parse_sentence("prefix A x E\n")), (1, 12));
        assert_eq!(parse_err(parse_sentence("false\natom E x\n")), (2, 1));
        assert_eq!(parse_err(parse_sentence("atom E @x\n")), (1, 8));
        assert_eq!(parse_err(parse_sentence("atom E\n")), (1, 1));
        assert_eq!(parse_err(parse_sentence("prefix A x\natom E x x\natom E x\n")), (3, 6));
    }
}
