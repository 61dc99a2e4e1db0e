//! The line-oriented `.spx` instance format.
//!
//! ```text
//! # comment
//! p lin2 <n> <k> <m>
//! t <coef> <v1> ... <vk>
//!
//! p csp <n> <k> <m>
//! c <weight> <hex table> <v1> ... <vkj>
//! ```
//!
//! Variables are 1-based. Coefficients and weights are exact rationals
//! (`p/q` or integers). A truth table is the lowercase hex rendering of its
//! `2^kj`-bit integer, where bit `b` is the local assignment in which
//! variable `vt` has sign `-1` exactly when bit `t` of `b` is set.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    format_rational, parse_rational, Constraint, CspInstance, Instance, Lin2Instance, TruthTable,
    MAX_ARITY,
};

struct Header {
    kind: Kind,
    n: usize,
    k: usize,
    m: usize,
    line: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Lin2,
    Csp,
}

/// Parses a `.spx` document into a validated instance.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<Header> = None;
    let mut lin_terms = Vec::new();
    let mut constraints = Vec::new();
    let mut body_lines = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match (fields[0], &header) {
            ("p", None) => header = Some(parse_header(&fields, line)?),
            ("p", Some(_)) => return Err(Error::syntax(line, "duplicate problem line")),
            (_, None) => return Err(Error::syntax(line, "body line before the problem line")),
            ("t", Some(h)) if h.kind == Kind::Lin2 => {
                lin_terms.push(parse_term(&fields, h, line)?);
                body_lines += 1;
            }
            ("c", Some(h)) if h.kind == Kind::Csp => {
                let c = parse_constraint(&fields, h, line, body_lines)?;
                constraints.push(c);
                body_lines += 1;
            }
            (tag, Some(_)) => {
                return Err(Error::syntax(line, format!("unexpected line tag {tag:?}")))
            }
        }
    }

    let h = header.ok_or_else(|| Error::syntax(1, "missing problem line"))?;
    if body_lines != h.m {
        return Err(Error::syntax(
            h.line,
            format!("header declares m = {} but the body has {body_lines} lines", h.m),
        ));
    }
    Ok(match h.kind {
        Kind::Lin2 => Instance::Lin2(Lin2Instance::new(h.n, h.k, lin_terms)?),
        Kind::Csp => Instance::Csp(CspInstance::new(h.n, h.k, constraints)?),
    })
}

fn parse_header(fields: &[&str], line: usize) -> Result<Header> {
    if fields.len() != 5 {
        return Err(Error::syntax(line, "expected `p <lin2|csp> <n> <k> <m>`"));
    }
    let kind = match fields[1] {
        "lin2" => Kind::Lin2,
        "csp" => Kind::Csp,
        other => return Err(Error::syntax(line, format!("unknown problem kind {other:?}"))),
    };
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::syntax(line, format!("{what} must be a nonnegative integer, got {s:?}")))
    };
    let k = num(fields[3], "k")?;
    if k == 0 || (kind == Kind::Csp && k > MAX_ARITY) {
        return Err(Error::syntax(line, format!("k = {k} is out of range")));
    }
    Ok(Header {
        kind,
        n: num(fields[2], "n")?,
        k,
        m: num(fields[4], "m")?,
        line,
    })
}

fn parse_vars(tokens: &[&str], n: usize, line: usize) -> Result<Vec<usize>> {
    tokens
        .iter()
        .map(|t| match t.parse::<usize>() {
            Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
            Ok(v) => Err(Error::syntax(line, format!("variable {v} is outside 1..={n}"))),
            Err(_) => Err(Error::syntax(line, format!("bad variable index {t:?}"))),
        })
        .collect()
}

fn parse_term(
    fields: &[&str],
    h: &Header,
    line: usize,
) -> Result<(Vec<usize>, crate::model::Rational)> {
    if fields.len() != 2 + h.k {
        return Err(Error::syntax(
            line,
            format!("term needs a coefficient and exactly k = {} variables", h.k),
        ));
    }
    let coef = parse_rational(fields[1]).map_err(|e| Error::syntax(line, e.to_string()))?;
    Ok((parse_vars(&fields[2..], h.n, line)?, coef))
}

fn parse_constraint(fields: &[&str], h: &Header, line: usize, index: usize) -> Result<Constraint> {
    if fields.len() < 4 {
        return Err(Error::syntax(line, "constraint needs a weight, a table, and variables"));
    }
    let weight = parse_rational(fields[1]).map_err(|e| Error::syntax(line, e.to_string()))?;
    let vars = parse_vars(&fields[3..], h.n, line)?;
    if vars.len() > h.k {
        return Err(Error::syntax(
            line,
            format!("constraint has {} variables, more than k = {}", vars.len(), h.k),
        ));
    }
    let table = parse_table(fields[2], vars.len()).map_err(|e| Error::syntax(line, e.to_string()))?;
    Constraint::new(vars, weight, table).map_err(|e| match e {
        Error::Invalid { what, message, .. } => Error::Invalid { what, index, message },
        other => other,
    })
}

/// Decodes a hex truth table for the given arity.
pub fn parse_table(hex: &str, arity: usize) -> Result<TruthTable> {
    if hex.is_empty() || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::domain(format!("{hex:?} is not a hex truth table")));
    }
    let mut words = vec![0u64; hex.len().div_ceil(16)];
    for (i, b) in hex.bytes().rev().enumerate() {
        let d = (b as char).to_digit(16).expect("checked hex digit") as u64;
        words[i / 16] |= d << (4 * (i % 16));
    }
    TruthTable::from_words(arity, &words)
}

/// Lowercase hex of a truth table, zero-padded to `⌈2^arity / 4⌉` digits.
pub fn format_table(table: &TruthTable) -> String {
    let digits = (1usize << table.arity()).div_ceil(4);
    let words = table.words();
    (0..digits)
        .rev()
        .map(|i| {
            let d = (words[i / 16] >> (4 * (i % 16))) & 0xf;
            char::from_digit(d as u32, 16).expect("nibble")
        })
        .collect()
}

/// Renders an instance in `.spx` form; `parse_instance` inverts it exactly.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    match inst {
        Instance::Lin2(i) => {
            writeln!(out, "p lin2 {} {} {}", i.n(), i.k(), i.terms().len()).unwrap();
            for t in i.terms() {
                write!(out, "t {}", format_rational(&t.coef)).unwrap();
                for v in &t.vars {
                    write!(out, " {}", v + 1).unwrap();
                }
                out.push('\n');
            }
        }
        Instance::Csp(i) => {
            writeln!(out, "p csp {} {} {}", i.n(), i.k(), i.constraints().len()).unwrap();
            for c in i.constraints() {
                write!(out, "c {} {}", format_rational(c.weight()), format_table(c.table())).unwrap();
                for v in c.vars() {
                    write!(out, " {}", v + 1).unwrap();
                }
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{int, ratio};

    #[test]
    fn parses_lin2_example() {
        let inst = parse_instance("p lin2 2 2 1\nt -1 1 2\n").unwrap();
        let expected = Lin2Instance::new(2, 2, vec![(vec![0, 1], int(-1))]).unwrap();
        assert_eq!(inst, Instance::Lin2(expected));
    }

    #[test]
    fn parses_clause_table() {
        let Instance::Csp(inst) = parse_instance("p csp 3 3 1\nc 1 fe 1 2 3\n").unwrap() else {
            panic!("expected csp");
        };
        assert_eq!(inst.constraints()[0].satisfied_count(), 7);
        assert!(!inst.constraints()[0].table().get(0));
    }

    #[test]
    fn arity_mismatch_reports_line() {
        let err = parse_instance("p lin2 2 2 1\nt -1 1\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn trivial_predicate_reports_constraint_index() {
        let err = parse_instance("p csp 2 2 2\nc 1 e 1 2\nc 1 f 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Invalid { index: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_malformed_documents() {
        for bad in [
            "",
            "t 1 1 2\n",
            "p lin2 2 2 1\n",
            "p lin2 2 2 1\nt 0.5 1 2\n",
            "p lin2 2 2 1\nt 1 1 3\n",
            "p csp 2 2 1\nc 1 1ff 1 2\n",
            "p csp 2 2 1\nc 1 xz 1 2\n",
            "p csp 2 2 1\nt 1 1 2\n",
            "p max 2 2 0\n",
            "p lin2 2 2 0\np lin2 2 2 0\n",
        ] {
            assert!(parse_instance(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn round_trip_with_comments_and_rationals() {
        let text = "# weighted\np csp 4 3 2\n\nc 3/2 7f 1 2 3\nc 2 1 4\n";
        let inst = parse_instance(text).unwrap();
        let Instance::Csp(csp) = &inst else { panic!() };
        assert_eq!(csp.constraints()[0].weight(), &ratio(3, 2));
        assert_eq!(write_instance(&inst), "p csp 4 3 2\nc 3/2 7f 1 2 3\nc 2 1 4\n");
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn wide_tables_round_trip() {
        let t = TruthTable::from_fn(7, |b| b % 3 != 0).unwrap();
        let hex = format_table(&t);
        assert_eq!(hex.len(), 32);
        assert_eq!(parse_table(&hex, 7).unwrap(), t);
    }
}
