use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{int, Constraint, CspInstance, TruthTable, MAX_ARITY};

/// Imports a DIMACS CNF file as unit-weight clause constraints.
///
/// A boolean variable that is true corresponds to sign `-1`. Each clause
/// becomes a constraint whose only falsifying local assignment sets bit `t`
/// exactly when literal `t` is negated. Repeated literals are merged and
/// tautological clauses are rejected. `max_arity` defaults to the longest
/// clause.
pub fn import_dimacs_cnf(text: &str, max_arity: Option<usize>) -> Result<CspInstance> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut current_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.starts_with('%') {
            break;
        }
        if content.is_empty() || content.starts_with('c') {
            continue;
        }
        if content.starts_with('p') {
            let f: Vec<&str> = content.split_whitespace().collect();
            if header.is_some() || f.len() != 4 || f[1] != "cnf" {
                return Err(Error::syntax(line, "expected a single `p cnf <vars> <clauses>` line"));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::syntax(line, format!("bad count {s:?}")))
            };
            header = Some((parse(f[2])?, parse(f[3])?, line));
            continue;
        }
        let Some((nv, _, _)) = header else {
            return Err(Error::syntax(line, "clause before the problem line"));
        };
        for tok in content.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::syntax(line, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::syntax(line, "empty clause"));
                }
                clauses.push((current_line, std::mem::take(&mut current)));
                continue;
            }
            if lit.unsigned_abs() as usize > nv {
                return Err(Error::syntax(line, format!("literal {lit} exceeds {nv} variables")));
            }
            if current.is_empty() {
                current_line = line;
            }
            current.push(lit);
        }
    }
    let (nv, nc, hline) = header.ok_or_else(|| Error::syntax(1, "missing `p cnf` line"))?;
    if !current.is_empty() {
        clauses.push((current_line, current));
    }
    if clauses.len() != nc {
        return Err(Error::syntax(
            hline,
            format!("header declares {nc} clauses but {} were read", clauses.len()),
        ));
    }

    let mut constraints = Vec::with_capacity(clauses.len());
    for (j, (line, lits)) in clauses.iter().enumerate() {
        let mut signs: BTreeMap<usize, bool> = BTreeMap::new();
        for &lit in lits {
            let var = lit.unsigned_abs() as usize - 1;
            let negated = lit < 0;
            if signs.insert(var, negated).is_some_and(|prev| prev != negated) {
                return Err(Error::invalid(
                    "clause",
                    j,
                    format!("(line {line}) is tautological in variable {}", var + 1),
                ));
            }
        }
        if signs.len() > MAX_ARITY {
            return Err(Error::invalid("clause", j, format!("has more than {MAX_ARITY} literals")));
        }
        let vars: Vec<usize> = signs.keys().copied().collect();
        let falsifying = signs
            .values()
            .enumerate()
            .fold(0usize, |b, (t, &neg)| b | ((neg as usize) << t));
        let table = TruthTable::all_but(vars.len(), falsifying)?;
        constraints.push(Constraint::new(vars, int(1), table)?);
    }
    let longest = constraints.iter().map(Constraint::arity).max().unwrap_or(1);
    let k = max_arity.unwrap_or(longest);
    if let Some(j) = constraints.iter().position(|c| c.arity() > k) {
        return Err(Error::invalid(
            "clause",
            j,
            format!("has {} distinct literals, more than k = {k}", constraints[j].arity()),
        ));
    }
    CspInstance::new(nv, k, constraints)
}
