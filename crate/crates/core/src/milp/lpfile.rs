//! Plain-text LP interchange for cross-checking with external solvers.
//!
//! Layout (CPLEX LP dialect, one item per line, no wrapping):
//!
//! ```text
//! \ comment lines start with a backslash
//! Maximize
//!  obj: + 1 rm_0_1_0 - 0.24 tm_0_1_0 - 35
//! Subject To
//!  bc_0_0: + 1 bs_0_1 - 1 bs_0_0 + 1 rm_0_1_0 = 0
//! Bounds
//!  0 <= bs_0_0 <= +inf
//! Generals
//!  tm_0_1_0
//! End
//! ```
//!
//! Every column appears in `Bounds`, in column order, so reading a file back
//! reproduces the column order. Coefficients use the shortest decimal form
//! that round-trips, which makes write-then-read bit-exact. A trailing
//! nameless term in the objective is the constant offset.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{MilpProblem, Sense};
use crate::error::{Error, Result};

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

fn push_term(out: &mut String, coef: f64, name: Option<&str>) {
    let sign = if coef.is_sign_negative() { '-' } else { '+' };
    let _ = write!(out, " {sign} {}", coef.abs());
    if let Some(name) = name {
        let _ = write!(out, " {name}");
    }
}

pub fn write_lp(problem: &MilpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {} columns, {} rows", problem.num_cols(), problem.num_rows());
    out.push_str("Maximize\n obj:");
    for (j, &c) in problem.objective.iter().enumerate() {
        if c != 0.0 {
            push_term(&mut out, c, Some(&problem.col_names[j]));
        }
    }
    if problem.objective_offset != 0.0 {
        push_term(&mut out, problem.objective_offset, None);
    }
    out.push_str("\nSubject To\n");
    let mut start = 0;
    for r in 0..problem.num_rows() {
        let _ = write!(out, " {}:", problem.row_names[r]);
        let mut end = start;
        while end < problem.triplets.len() && problem.triplets[end].0 == r {
            end += 1;
        }
        if start == end {
            out.push_str(" 0");
        }
        for &(_, c, v) in &problem.triplets[start..end] {
            push_term(&mut out, v, Some(&problem.col_names[c]));
        }
        start = end;
        let op = match problem.senses[r] {
            Sense::Eq => "=",
            Sense::Le => "<=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {}", problem.rhs[r]);
    }
    out.push_str("Bounds\n");
    for j in 0..problem.num_cols() {
        let _ = writeln!(
            out,
            " {} <= {} <= {}",
            fmt_bound(problem.col_lower[j]),
            problem.col_names[j],
            fmt_bound(problem.col_upper[j])
        );
    }
    if problem.integer.iter().any(|&b| b) {
        out.push_str("Generals\n");
        for j in (0..problem.num_cols()).filter(|&j| problem.integer[j]) {
            let _ = writeln!(out, " {}", problem.col_names[j]);
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    Generals,
    End,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok {
        "+inf" | "inf" | "+infinity" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => tok.parse().map_err(|_| parse_err(line, format!("expected a number, got `{tok}`"))),
    }
}

/// `[+|-] coef [name]` terms; a term without a name is a constant.
fn parse_terms(tokens: &[&str], line: usize) -> Result<(Vec<(String, f64)>, f64)> {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut k = 0;
    while k < tokens.len() {
        let mut sign = 1.0;
        if tokens[k] == "+" || tokens[k] == "-" {
            sign = if tokens[k] == "-" { -1.0 } else { 1.0 };
            k += 1;
        }
        let coef = sign * parse_num(tokens.get(k).ok_or_else(|| parse_err(line, "dangling sign"))?, line)?;
        k += 1;
        match tokens.get(k) {
            Some(&name) if name != "+" && name != "-" => {
                terms.push((name.to_string(), coef));
                k += 1;
            }
            _ => constant += coef,
        }
    }
    Ok((terms, constant))
}

/// Reads files produced by [`write_lp`].
pub fn read_lp(text: &str) -> Result<MilpProblem> {
    let mut section = Section::Preamble;
    let mut objective_terms = Vec::new();
    let mut offset = 0.0;
    let mut rows: Vec<(String, Vec<(String, f64)>, Sense, f64)> = Vec::new();
    let mut columns: Vec<(String, f64, f64)> = Vec::new();
    let mut generals = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('\\') {
            continue;
        }
        let next = match body.to_ascii_lowercase().as_str() {
            "maximize" | "maximise" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Constraints),
            "bounds" => Some(Section::Bounds),
            "generals" | "general" => Some(Section::Generals),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(next) = next {
            section = next;
            continue;
        }
        let (label, rest) = match body.split_once(':') {
            Some((l, r)) => (Some(l.trim()), r),
            None => (None, body),
        };
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        match section {
            Section::Objective => {
                let (terms, c) = parse_terms(&tokens, line)?;
                objective_terms.extend(terms);
                offset += c;
            }
            Section::Constraints => {
                let label = label.ok_or_else(|| parse_err(line, "constraint without a name"))?;
                let pos = tokens
                    .iter()
                    .position(|t| matches!(*t, "=" | "<=" | ">="))
                    .ok_or_else(|| parse_err(line, "constraint without a sense"))?;
                let sense = match tokens[pos] {
                    "=" => Sense::Eq,
                    "<=" => Sense::Le,
                    _ => Sense::Ge,
                };
                let rhs = parse_num(tokens.get(pos + 1).ok_or_else(|| parse_err(line, "missing rhs"))?, line)?;
                let (terms, c) = parse_terms(&tokens[..pos], line)?;
                if c != 0.0 {
                    return Err(parse_err(line, "constants on the left-hand side are not supported"));
                }
                rows.push((label.to_string(), terms, sense, rhs));
            }
            Section::Bounds => {
                if tokens.len() != 5 || tokens[1] != "<=" || tokens[3] != "<=" {
                    return Err(parse_err(line, "bounds must read `lo <= name <= hi`"));
                }
                columns.push((tokens[2].to_string(), parse_num(tokens[0], line)?, parse_num(tokens[4], line)?));
            }
            Section::Generals => generals.extend(tokens.iter().map(|s| s.to_string())),
            Section::Preamble | Section::End => {
                return Err(parse_err(line, format!("unexpected content `{body}`")));
            }
        }
    }

    let mut p = MilpProblem::new();
    let mut index = HashMap::new();
    for (name, lo, hi) in columns {
        if index.insert(name.clone(), p.num_cols()).is_some() {
            return Err(parse_err(0, format!("column `{name}` declared twice")));
        }
        p.add_col(name, lo, hi, 0.0, false);
    }
    let lookup = |name: &str| index.get(name).copied().ok_or_else(|| parse_err(0, format!("undeclared column `{name}`")));
    for (name, coef) in objective_terms {
        p.objective[lookup(&name)?] += coef;
    }
    p.objective_offset = offset;
    for name in generals {
        p.integer[lookup(&name)?] = true;
    }
    for (name, terms, sense, rhs) in rows {
        let terms = terms.iter().map(|(n, v)| Ok((lookup(n)?, *v))).collect::<Result<Vec<_>>>()?;
        p.add_row(name, terms, sense, rhs);
    }
    p.validate()?;
    Ok(p)
}
