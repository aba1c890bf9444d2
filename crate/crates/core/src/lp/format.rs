//! LP text files and external solution vectors.
//!
//! Files use a subset of the CPLEX LP format:
//!
//! ```text
//! Minimize
//!  obj: v
//! Subject To
//!  o0: 2 x_a + x_b - v <= 0
//!  h0: x_a + x_b = 1
//! Bounds
//!  x_a >= 0
//!  x_b >= 0
//!  v >= 0
//! End
//! ```
//!
//! Inequality rows come before equality rows. Long rows wrap onto
//! continuation lines indented by three spaces. The `Bounds` section lists
//! every variable exactly once, in model order; the parser takes the variable
//! order from it. Lines starting with `\` are comments.
//!
//! Solution files hold one `name value` pair per line, `#` comments allowed,
//! as written by common solvers (`.sol`).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use super::{LinearProgram, Row};
use crate::error::{parse_err, Error, Result};

const TERMS_PER_LINE: usize = 8;

fn write_row(out: &mut String, lp: &LinearProgram, row: &Row, op: &str) {
    let _ = write!(out, " {}:", row.name);
    for (k, &(j, c)) in row.terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if c < 0 { "-" } else { "+" };
        let name = &lp.variables[j as usize];
        match (k, c.unsigned_abs()) {
            (0, 1) if c > 0 => {
                let _ = write!(out, " {name}");
            }
            (0, a) if c > 0 => {
                let _ = write!(out, " {a} {name}");
            }
            (_, 1) => {
                let _ = write!(out, " {sign} {name}");
            }
            (_, a) => {
                let _ = write!(out, " {sign} {a} {name}");
            }
        }
    }
    let _ = writeln!(out, " {op} {}", row.rhs);
}

/// Writes `lp` in the documented text format.
pub fn write_lp<W: Write>(lp: &LinearProgram, mut w: W) -> io::Result<()> {
    let mut out = String::new();
    out.push_str("Minimize\n");
    let _ = writeln!(out, " obj: {}", lp.variables[lp.objective]);
    out.push_str("Subject To\n");
    w.write_all(out.as_bytes())?;
    for (rows, op) in [(&lp.inequalities, "<="), (&lp.equalities, "=")] {
        for chunk in rows.chunks(4096) {
            out.clear();
            for row in chunk {
                write_row(&mut out, lp, row, op);
            }
            w.write_all(out.as_bytes())?;
        }
    }
    out.clear();
    out.push_str("Bounds\n");
    for name in &lp.variables {
        let _ = writeln!(out, " {name} >= 0");
    }
    out.push_str("End\n");
    w.write_all(out.as_bytes())?;
    w.flush()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Objective,
    Constraints,
    Bounds,
    End,
}

struct RawRow {
    line: usize,
    name: String,
    terms: Vec<(String, i32)>,
    op: String,
    rhs: i64,
}

fn parse_int(tok: &str, line: usize) -> Result<i64> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected an integer, found `{tok}`")))
}

fn parse_constraint(line: usize, text: &str) -> Result<RawRow> {
    let (name, body) = text
        .split_once(':')
        .ok_or_else(|| parse_err(line, "constraint without a name"))?;
    let toks: Vec<&str> = body.split_whitespace().collect();
    let op_at = toks
        .iter()
        .position(|t| matches!(*t, "<=" | "=" | ">="))
        .ok_or_else(|| parse_err(line, "constraint without a relation"))?;
    if op_at + 2 != toks.len() {
        return Err(parse_err(line, "expected a single right-hand side"));
    }
    let rhs = parse_int(toks[op_at + 1], line)?;
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut coef: Option<i64> = None;
    let mut pending = false;
    for &t in &toks[..op_at] {
        match t {
            "+" | "-" => {
                if pending {
                    return Err(parse_err(line, "dangling sign"));
                }
                sign = if t == "-" { -1 } else { 1 };
                pending = true;
            }
            _ if t.starts_with(|c: char| c.is_ascii_digit()) => {
                if coef.is_some() {
                    return Err(parse_err(line, "two coefficients in a row"));
                }
                coef = Some(parse_int(t, line)?);
            }
            _ => {
                if !pending && !terms.is_empty() {
                    return Err(parse_err(line, "missing sign between terms"));
                }
                let c = i32::try_from(sign * coef.unwrap_or(1))
                    .map_err(|_| parse_err(line, "coefficient out of range"))?;
                terms.push((t.to_string(), c));
                sign = 1;
                coef = None;
                pending = false;
            }
        }
    }
    if pending || coef.is_some() {
        return Err(parse_err(line, "dangling coefficient"));
    }
    Ok(RawRow {
        line,
        name: name.trim().to_string(),
        terms,
        op: toks[op_at].to_string(),
        rhs,
    })
}

/// Parses a file produced by [`write_lp`].
pub fn parse_lp(text: &str) -> Result<LinearProgram> {
    let mut section = Section::Start;
    let mut objective: Option<(usize, String)> = None;
    let mut raw: Vec<RawRow> = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    let mut variables: Vec<String> = Vec::new();

    for (idx, l) in text.lines().enumerate() {
        let line = idx + 1;
        let t = l.trim();
        if t.is_empty() || t.starts_with('\\') {
            continue;
        }
        let next = match t.to_ascii_lowercase().as_str() {
            "minimize" if section == Section::Start => Some(Section::Objective),
            "subject to" if section == Section::Objective => Some(Section::Constraints),
            "bounds" if section == Section::Constraints => Some(Section::Bounds),
            "end" if section == Section::Bounds => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            if pending.is_some() {
                return Err(parse_err(line, "unterminated constraint"));
            }
            section = s;
            continue;
        }
        match section {
            Section::Start | Section::End => {
                return Err(parse_err(line, format!("unexpected `{t}`")));
            }
            Section::Objective => {
                let (name, var) = t
                    .split_once(':')
                    .ok_or_else(|| parse_err(line, "objective without a name"))?;
                let var = var.trim();
                if objective.is_some()
                    || name.trim().is_empty()
                    || var.contains(char::is_whitespace)
                {
                    return Err(parse_err(line, "objective must be a single variable"));
                }
                objective = Some((line, var.to_string()));
            }
            Section::Constraints => {
                let (start, mut buf) = pending.take().unwrap_or((line, String::new()));
                buf.push(' ');
                buf.push_str(t);
                if buf.contains('=') {
                    raw.push(parse_constraint(start, &buf)?);
                } else {
                    pending = Some((start, buf));
                }
            }
            Section::Bounds => {
                let toks: Vec<&str> = t.split_whitespace().collect();
                if toks.len() != 3 || toks[1] != ">=" || toks[2] != "0" {
                    return Err(parse_err(line, "expected `name >= 0`"));
                }
                variables.push(toks[0].to_string());
            }
        }
    }
    if section != Section::End {
        return Err(parse_err(text.lines().count(), "missing End"));
    }

    let index: HashMap<&str, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    if index.len() != variables.len() {
        return Err(Error::InvalidArgument(
            "duplicate variable in Bounds".into(),
        ));
    }
    let (oline, oname) = objective.ok_or_else(|| parse_err(1, "missing objective"))?;
    let objective = *index
        .get(oname.as_str())
        .ok_or_else(|| parse_err(oline, format!("unknown variable `{oname}`")))?;

    let mut lp = LinearProgram {
        variables: variables.clone(),
        objective,
        inequalities: Vec::new(),
        equalities: Vec::new(),
    };
    for r in raw {
        let mut terms = Vec::with_capacity(r.terms.len());
        for (name, c) in r.terms {
            let j = *index
                .get(name.as_str())
                .ok_or_else(|| parse_err(r.line, format!("unknown variable `{name}`")))?;
            terms.push((j as u32, c));
        }
        let row = Row {
            name: r.name,
            terms,
            rhs: r.rhs,
        };
        match r.op.as_str() {
            "<=" => {
                if !lp.equalities.is_empty() {
                    return Err(parse_err(r.line, "inequality after equalities"));
                }
                lp.inequalities.push(row);
            }
            "=" => lp.equalities.push(row),
            _ => return Err(parse_err(r.line, "`>=` rows are not supported")),
        }
    }
    Ok(lp)
}

/// Parses `name value` lines.
pub fn parse_solution(text: &str) -> Result<HashMap<String, f64>> {
    let mut out = HashMap::new();
    for (idx, l) in text.lines().enumerate() {
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace();
        let (Some(name), Some(value), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(idx + 1, "expected `name value`"));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| parse_err(idx + 1, format!("bad number `{value}`")))?;
        if !value.is_finite() {
            return Err(parse_err(idx + 1, "non-finite value"));
        }
        if out.insert(name.to_string(), value).is_some() {
            return Err(parse_err(idx + 1, format!("`{name}` given twice")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionReport {
    /// Value of the objective variable.
    pub objective: f64,
    /// Largest violation over rows and nonnegativity bounds.
    pub max_violation: f64,
    /// Variables absent from the solution, read as zero.
    pub missing: usize,
    pub feasible: bool,
}

/// Evaluates a floating-point solution vector against `lp`. Variables not
/// mentioned count as zero; names unknown to the model are an error.
pub fn check_solution(
    lp: &LinearProgram,
    values: &HashMap<String, f64>,
    tolerance: f64,
) -> Result<SolutionReport> {
    let index: HashMap<&str, usize> = lp
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let mut x = vec![0.0f64; lp.num_variables()];
    for (name, &v) in values {
        let j = *index
            .get(name.as_str())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variable `{name}`")))?;
        x[j] = v;
    }
    let missing = lp.num_variables() - values.len();
    let mut worst = x.iter().map(|&v| -v).fold(0.0f64, f64::max);
    for row in &lp.inequalities {
        let lhs: f64 = row
            .terms
            .iter()
            .map(|&(j, c)| c as f64 * x[j as usize])
            .sum();
        worst = worst.max(lhs - row.rhs as f64);
    }
    for row in &lp.equalities {
        let lhs: f64 = row
            .terms
            .iter()
            .map(|&(j, c)| c as f64 * x[j as usize])
            .sum();
        worst = worst.max((lhs - row.rhs as f64).abs());
    }
    Ok(SolutionReport {
        objective: x[lp.objective],
        max_violation: worst,
        missing,
        feasible: worst <= tolerance,
    })
}
