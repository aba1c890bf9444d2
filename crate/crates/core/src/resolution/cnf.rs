use std::fmt::Write as _;
use std::io::{self, Write};

use super::{Clause, Literal};
use crate::cube::{expand, Vertex};
use crate::error::{parse_err, Error, Result};

pub const CNF_DIM_LIMIT: usize = 8;

/// The formula stating that an `n`-cube outmap has neither a sink nor a
/// clash. Non-sink clauses come first (one per vertex, in vertex order),
/// then non-clash clauses by pair `u < v` and clash pattern `o`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
    non_sink: usize,
}

impl CnfFormula {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_variables(&self) -> usize {
        self.n << self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn non_sink(&self) -> &[Clause] {
        &self.clauses[..self.non_sink]
    }

    pub fn non_clash(&self) -> &[Clause] {
        &self.clauses[self.non_sink..]
    }
}

/// Non-clash clause for `u`, `v` and the pattern `o` (a submask of `u ^ v`
/// marking the dimensions in which both outmaps would be 1).
pub(crate) fn non_clash_clause(n: usize, u: Vertex, v: Vertex, o: u32) -> Clause {
    let mut c = Clause::empty();
    let diff = u ^ v;
    for i in 1..=n {
        if diff >> (i - 1) & 1 == 1 {
            let pos = o >> (i - 1) & 1 == 0;
            c.insert(Literal::of(n, u, i, pos));
            c.insert(Literal::of(n, v, i, pos));
        }
    }
    c
}

pub fn cnf_generate(n: usize) -> Result<CnfFormula> {
    if n > CNF_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            n,
            limit: CNF_DIM_LIMIT,
        });
    }
    let size = 1u32 << n;
    let mut clauses: Vec<Clause> = (0..size)
        .map(|u| Clause::new((1..=n).map(|i| Literal::of(n, u, i, true))).expect("non-sink"))
        .collect();
    let non_sink = clauses.len();
    for u in 0..size {
        for v in u + 1..size {
            let diff = u ^ v;
            clauses.extend(
                (0..1u32 << diff.count_ones()).map(|k| non_clash_clause(n, u, v, expand(k, diff))),
            );
        }
    }
    Ok(CnfFormula {
        n,
        clauses,
        non_sink,
    })
}

pub fn write_dimacs<W: Write>(f: &CnfFormula, mut w: W) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", f.num_variables(), f.clauses.len());
    for c in &f.clauses {
        for l in c.literals() {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    w.write_all(out.as_bytes())?;
    w.flush()
}

/// A parsed DIMACS file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dimacs {
    pub num_variables: usize,
    pub clauses: Vec<Clause>,
}

pub fn parse_dimacs(text: &str) -> Result<Dimacs> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut cur: Vec<Literal> = Vec::new();
    let mut last = 0;
    for (idx, l) in text.lines().enumerate() {
        let line = idx + 1;
        last = line;
        let t = l.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('p') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if header.is_some() || toks.len() != 3 || toks[0] != "cnf" {
                return Err(parse_err(line, "bad header"));
            }
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(line, "bad header"))
            };
            header = Some((num(toks[1])?, num(toks[2])?));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(parse_err(line, "clause before header"));
        };
        for tok in t.split_whitespace() {
            let x: i32 = tok
                .parse()
                .map_err(|_| parse_err(line, format!("bad literal `{tok}`")))?;
            if x == 0 {
                let c = Clause::new(cur.drain(..))
                    .ok_or_else(|| parse_err(line, "tautological clause"))?;
                clauses.push(c);
                continue;
            }
            let lit = Literal::from_dimacs(x).ok_or_else(|| parse_err(line, "bad literal"))?;
            if lit.var() as usize > vars {
                return Err(parse_err(
                    line,
                    format!("variable {} out of range", lit.var()),
                ));
            }
            cur.push(lit);
        }
    }
    let (num_variables, count) = header.ok_or_else(|| parse_err(last, "missing header"))?;
    if !cur.is_empty() {
        return Err(parse_err(last, "unterminated clause"));
    }
    if clauses.len() != count {
        return Err(parse_err(
            last,
            format!("header announces {count} clauses, found {}", clauses.len()),
        ));
    }
    Ok(Dimacs {
        num_variables,
        clauses,
    })
}
