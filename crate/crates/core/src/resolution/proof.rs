use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use super::cnf::{cnf_generate, non_clash_clause};
use super::{Clause, Literal};
use crate::cube::Vertex;
use crate::error::{parse_err, Error, Result};

/// Size grows like 2^(n^2 / 2); n = 6 already has about 6 * 10^5 steps.
pub const PROOF_DIM_LIMIT: usize = 6;

/// One resolution step. Clause ids below the number of inputs name input
/// clauses; step `k` produces clause id `inputs.len() + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub left: usize,
    pub right: usize,
    pub pivot: u32,
    pub resolvent: Clause,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionProof {
    pub inputs: Vec<Clause>,
    pub steps: Vec<Step>,
}

impl ResolutionProof {
    pub fn clause(&self, id: usize) -> Option<&Clause> {
        match id.checked_sub(self.inputs.len()) {
            None => self.inputs.get(id),
            Some(k) => self.steps.get(k).map(|s| &s.resolvent),
        }
    }

    /// Number of resolution steps.
    pub fn size(&self) -> usize {
        self.steps.len()
    }

    /// Largest clause among resolvents and the inputs actually used.
    pub fn width(&self) -> usize {
        let m = self.inputs.len();
        let used_inputs = self
            .steps
            .iter()
            .flat_map(|s| [s.left, s.right])
            .filter(|&id| id < m)
            .map(|id| self.inputs[id].len());
        let derived = self.steps.iter().map(|s| s.resolvent.len());
        used_inputs.chain(derived).max().unwrap_or(0)
    }

    pub fn conclusion(&self) -> Option<&Clause> {
        self.steps.last().map(|s| &s.resolvent)
    }
}

struct Builder<'a> {
    n: usize,
    index: HashMap<&'a Clause, usize>,
    proof: ResolutionProof,
}

impl Builder<'_> {
    fn resolve(&mut self, left: usize, right: usize, pivot: u32) -> usize {
        let pos = Literal::new(pivot, true);
        let l = self.proof.clause(left).expect("left operand");
        let r = self.proof.clause(right).expect("right operand");
        debug_assert!(l.contains(pos) && r.contains(pos.negate()));
        let mut out = Clause::empty();
        for &x in l.literals().iter().chain(r.literals()) {
            if x.var() != pivot {
                let ok = out.insert(x);
                debug_assert!(ok, "tautological resolvent");
            }
        }
        self.proof.steps.push(Step {
            left,
            right,
            pivot,
            resolvent: out,
        });
        self.proof.inputs.len() + self.proof.steps.len() - 1
    }

    fn var(&self, u: Vertex, i: usize) -> u32 {
        Literal::of(self.n, u, i, true).var()
    }

    /// Refutes the `k`-dimensional subcube at `base` (spanned by dimensions
    /// `1..=k`), where `ns[w]` is the clause standing in for the non-sink
    /// clause of vertex `base | w` and may carry extra literals. Returns the
    /// id of the final clause: the union of the extra literals used.
    fn refute(&mut self, k: usize, base: Vertex, ns: &[usize]) -> usize {
        if k == 1 {
            let (a, b) = (base, base | 1);
            let nc = self.index[&non_clash_clause(self.n, a, b, 1)];
            let s = self.resolve(ns[0], nc, self.var(a, 1));
            return self.resolve(ns[1], s, self.var(b, 1));
        }
        let half = 1usize << (k - 1);
        let mut upper = Vec::with_capacity(half);
        for w in half..2 * half {
            let mut lower = Vec::with_capacity(half);
            for v in 0..half {
                let (u_lo, u_hi) = (base | v as Vertex, base | w as Vertex);
                let o = 1 << (k - 1);
                let nc = self.index[&non_clash_clause(self.n, u_lo, u_hi, o)];
                let s = self.resolve(ns[w], nc, self.var(u_hi, k));
                lower.push(self.resolve(ns[v], s, self.var(u_lo, k)));
            }
            upper.push(self.refute(k - 1, base, &lower));
        }
        self.refute(k - 1, base | half as Vertex, &upper)
    }
}

/// The recursive refutation of the `n`-dimensional formula: split along the
/// top dimension, derive the upper non-sink clauses from the lower facet,
/// then refute the upper facet. Inputs are the formula's clauses in order.
pub fn proof_generate(n: usize) -> Result<ResolutionProof> {
    if n == 0 || n > PROOF_DIM_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "proofs are generated for 1 <= n <= {PROOF_DIM_LIMIT}, got {n}"
        )));
    }
    let f = cnf_generate(n)?;
    let mut b = Builder {
        n,
        index: f
            .clauses()
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect(),
        proof: ResolutionProof {
            inputs: f.clauses().to_vec(),
            steps: Vec::new(),
        },
    };
    let ns: Vec<usize> = (0..1usize << n).collect();
    b.refute(n, 0, &ns);
    Ok(b.proof)
}

/// `c ID: lits` for inputs, then `r ID <- L R on VAR : lits` for steps.
pub fn write_proof<W: Write>(p: &ResolutionProof, mut w: W) -> io::Result<()> {
    let mut out = String::new();
    for (id, c) in p.inputs.iter().enumerate() {
        let _ = writeln!(out, "c {id}: {c}");
    }
    let m = p.inputs.len();
    for (k, s) in p.steps.iter().enumerate() {
        let _ = write!(
            out,
            "r {} <- {} {} on {} :",
            m + k,
            s.left,
            s.right,
            s.pivot
        );
        if !s.resolvent.is_empty() {
            let _ = write!(out, " {}", s.resolvent);
        }
        out.push('\n');
        if out.len() > 1 << 16 {
            w.write_all(out.as_bytes())?;
            out.clear();
        }
    }
    w.write_all(out.as_bytes())?;
    w.flush()
}

fn parse_lits(line: usize, text: &str) -> Result<Clause> {
    let mut lits = Vec::new();
    for tok in text.split_whitespace() {
        let x: i32 = tok
            .parse()
            .map_err(|_| parse_err(line, format!("bad literal `{tok}`")))?;
        lits.push(Literal::from_dimacs(x).ok_or_else(|| parse_err(line, "bad literal"))?);
    }
    Clause::new(lits).ok_or_else(|| parse_err(line, "tautological clause"))
}

/// Parses the text written by [`write_proof`]. Ids must be consecutive from
/// 0; the parser checks syntax only.
pub fn parse_proof(text: &str) -> Result<ResolutionProof> {
    let mut p = ResolutionProof {
        inputs: Vec::new(),
        steps: Vec::new(),
    };
    for (idx, l) in text.lines().enumerate() {
        let line = idx + 1;
        let t = l.trim();
        if t.is_empty() {
            continue;
        }
        let expected = p.inputs.len() + p.steps.len();
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| parse_err(line, format!("bad number `{s}`")))
        };
        if let Some(rest) = t.strip_prefix("c ") {
            let (id, lits) = rest
                .split_once(':')
                .ok_or_else(|| parse_err(line, "missing `:`"))?;
            if !p.steps.is_empty() || num(id.trim())? != expected {
                return Err(parse_err(line, "input out of order"));
            }
            p.inputs.push(parse_lits(line, lits)?);
        } else if let Some(rest) = t.strip_prefix("r ") {
            let (head, lits) = rest
                .split_once(':')
                .ok_or_else(|| parse_err(line, "missing `:`"))?;
            let toks: Vec<&str> = head.split_whitespace().collect();
            let [id, "<-", left, right, "on", pivot] = toks[..] else {
                return Err(parse_err(line, "expected `r ID <- L R on VAR : lits`"));
            };
            if num(id)? != expected {
                return Err(parse_err(line, "step out of order"));
            }
            let pivot = u32::try_from(num(pivot)?)
                .ok()
                .filter(|&v| v >= 1 && v <= i32::MAX as u32)
                .ok_or_else(|| parse_err(line, "bad pivot"))?;
            p.steps.push(Step {
                left: num(left)?,
                right: num(right)?,
                pivot,
                resolvent: parse_lits(line, lits)?,
            });
        } else {
            return Err(parse_err(line, format!("unexpected `{t}`")));
        }
    }
    Ok(p)
}
