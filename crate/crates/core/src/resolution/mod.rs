//! The Sink-or-Clash CNF family, a recursive resolution refutation of it, and
//! an independent checker.
//!
//! Variable `x_{u,i}` (outmap bit `i` of vertex `u`) has DIMACS index
//! `u * n + i`, so indices are 1-based and dimension-major within a vertex.

mod check;
mod cnf;
mod proof;

use std::cmp::Ordering;
use std::fmt;

use crate::cube::Vertex;

pub use check::{check_proof, ProofFault};
pub use cnf::{cnf_generate, parse_dimacs, write_dimacs, CnfFormula, Dimacs, CNF_DIM_LIMIT};
pub use proof::{parse_proof, proof_generate, write_proof, ResolutionProof, Step, PROOF_DIM_LIMIT};

/// A literal in DIMACS encoding: `+var` or `-var`, `var >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal(i32);

impl Literal {
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(
            var >= 1 && var <= i32::MAX as u32,
            "variable index out of range"
        );
        Literal(if positive { var as i32 } else { -(var as i32) })
    }

    /// `x_{u,i}` or its negation in an `n`-cube; `i` is 1-based.
    pub fn of(n: usize, u: Vertex, i: usize, positive: bool) -> Self {
        debug_assert!((1..=n).contains(&i));
        Literal::new(u * n as u32 + i as u32, positive)
    }

    pub fn from_dimacs(x: i32) -> Option<Self> {
        (x != 0 && x != i32::MIN).then_some(Literal(x))
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negate(self) -> Self {
        Literal(-self.0)
    }

    /// The `(vertex, dimension)` pair of this literal's variable.
    pub fn vertex_dim(self, n: usize) -> (Vertex, usize) {
        let v = self.var() - 1;
        (v / n as u32, (v % n as u32) as usize + 1)
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.var(), self.is_positive()).cmp(&(other.var(), other.is_positive()))
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of literals, kept sorted by variable. Never holds both polarities of
/// one variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    /// Builds the set of `lits`; `None` if it is a tautology.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut c = Clause::empty();
        for l in lits {
            if !c.insert(l) {
                return None;
            }
        }
        Some(c)
    }

    /// Adds `l`; idempotent. Returns false, leaving the clause unchanged, if
    /// the complement of `l` is present.
    pub fn insert(&mut self, l: Literal) -> bool {
        match self.0.binary_search_by_key(&l.var(), |x| x.var()) {
            Ok(k) => self.0[k] == l,
            Err(k) => {
                self.0.insert(k, l);
                true
            }
        }
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.0
            .binary_search_by_key(&l.var(), |x| x.var())
            .is_ok_and(|k| self.0[k] == l)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Clause {
    /// Space-separated DIMACS literals, without the trailing `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}
