//! Query-counted oracles and Sink-or-Clash algorithms.

use crate::cube::{
    clashes, compress, expand, full_mask, OutmapTable, OutmapValue, PartialOutmapTable, Vertex,
};

/// A clash uncovered while evaluating a virtual vertex, in the coordinates of
/// the underlying table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoundClash(pub Vertex, pub Vertex);

/// Something that answers outmap queries on an `n`-cube.
pub trait Oracle {
    fn dim(&self) -> usize;

    /// Evaluates the outmap at `v`. Virtual oracles may instead report a clash
    /// found in the table they are built on.
    fn query(&mut self, v: Vertex) -> Result<OutmapValue, FoundClash>;
}

/// An oracle over a table that charges one unit per evaluation, repeats included.
#[derive(Clone, Debug)]
pub struct QueryOracle<'a> {
    backing: &'a OutmapTable,
    log: Vec<(Vertex, OutmapValue)>,
}

impl<'a> QueryOracle<'a> {
    pub fn new(backing: &'a OutmapTable) -> Self {
        Self {
            backing,
            log: Vec::new(),
        }
    }

    pub fn count(&self) -> usize {
        self.log.len()
    }

    pub fn log(&self) -> &[(Vertex, OutmapValue)] {
        &self.log
    }

    pub fn backing(&self) -> &OutmapTable {
        self.backing
    }

    pub fn evaluate(&mut self, v: Vertex) -> OutmapValue {
        let x = self.backing.get(v);
        self.log.push((v, x));
        x
    }
}

impl Oracle for QueryOracle<'_> {
    fn dim(&self) -> usize {
        self.backing.dim()
    }

    fn query(&mut self, v: Vertex) -> Result<OutmapValue, FoundClash> {
        Ok(self.evaluate(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    Sink(Vertex),
    Clash(Vertex, Vertex),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub queries: usize,
}

/// True iff the verdict names a genuine sink or a genuine clash of `s`.
pub fn verify_verdict(s: &OutmapTable, v: &Verdict) -> bool {
    let size = s.num_vertices() as u32;
    match v.kind {
        VerdictKind::Sink(u) => u < size && s.get(u) == 0,
        VerdictKind::Clash(a, b) => {
            a != b && a < size && b < size && clashes(a, s.get(a), b, s.get(b))
        }
    }
}

/// Solution found inside a face, with the value of a sink carried along so
/// that callers never evaluate it twice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Local {
    Sink(Vertex, OutmapValue),
    Clash(Vertex, Vertex),
}

/// Face solver: dims of the face, then any vertex of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Seesaw,
    /// Product algorithm splitting off the `k` highest dimensions of each face
    /// as the outer cube and solving both levels with `sub`.
    Product {
        k: usize,
        sub: Box<Algorithm>,
    },
}

impl Algorithm {
    pub fn product(k: usize, sub: Algorithm) -> Self {
        Algorithm::Product {
            k,
            sub: Box::new(sub),
        }
    }
}

fn solve_face(
    alg: &Algorithm,
    o: &mut dyn Oracle,
    dims: u32,
    z: Vertex,
) -> Result<Local, FoundClash> {
    match alg {
        Algorithm::Seesaw => seesaw_face(o, dims, z),
        Algorithm::Product { k, sub } => {
            if *k == 0 || *k >= dims.count_ones() as usize {
                return solve_face(sub, o, dims, z);
            }
            product_face(o, dims, z, *k, sub)
        }
    }
}

fn seesaw_face(o: &mut dyn Oracle, dims: u32, z: Vertex) -> Result<Local, FoundClash> {
    if dims == 0 {
        let sz = o.query(z)?;
        return Ok(Local::Sink(z, sz));
    }
    let mut u = z;
    let mut v = z ^ dims;
    let mut su = o.query(u)?;
    let mut sv = o.query(v)?;
    let mut done = 0u32;
    for _ in 0..dims.count_ones().saturating_sub(1) {
        // lowest dimension of J \ I in which u and v differ and disagree
        let diff = (u ^ v) & (su ^ sv) & dims & !done;
        if diff == 0 {
            return Ok(Local::Clash(u, v));
        }
        let j = diff & diff.wrapping_neg();
        if su & j != 0 {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut su, &mut sv);
        }
        match seesaw_face(o, done, v ^ j)? {
            Local::Clash(a, b) => return Ok(Local::Clash(a, b)),
            Local::Sink(w, sw) => {
                if sw & j != 0 {
                    return Ok(Local::Clash(v, w));
                }
                v = w;
                sv = sw;
            }
        }
        done |= j;
    }
    let j = dims & !done;
    if su & j == 0 {
        Ok(Local::Sink(u, su))
    } else if sv & j == 0 {
        Ok(Local::Sink(v, sv))
    } else {
        Ok(Local::Clash(u, v))
    }
}

/// The orientation inherited on the outer dimensions, evaluated lazily by
/// solving the inner face through each requested outer vertex.
struct OuterOracle<'a> {
    inner: &'a mut dyn Oracle,
    sub: &'a Algorithm,
    k: usize,
    anchor: Vertex,
    outer_dims: u32,
    inner_dims: u32,
    sinks: Vec<Option<(Vertex, OutmapValue)>>,
}

impl Oracle for OuterOracle<'_> {
    fn dim(&self) -> usize {
        self.k
    }

    fn query(&mut self, x: Vertex) -> Result<OutmapValue, FoundClash> {
        let base = self.anchor | expand(x, self.outer_dims);
        match solve_face(self.sub, self.inner, self.inner_dims, base)? {
            Local::Sink(w, sw) => {
                self.sinks[x as usize] = Some((w, sw));
                Ok(compress(sw, self.outer_dims))
            }
            Local::Clash(a, b) => Err(FoundClash(a, b)),
        }
    }
}

fn product_face(
    o: &mut dyn Oracle,
    dims: u32,
    z: Vertex,
    k: usize,
    sub: &Algorithm,
) -> Result<Local, FoundClash> {
    // outer = the k highest dimensions of the face
    let mut outer_dims = 0u32;
    let mut rest = dims;
    for _ in 0..k {
        let top = 1u32 << (31 - rest.leading_zeros());
        outer_dims |= top;
        rest &= !top;
    }
    let mut outer = OuterOracle {
        inner: o,
        sub,
        k,
        anchor: z & !dims,
        outer_dims,
        inner_dims: rest,
        sinks: vec![None; 1 << k],
    };
    match solve_face(sub, &mut outer, full_mask(k), 0) {
        Err(found) => Err(found),
        Ok(Local::Sink(x, _)) => {
            // an outer sink is an inner-face sink with no outgoing outer edge
            let (w, sw) = outer.sinks[x as usize].expect("queried outer vertex");
            Ok(Local::Sink(w, sw))
        }
        Ok(Local::Clash(x, y)) => {
            let (a, _) = outer.sinks[x as usize].expect("queried outer vertex");
            let (b, _) = outer.sinks[y as usize].expect("queried outer vertex");
            Ok(Local::Clash(a, b))
        }
    }
}

fn run(alg: &Algorithm, oracle: &mut QueryOracle<'_>) -> Verdict {
    let n = oracle.dim();
    let kind = match solve_face(alg, oracle, full_mask(n), 0) {
        Ok(Local::Sink(v, _)) => VerdictKind::Sink(v),
        Ok(Local::Clash(a, b)) | Err(FoundClash(a, b)) => VerdictKind::Clash(a.min(b), a.max(b)),
    };
    Verdict {
        kind,
        queries: oracle.count(),
    }
}

/// The adapted Fibonacci seesaw, started from `0^n`.
pub fn seesaw_solve(oracle: &mut QueryOracle<'_>) -> Verdict {
    run(&Algorithm::Seesaw, oracle)
}

/// The product algorithm with the `k` highest dimensions as outer cube.
pub fn product_solve(oracle: &mut QueryOracle<'_>, k: usize, sub: &Algorithm) -> Verdict {
    run(&Algorithm::product(k, sub.clone()), oracle)
}

pub fn solve(alg: &Algorithm, oracle: &mut QueryOracle<'_>) -> Verdict {
    run(alg, oracle)
}

/// Worst-case query count of the seesaw: `T(0) = 1`, `T(1) = 2`,
/// `T(n) = 2 + sum_{k < n-1} T(k)`.
pub fn seesaw_bound(n: usize) -> usize {
    let mut t = vec![1usize, 2];
    while t.len() <= n {
        let m = t.len();
        t.push(2 + t[..m - 1].iter().sum::<usize>());
    }
    t[n]
}

/// Per-vertex constraints `(vertex, fixed bits, their values)` read off the
/// failed seven-step run with `p, q, r, s` = dimensions 1..4 and start `0000`.
const SEVEN_STEPS_TRACE: [(Vertex, u32, u32); 7] = [
    (0b0000, 0b0001, 0b0001), // u1: s_p = 1
    (0b1111, 0b1111, 0b1110), // u2: only p incoming
    (0b0001, 0b1111, 0b1100), // u3 = u1 ^ e_p: p, q incoming, nothing else
    (0b1101, 0b0111, 0b0001), // u4 = u2 ^ e_q: q, r incoming, p outgoing
    (0b0100, 0b1000, 0b1000), // u5 = w ^ e_s with w = u4 ^ e_p: s outgoing
    (0b1000, 0b1111, 0b0010), // u6 = w ^ e_r: only q outgoing
    (0b1010, 0b1111, 0b0101), // u7 = u6 ^ e_q
];

/// Backtracking over the free bits of the seven-step trace, in vertex order
/// and ascending value, for an assignment without sinks or clashes.
pub fn search_seven_steps_witness() -> Option<PartialOutmapTable> {
    fn go(i: usize, chosen: &mut Vec<(Vertex, OutmapValue)>) -> bool {
        if i == SEVEN_STEPS_TRACE.len() {
            return true;
        }
        let (v, mask, fixed) = SEVEN_STEPS_TRACE[i];
        for x in 0..16u32 {
            if x & mask != fixed || x == 0 {
                continue;
            }
            if chosen.iter().any(|&(u, su)| clashes(u, su, v, x)) {
                continue;
            }
            chosen.push((v, x));
            if go(i + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    go(0, &mut chosen).then(|| PartialOutmapTable::from_pairs(4, &chosen).expect("valid pairs"))
}

/// Cached result of [`search_seven_steps_witness`].
const SEVEN_STEPS_FIXTURE: [(Vertex, OutmapValue); 7] = [
    (0b0000, 0b1001),
    (0b1111, 0b1110),
    (0b0001, 0b1100),
    (0b1101, 0b0001),
    (0b0100, 0b1101),
    (0b1000, 0b0010),
    (0b1010, 0b0101),
];

/// A 4-dimensional partial outmap with 7 known vertices, no sink and no clash,
/// on which the seven-step promise algorithm stops without an answer.
pub fn seven_steps_witness() -> PartialOutmapTable {
    PartialOutmapTable::from_pairs(4, &SEVEN_STEPS_FIXTURE).expect("valid fixture")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, v: &[u32]) -> OutmapTable {
        OutmapTable::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn verify_examples() {
        let s = table(1, &[1, 0]);
        let sink = |v| Verdict {
            kind: VerdictKind::Sink(v),
            queries: 0,
        };
        assert!(verify_verdict(&s, &sink(1)));
        let c = table(1, &[1, 1]);
        assert!(verify_verdict(
            &c,
            &Verdict {
                kind: VerdictKind::Clash(0, 1),
                queries: 0
            }
        ));
        assert!(!verify_verdict(&OutmapTable::uniform(2).unwrap(), &sink(1)));
        assert!(!verify_verdict(
            &c,
            &Verdict {
                kind: VerdictKind::Clash(1, 1),
                queries: 0
            }
        ));
    }

    #[test]
    fn seesaw_two_sources() {
        let s = table(1, &[1, 1]);
        let mut o = QueryOracle::new(&s);
        let v = seesaw_solve(&mut o);
        assert_eq!(v.kind, VerdictKind::Clash(0, 1));
        assert_eq!(v.queries, 2);
    }

    #[test]
    fn bounds() {
        let t: Vec<_> = (0..7).map(seesaw_bound).collect();
        assert_eq!(t, vec![1, 2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn product_uniform() {
        let s = OutmapTable::uniform(3).unwrap();
        let mut o = QueryOracle::new(&s);
        let v = product_solve(&mut o, 1, &Algorithm::Seesaw);
        assert_eq!(v.kind, VerdictKind::Sink(0));
    }

    #[test]
    fn oracle_counts_repeats() {
        let s = OutmapTable::uniform(2).unwrap();
        let mut o = QueryOracle::new(&s);
        o.evaluate(1);
        o.evaluate(1);
        assert_eq!(o.count(), 2);
        assert_eq!(o.log(), &[(1, 1), (1, 1)]);
    }

    #[test]
    fn seven_steps_fixture_is_search_result() {
        assert_eq!(search_seven_steps_witness(), Some(seven_steps_witness()));
    }
}
