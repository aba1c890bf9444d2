use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{LinearProgram, Row};
use crate::cube::{clashes, full_mask, OutmapTable, OutmapValue, Vertex};
use crate::error::{Error, Result};
use crate::symmetry::cube_group;

/// Largest dimension for which LPs are generated.
pub const LP_DIM_LIMIT: usize = 3;

/// Largest dimension for the unreduced model.
const FULL_DIM_LIMIT: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpMode {
    /// One variable per sequence, one row per adversary outmap.
    Full,
    /// Variables, histories and adversary outmaps merged into orbits under the
    /// cube group. Positions in which some unqueried vertex has no legal answer
    /// are only continued by querying such a vertex, since that wins at once.
    Symmetric,
}

/// Answers recorded so far, with no sink and no clash.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct History {
    n: usize,
    pairs: Vec<(Vertex, OutmapValue)>,
}

impl History {
    pub fn new(n: usize, pairs: Vec<(Vertex, OutmapValue)>) -> Result<Self> {
        let mask = full_mask(n);
        if pairs.len() >= 1 << n {
            return Err(Error::InvalidArgument(format!(
                "a history of dimension {n} has fewer than {} entries",
                1u32 << n
            )));
        }
        for (i, &(u, su)) in pairs.iter().enumerate() {
            if u & !mask != 0 || su & !mask != 0 {
                return Err(Error::InvalidArgument(format!(
                    "({u}, {su}) exceeds dimension {n}"
                )));
            }
            if su == 0 {
                return Err(Error::InvalidArgument(format!("vertex {u} is a sink")));
            }
            for &(v, sv) in &pairs[..i] {
                if u == v {
                    return Err(Error::InvalidArgument(format!("vertex {u} recorded twice")));
                }
                if clashes(u, su, v, sv) {
                    return Err(Error::InvalidArgument(format!(
                        "vertices {v} and {u} clash"
                    )));
                }
            }
        }
        Ok(Self { n, pairs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(Vertex, OutmapValue)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The sequence this history extends: all but the last answer, plus the
    /// last queried vertex.
    pub fn parent(&self) -> Option<Sequence> {
        let (&(v, _), rest) = self.pairs.split_last()?;
        Some(Sequence {
            history: History {
                n: self.n,
                pairs: rest.to_vec(),
            },
            next: v,
        })
    }
}

/// A history together with the next vertex to query.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequence {
    history: History,
    next: Vertex,
}

impl Sequence {
    pub fn new(history: History, next: Vertex) -> Result<Self> {
        if next & !full_mask(history.n) != 0 || history.pairs.iter().any(|&(v, _)| v == next) {
            return Err(Error::InvalidArgument(format!(
                "vertex {next} is not an unqueried vertex"
            )));
        }
        Ok(Self { history, next })
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn next(&self) -> Vertex {
        self.next
    }
}

/// Number of queries spent by `s` against `o` if the next query ends the game
/// with a sink or clash and `o` agrees with the record, otherwise 0.
pub fn payoff(s: &Sequence, o: &OutmapTable) -> Result<usize> {
    if s.history.n != o.dim() {
        return Err(Error::InvalidArgument(format!(
            "sequence of dimension {} against outmap of dimension {}",
            s.history.n,
            o.dim()
        )));
    }
    let pairs = &s.history.pairs;
    if pairs.iter().any(|&(v, sv)| o.get(v) != sv) {
        return Ok(0);
    }
    let a = o.get(s.next);
    let ends = a == 0 || pairs.iter().any(|&(v, sv)| clashes(v, sv, s.next, a));
    Ok(if ends { pairs.len() + 1 } else { 0 })
}

/// A group element as lookup tables on vertices and on outmap values.
struct Elem {
    vertex: Vec<u8>,
    value: Vec<u8>,
}

struct Ctx {
    n: usize,
    size: usize,
    prune: bool,
    group: Vec<Elem>,
    /// `clash_free[d * size + s]`: nonzero answers `a` with `(a ^ s) & d != 0`.
    clash_free: Vec<u32>,
}

impl Ctx {
    fn new(n: usize, mode: LpMode) -> Self {
        let size = 1usize << n;
        let group = match mode {
            LpMode::Full => vec![Elem {
                vertex: (0..size as u8).collect(),
                value: (0..size as u8).collect(),
            }],
            LpMode::Symmetric => cube_group(n)
                .iter()
                .map(|g| Elem {
                    vertex: (0..size as u32).map(|u| g.vertex(u) as u8).collect(),
                    value: (0..size as u32).map(|s| g.value(s) as u8).collect(),
                })
                .collect(),
        };
        let mut clash_free = vec![0u32; size * size];
        for d in 0..size as u32 {
            for s in 0..size as u32 {
                clash_free[d as usize * size + s as usize] = (1..size as u32)
                    .filter(|&a| !clashes(0, a, d, s) || d == 0)
                    .fold(0, |m, a| m | 1 << a);
            }
        }
        Self {
            n,
            size,
            prune: mode == LpMode::Symmetric,
            group,
            clash_free,
        }
    }

    /// Legal answers per unqueried vertex, `u32::MAX` for queried ones.
    fn avail(&self, pairs: &[(u8, u8)]) -> Vec<u32> {
        let all = (1..self.size as u32).fold(0, |m, a| m | 1 << a);
        let mut out = vec![all; self.size];
        for &(v, _) in pairs {
            out[v as usize] = u32::MAX;
        }
        for (w, slot) in out.iter_mut().enumerate() {
            if *slot == u32::MAX {
                continue;
            }
            for &(v, s) in pairs {
                *slot &= self.clash_free[(w ^ v as usize) * self.size + s as usize];
            }
        }
        out
    }

    /// Vertices that may be queried next after a history with these answers.
    fn candidates(&self, avail: &[u32]) -> Vec<u8> {
        let open: Vec<u8> = (0..self.size as u8)
            .filter(|&w| avail[w as usize] != u32::MAX)
            .collect();
        if self.prune {
            let forced: Vec<u8> = open
                .iter()
                .copied()
                .filter(|&w| avail[w as usize] == 0)
                .collect();
            if !forced.is_empty() {
                return forced;
            }
        }
        open
    }

    /// Lexicographically smallest image of `v0 s0 v1 s1 ... [next]`.
    fn canon(&self, pairs: &[(u8, u8)], next: Option<u8>) -> Vec<u8> {
        let mut best: Option<Vec<u8>> = None;
        let mut img = Vec::with_capacity(2 * pairs.len() + 1);
        for g in &self.group {
            img.clear();
            for &(v, s) in pairs {
                img.push(g.vertex[v as usize]);
                img.push(g.value[s as usize]);
            }
            if let Some(p) = next {
                img.push(g.vertex[p as usize]);
            }
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img.clone());
            }
        }
        best.expect("group is nonempty")
    }

    /// Packs an actual sequence into a key, with a leading 1 marking its length.
    fn encode(&self, pairs: impl Iterator<Item = (u8, u8)>, next: u8) -> u64 {
        let n = self.n;
        let k = pairs.fold(1u64, |k, (v, s)| {
            k << (2 * n) | u64::from(v) << n | u64::from(s)
        });
        k << n | u64::from(next)
    }
}

fn split_pairs(key: &[u8]) -> (Vec<(u8, u8)>, Option<u8>) {
    let pairs = key.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let next = (key.len() % 2 == 1).then(|| key[key.len() - 1]);
    (pairs, next)
}

struct HistoryInfo {
    /// Canonical keys of the sequences extending this history, with multiplicity.
    seqs: Vec<(Vec<u8>, i64)>,
    children: Vec<Vec<u8>>,
}

fn expand_history(ctx: &Ctx, key: &[u8]) -> HistoryInfo {
    let (pairs, _) = split_pairs(key);
    let avail = ctx.avail(&pairs);
    let mut seqs: Vec<(Vec<u8>, i64)> = Vec::new();
    let mut children = Vec::new();
    for p in ctx.candidates(&avail) {
        let s = ctx.canon(&pairs, Some(p));
        match seqs.iter_mut().find(|(k, _)| *k == s) {
            Some((_, c)) => *c += 1,
            None => seqs.push((s, 1)),
        }
        let mut m = avail[p as usize];
        let mut ext = pairs.clone();
        while m != 0 {
            let a = m.trailing_zeros() as u8;
            m &= m - 1;
            ext.push((p, a));
            children.push(ctx.canon(&ext, None));
            ext.pop();
        }
    }
    seqs.sort();
    children.sort();
    children.dedup();
    HistoryInfo { seqs, children }
}

fn coef(c: i64) -> i32 {
    i32::try_from(c).expect("coefficient fits in i32")
}

fn var_name(key: &[u8]) -> String {
    let (pairs, next) = split_pairs(key);
    let mut s = String::from("x");
    for (v, a) in pairs {
        s.push_str(&format!("_{v}.{a}"));
    }
    s.push_str(&format!("_P{}", next.expect("sequence key")));
    s
}

/// Builds the LP whose optimum is the randomized query complexity.
///
/// Variables are ordered by history length, then lexicographically by
/// (canonical) sequence; `v` comes last. Equality rows follow the same
/// history order, starting with the root row `sum x = 1`.
pub fn generate_lp(n: usize, mode: LpMode) -> Result<LinearProgram> {
    let limit = match mode {
        LpMode::Full => FULL_DIM_LIMIT,
        LpMode::Symmetric => LP_DIM_LIMIT,
    };
    if n > limit {
        return Err(Error::DimensionTooLarge { n, limit });
    }
    let ctx = Ctx::new(n, mode);

    // breadth-first over history orbits
    let mut histories: Vec<Vec<u8>> = Vec::new();
    let mut infos: Vec<HistoryInfo> = Vec::new();
    let mut seq_keys: Vec<Vec<u8>> = Vec::new();
    let mut level: Vec<Vec<u8>> = vec![Vec::new()];
    while !level.is_empty() {
        let level_infos: Vec<HistoryInfo> =
            level.par_iter().map(|h| expand_history(&ctx, h)).collect();
        let mut level_seqs: Vec<Vec<u8>> = level_infos
            .iter()
            .flat_map(|i| i.seqs.iter().map(|(k, _)| k.clone()))
            .collect();
        level_seqs.sort();
        level_seqs.dedup();
        seq_keys.extend(level_seqs);
        let mut next: Vec<Vec<u8>> = level_infos
            .iter()
            .flat_map(|i| i.children.iter().cloned())
            .collect();
        next.sort();
        next.dedup();
        histories.extend(level);
        infos.extend(level_infos);
        level = next;
    }
    let seq_id: FxHashMap<&[u8], usize> = seq_keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_slice(), i))
        .collect();
    let v = seq_keys.len();
    let mut variables: Vec<String> = seq_keys.iter().map(|k| var_name(k)).collect();
    variables.push("v".into());

    let mut equalities = Vec::with_capacity(histories.len());
    for (i, (h, info)) in histories.iter().zip(&infos).enumerate() {
        let mut terms: Vec<(u32, i32)> = info
            .seqs
            .iter()
            .map(|(k, c)| (seq_id[k.as_slice()] as u32, coef(*c)))
            .collect();
        let rhs = if h.is_empty() {
            1
        } else {
            let (pairs, _) = split_pairs(h);
            let (last, rest) = pairs.split_last().expect("nonempty");
            terms.push((seq_id[ctx.canon(rest, Some(last.0)).as_slice()] as u32, -1));
            0
        };
        terms.sort();
        equalities.push(Row {
            name: format!("h{i}"),
            terms,
            rhs,
        });
    }

    // every actual sequence, mapped to its orbit's variable
    let mut actual: FxHashMap<u64, u32> = FxHashMap::default();
    for (id, key) in seq_keys.iter().enumerate() {
        let (pairs, next) = split_pairs(key);
        let next = next.expect("sequence key");
        for g in &ctx.group {
            let k = ctx.encode(
                pairs
                    .iter()
                    .map(|&(v, s)| (g.vertex[v as usize], g.value[s as usize])),
                g.vertex[next as usize],
            );
            actual.insert(k, id as u32);
        }
    }

    let reps = adversary_outmaps(&ctx);
    let inequalities: Vec<Row> = reps
        .par_iter()
        .enumerate()
        .map_init(
            || vec![0i64; v],
            |acc, (i, o)| {
                let mut touched = Vec::new();
                let mut avail = [u32::MAX; 8];
                avail[..ctx.size].copy_from_slice(&ctx.avail(&[]));
                walk(&ctx, &actual, o, 0, &avail, 1, acc, &mut touched);
                touched.sort_unstable();
                let mut terms: Vec<(u32, i32)> = Vec::with_capacity(touched.len() + 1);
                terms.extend(
                    touched
                        .iter()
                        .map(|&id| (id, coef(std::mem::take(&mut acc[id as usize])))),
                );
                terms.push((v as u32, -1));
                Row {
                    name: format!("o{i}"),
                    terms,
                    rhs: 0,
                }
            },
        )
        .collect();

    Ok(LinearProgram {
        variables,
        objective: v,
        inequalities,
        equalities,
    })
}

/// Follows the game tree along the answers of `o`, adding the payoff of every
/// sequence that ends the game to its variable. Queried vertices carry
/// `u32::MAX` in `avail`.
#[allow(clippy::too_many_arguments)]
fn walk(
    ctx: &Ctx,
    actual: &FxHashMap<u64, u32>,
    o: &[u8],
    depth: i64,
    avail: &[u32; 8],
    prefix: u64,
    acc: &mut [i64],
    touched: &mut Vec<u32>,
) {
    let (n, size) = (ctx.n, ctx.size);
    let mut open = 0u32;
    let mut forced = 0u32;
    for (w, &m) in avail.iter().enumerate().take(size) {
        if m != u32::MAX {
            open |= 1 << w;
            if m == 0 {
                forced |= 1 << w;
            }
        }
    }
    let mut cand = if ctx.prune && forced != 0 {
        forced
    } else {
        open
    };
    while cand != 0 {
        let p = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        let id = actual[&(prefix << n | p as u64)];
        let a = o[p] as usize;
        if a != 0 && avail[p] >> a & 1 == 1 {
            let mut next = *avail;
            next[p] = u32::MAX;
            for (w, slot) in next.iter_mut().enumerate().take(size) {
                if *slot != u32::MAX {
                    *slot &= ctx.clash_free[(w ^ p) * size + a];
                }
            }
            let prefix = prefix << (2 * n) | (p as u64) << n | a as u64;
            walk(ctx, actual, o, depth + 1, &next, prefix, acc, touched);
        } else {
            if acc[id as usize] == 0 {
                touched.push(id);
            }
            acc[id as usize] += depth + 1;
        }
    }
}

/// Adversary outmaps: all tables, or one lexicographically minimal
/// representative per orbit, in increasing lexicographic order.
fn adversary_outmaps(ctx: &Ctx) -> Vec<Vec<u8>> {
    let (n, size) = (ctx.n, ctx.size);
    let total = 1u64 << (n * size);
    let decode = move |code: u64| -> Vec<u8> {
        (0..size)
            .map(|u| ((code >> (n * (size - 1 - u))) & ((1 << n) - 1)) as u8)
            .collect()
    };
    // inverse vertex maps, so that images can be compared position by position
    let inv: Vec<Vec<u8>> = ctx
        .group
        .iter()
        .map(|g| {
            let mut inv = vec![0u8; size];
            for (u, &w) in g.vertex.iter().enumerate() {
                inv[w as usize] = u as u8;
            }
            inv
        })
        .collect();
    let is_min = |s: &[u8]| -> bool {
        for (g, inv) in ctx.group.iter().zip(&inv).skip(1) {
            for w in 0..size {
                let x = g.value[s[inv[w] as usize] as usize];
                match x.cmp(&s[w]) {
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        true
    };
    (0..total)
        .into_par_iter()
        .map(decode)
        .filter(|s| is_min(s))
        .collect()
}
