//! Exact deterministic query complexity of Sink-or-Clash as a two-player game.
//!
//! The player queries vertices, the adversary answers each query with an
//! outmap value. The player wins as soon as a queried vertex is a sink or
//! clashes with an earlier one, i.e. as soon as the adversary has no legal
//! answer left for it.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::cube::{clashes, full_mask, OutmapValue, Vertex};
use crate::error::{Error, Result};
use crate::symmetry::{permutation_map, permutations};

/// Largest dimension the game search accepts.
pub const GAME_DIM_LIMIT: usize = 5;

/// Search configuration. The defaults enable every reduction and impose no limits.
#[derive(Clone, Debug)]
pub struct GameConfig {
    /// First query at `0^n`, answered only by `e_1`, `e_1 | e_2`, ...
    pub root_reduction: bool,
    /// Transposition table keyed on the canonical form under the cube group.
    pub canonicalize: bool,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Worker threads for the root branches; 1 keeps everything on the caller's thread.
    pub threads: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            root_reduction: true,
            canonicalize: true,
            node_limit: None,
            time_limit: None,
            threads: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub table_hits: u64,
    pub table_size: u64,
}

impl SearchStats {
    fn add(&mut self, o: &SearchStats) {
        self.nodes += o.nodes;
        self.table_hits += o.table_hits;
        self.table_size += o.table_size;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameOutcome {
    pub player_wins: bool,
    pub stats: SearchStats,
}

/// A position: the answers given so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    n: usize,
    known: Vec<(Vertex, OutmapValue)>,
}

impl GameState {
    pub fn new(n: usize, known: Vec<(Vertex, OutmapValue)>) -> Result<Self> {
        if n > GAME_DIM_LIMIT {
            return Err(Error::DimensionTooLarge {
                n,
                limit: GAME_DIM_LIMIT,
            });
        }
        let mask = full_mask(n);
        for (i, &(u, su)) in known.iter().enumerate() {
            if u & !mask != 0 || su & !mask != 0 {
                return Err(Error::InvalidArgument(format!(
                    "({u}, {su}) exceeds dimension {n}"
                )));
            }
            if su == 0 {
                return Err(Error::InvalidArgument(format!("vertex {u} is a sink")));
            }
            for &(v, sv) in &known[..i] {
                if u == v {
                    return Err(Error::InvalidArgument(format!("vertex {u} known twice")));
                }
                if clashes(u, su, v, sv) {
                    return Err(Error::InvalidArgument(format!(
                        "vertices {v} and {u} clash"
                    )));
                }
            }
        }
        Ok(Self { n, known })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn known(&self) -> &[(Vertex, OutmapValue)] {
        &self.known
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TValue {
    Exact(usize),
    /// No budget up to the cap wins; the value is at least this.
    AtLeast(usize),
}

/// Precomputed group and clash tables for one dimension.
struct Tables {
    n: usize,
    size: usize,
    /// `clash_free[d * size + s]`: answers `a` with `(a ^ s) & d != 0`, sinks excluded.
    clash_free: Vec<u32>,
    /// Permutation maps on bit patterns.
    perms: Vec<Vec<u32>>,
}

impl Tables {
    fn new(n: usize) -> Self {
        let size = 1usize << n;
        let nonzero = value_mask(n);
        let mut clash_free = vec![0u32; size * size];
        for d in 1..size as u32 {
            for s in 0..size as u32 {
                let mut m = 0u32;
                for a in 1..size as u32 {
                    if !clashes(0, a, d, s) {
                        m |= 1 << a;
                    }
                }
                clash_free[d as usize * size + s as usize] = m & nonzero;
            }
        }
        let perms = permutations(n).iter().map(|p| permutation_map(p)).collect();
        Self {
            n,
            size,
            clash_free,
            perms,
        }
    }
}

/// Bitmask of the legal (nonzero) answers.
fn value_mask(n: usize) -> u32 {
    let size = 1u64 << n;
    (((1u64 << size) - 1) as u32) & !1
}

/// Legal answers ordered by popcount, then value.
fn ordered_answers(mask: u32, out: &mut Vec<u32>) {
    out.clear();
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros());
        m &= m - 1;
    }
    out.sort_by_key(|&a| (a.count_ones(), a));
}

#[derive(Clone, Copy)]
struct Node {
    queried: u32,
    avail: [u32; 32],
    pairs: [u16; 16],
    len: usize,
}

#[derive(Clone, Copy, Default)]
struct Bounds {
    /// Smallest remaining budget known to win.
    win: u8,
    /// Largest remaining budget known to lose.
    lose: u8,
}

struct Searcher<'a> {
    t: &'a Tables,
    cfg: &'a GameConfig,
    table: FxHashMap<u128, Bounds>,
    stats: SearchStats,
    deadline: Option<Instant>,
}

impl<'a> Searcher<'a> {
    fn new(t: &'a Tables, cfg: &'a GameConfig, deadline: Option<Instant>) -> Self {
        Self {
            t,
            cfg,
            table: FxHashMap::default(),
            stats: SearchStats::default(),
            deadline,
        }
    }

    fn root(&self) -> Node {
        let mut avail = [0u32; 32];
        for a in avail.iter_mut().take(self.t.size) {
            *a = value_mask(self.t.n);
        }
        Node {
            queried: 0,
            avail,
            pairs: [0; 16],
            len: 0,
        }
    }

    fn play(&self, node: &Node, u: u32, a: u32) -> Node {
        let mut child = *node;
        child.queried |= 1 << u;
        let size = self.t.size;
        for v in 0..size as u32 {
            if child.queried >> v & 1 == 0 {
                child.avail[v as usize] &= self.t.clash_free[(u ^ v) as usize * size + a as usize];
            }
        }
        child.pairs[child.len] = ((u << self.t.n) | a) as u16;
        child.len += 1;
        child
    }

    fn has_forced(&self, node: &Node) -> bool {
        (0..self.t.size).any(|v| node.queried >> v & 1 == 0 && node.avail[v] == 0)
    }

    fn tick(&mut self) -> Result<()> {
        self.stats.nodes += 1;
        if let Some(limit) = self.cfg.node_limit {
            if self.stats.nodes > limit {
                return Err(Error::Aborted(format!("node limit {limit} reached")));
            }
        }
        if self.stats.nodes & 0xfff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(Error::Aborted("time limit reached".into()));
                }
            }
        }
        Ok(())
    }

    /// Lexicographically smallest sorted image of the known pairs under the
    /// cube group, packed into an integer.
    fn canonical(&self, node: &Node) -> u128 {
        let n = self.t.n;
        let len = node.len;
        let vmask = (1u16 << n) - 1;
        // The minimal image starts with (0, e_1 | ... | e_p) where p is the
        // smallest popcount among the known values, so only group elements
        // producing that first pair need to be tried.
        let pmin = node.pairs[..len]
            .iter()
            .map(|&p| (p & vmask).count_ones())
            .min()
            .unwrap_or(0);
        let low = (1u32 << pmin) - 1;
        let mut best = [u16::MAX; 16];
        let mut img = [0u16; 16];
        for &p in &node.pairs[..len] {
            let (v, s) = (u32::from(p >> n), u32::from(p & vmask));
            if s.count_ones() != pmin {
                continue;
            }
            for map in &self.t.perms {
                if map[s as usize] != low {
                    continue;
                }
                let shift = map[v as usize];
                for (i, &q) in node.pairs[..len].iter().enumerate() {
                    let (w, x) = (u32::from(q >> n), u32::from(q & vmask));
                    img[i] = (((map[w as usize] ^ shift) << n) | map[x as usize]) as u16;
                }
                img[..len].sort_unstable();
                if img[..len] < best[..len] {
                    best[..len].copy_from_slice(&img[..len]);
                }
            }
        }
        pack(&best[..len], 2 * n)
    }

    fn plain_key(&self, node: &Node) -> u128 {
        let mut v: Vec<u16> = node.pairs[..node.len].to_vec();
        v.sort_unstable();
        pack(&v, 2 * self.t.n)
    }

    fn wins(&mut self, node: &Node, r: u32) -> Result<bool> {
        self.tick()?;
        if r == 0 {
            return Ok(false);
        }
        if self.has_forced(node) {
            return Ok(true);
        }
        if r == 1 {
            return Ok(false);
        }
        let key = if r > 2 {
            let k = if self.cfg.canonicalize {
                self.canonical(node)
            } else {
                self.plain_key(node)
            };
            if let Some(b) = self.table.get(&k) {
                if b.win != 0 && r >= u32::from(b.win) {
                    self.stats.table_hits += 1;
                    return Ok(true);
                }
                if r <= u32::from(b.lose) {
                    self.stats.table_hits += 1;
                    return Ok(false);
                }
            }
            Some(k)
        } else {
            None
        };

        let mut moves: Vec<u32> = (0..self.t.size as u32)
            .filter(|&v| node.queried >> v & 1 == 0)
            .collect();
        moves.sort_by_key(|&v| (node.avail[v as usize].count_ones(), v));
        let mut answers = Vec::with_capacity(self.t.size);
        let mut result = false;
        for u in moves {
            ordered_answers(node.avail[u as usize], &mut answers);
            let mut all = true;
            for &a in &answers {
                let child = self.play(node, u, a);
                if !self.wins(&child, r - 1)? {
                    all = false;
                    break;
                }
            }
            if all {
                result = true;
                break;
            }
        }

        if let Some(k) = key {
            let e = self.table.entry(k).or_default();
            if result {
                if e.win == 0 || r < u32::from(e.win) {
                    e.win = r as u8;
                }
            } else if r > u32::from(e.lose) {
                e.lose = r as u8;
            }
        }
        Ok(result)
    }
}

fn pack(pairs: &[u16], width: usize) -> u128 {
    pairs
        .iter()
        .fold(0u128, |acc, &p| (acc << width) | u128::from(p))
}

/// Root positions after the first query, each with the remaining budget.
fn root_branches(s: &Searcher<'_>) -> Vec<Node> {
    let root = s.root();
    let n = s.t.n;
    (1..=n).map(|i| s.play(&root, 0, full_mask(i))).collect()
}

/// Whether the player can force a sink or a clash within `q` queries.
pub fn player_wins(n: usize, q: usize) -> Result<bool> {
    Ok(player_wins_with(n, q, &GameConfig::default())?.player_wins)
}

pub fn player_wins_with(n: usize, q: usize, cfg: &GameConfig) -> Result<GameOutcome> {
    let state = GameState::empty(n)?;
    wins_from(&state, q, cfg)
}

/// Game value from an arbitrary position with `q` queries in total, the known
/// pairs counting as already spent.
pub fn wins_from(state: &GameState, q: usize, cfg: &GameConfig) -> Result<GameOutcome> {
    let n = state.dim();
    if q == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    if n == 0 {
        // the single vertex is the sink
        return Ok(GameOutcome {
            player_wins: true,
            stats: SearchStats::default(),
        });
    }
    // table keys pack every pair of a keyed position (at most q - 3 of them)
    // into 128 bits
    if q > 16 || q.saturating_sub(3) * 2 * n > 128 {
        return Err(Error::InvalidArgument(format!(
            "budget {q} too large for dimension {n}"
        )));
    }
    let tables = Tables::new(n);
    let deadline = cfg.time_limit.map(|d| Instant::now() + d);
    let mut s = Searcher::new(&tables, cfg, deadline);
    let mut node = s.root();
    for &(u, a) in state.known() {
        node = s.play(&node, u, a);
    }
    let spent = state.known().len();
    if spent >= q {
        return Ok(GameOutcome {
            player_wins: false,
            stats: s.stats,
        });
    }
    let r = (q - spent) as u32;

    if !(cfg.root_reduction && spent == 0) {
        let player_wins = s.wins(&node, r)?;
        s.stats.table_size = s.table.len() as u64;
        return Ok(GameOutcome {
            player_wins,
            stats: s.stats,
        });
    }

    // Up to symmetry the first query is 0^n and its answer a prefix mask.
    let branches = root_branches(&s);
    let run = |child: &Node| -> Result<(bool, SearchStats)> {
        let mut w = Searcher::new(&tables, cfg, deadline);
        let win = w.wins(child, r - 1)?;
        w.stats.nodes += 1;
        w.stats.table_size = w.table.len() as u64;
        Ok((win, w.stats))
    };
    let results: Vec<Result<(bool, SearchStats)>> = if cfg.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        pool.install(|| branches.par_iter().map(run).collect())
    } else {
        // sequential: stop at the first adversary answer that defeats the player
        let mut out = Vec::new();
        for b in &branches {
            let res = run(b);
            let stop = matches!(res, Ok((false, _)));
            out.push(res);
            if stop {
                break;
            }
        }
        out
    };
    let mut stats = SearchStats::default();
    let mut player_wins = true;
    for res in results {
        let (win, st) = res?;
        stats.add(&st);
        player_wins &= win;
    }
    Ok(GameOutcome { player_wins, stats })
}

/// Smallest budget up to `q_max` with which the player wins.
pub fn compute_t(n: usize, q_max: usize, cfg: &GameConfig) -> Result<TValue> {
    for q in 1..=q_max {
        if player_wins_with(n, q, cfg)?.player_wins {
            return Ok(TValue::Exact(q));
        }
    }
    Ok(TValue::AtLeast(q_max + 1))
}
