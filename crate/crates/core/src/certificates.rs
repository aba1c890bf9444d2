//! Completability of partial outmaps, the reductions that preserve it, and
//! minimal non-completable partial outmaps (certificates).

use std::collections::BTreeSet;

use crate::cube::{
    check_dim, clashes, compress, full_mask, is_uso, OutmapTable, OutmapValue, PartialOutmapTable,
    Vertex,
};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symmetry::cube_group;

/// Default dimension guard for the backtracking search.
pub const COMPLETION_DIM_LIMIT: usize = 4;
/// Hard cap: domains are 32-bit value masks.
const COMPLETION_DIM_MAX: usize = 5;

#[derive(Clone, Debug)]
pub struct CompletionConfig {
    pub dim_limit: usize,
    pub node_limit: Option<u64>,
}

impl Default for CompletionConfig {
    fn default() -> Self {
        Self {
            dim_limit: COMPLETION_DIM_LIMIT,
            node_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateReport {
    /// A USO agreeing with the input.
    Completable(OutmapTable),
    /// A minimal non-completable subset of the known vertices.
    NonCompletable(PartialOutmapTable),
    /// The input itself is a certificate with this many known vertices.
    KCertificate(usize),
}

/// `compat[d][a]`: mask of values `b` such that vertices at XOR distance `d`
/// with outmaps `a` and `b` do not clash.
fn compat_table(n: usize) -> Vec<Vec<u32>> {
    let size = 1u32 << n;
    (0..size)
        .map(|d| {
            (0..size)
                .map(|a| {
                    (0..size)
                        .filter(|&b| (a ^ b) & d != 0)
                        .fold(0, |m, b| m | 1 << b)
                })
                .collect()
        })
        .collect()
}

struct Search<'a> {
    compat: &'a [Vec<u32>],
    values: Vec<Option<OutmapValue>>,
    nodes: u64,
    node_limit: Option<u64>,
}

impl Search<'_> {
    fn run(&mut self, open: &[Vertex], domains: &mut [u32]) -> Result<bool> {
        let Some((&u, rest)) = open.split_first() else {
            return Ok(true);
        };
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l) {
            return Err(Error::Aborted(format!(
                "completion search exceeded {} nodes",
                self.nodes - 1
            )));
        }
        let mut choices: Vec<u32> = (0..32)
            .filter(|&a| domains[u as usize] >> a & 1 == 1)
            .collect();
        choices.sort_by_key(|&a| (a.count_ones(), a));
        for a in choices {
            let mut next = domains.to_vec();
            let mut dead = false;
            for &w in rest {
                let d = &mut next[w as usize];
                *d &= self.compat[(u ^ w) as usize][a as usize];
                if *d == 0 {
                    dead = true;
                    break;
                }
            }
            if dead {
                continue;
            }
            self.values[u as usize] = Some(a);
            if self.run(rest, &mut next)? {
                return Ok(true);
            }
            self.values[u as usize] = None;
        }
        Ok(false)
    }
}

/// Searches for a USO agreeing with `s`, or `None` if there is none.
fn complete(s: &PartialOutmapTable, cfg: &CompletionConfig) -> Result<Option<OutmapTable>> {
    let n = s.dim();
    let limit = cfg.dim_limit.min(COMPLETION_DIM_MAX);
    if n > limit {
        return Err(Error::DimensionTooLarge { n, limit });
    }
    if s.find_clash().is_some() {
        return Ok(None);
    }
    let compat = compat_table(n);
    let size = 1usize << n;
    let known = s.known();
    let all = ((1u64 << size) - 1) as u32;
    let mut domains = vec![0u32; size];
    let mut open = Vec::new();
    for w in 0..size as Vertex {
        if s.get(w).is_some() {
            continue;
        }
        let d = known
            .iter()
            .fold(all, |m, &(u, a)| m & compat[(u ^ w) as usize][a as usize]);
        if d == 0 {
            return Ok(None);
        }
        domains[w as usize] = d;
        open.push(w);
    }
    let mut search = Search {
        compat: &compat,
        values: s.values().to_vec(),
        nodes: 0,
        node_limit: cfg.node_limit,
    };
    if !search.run(&open, &mut domains)? {
        return Ok(None);
    }
    let values = search
        .values
        .into_iter()
        .map(|v| v.expect("assigned"))
        .collect();
    Ok(Some(OutmapTable::new(n, values)?))
}

/// Completable with a witness, or non-completable with a minimal certificate
/// found by deleting known vertices in ascending order while the rest stays
/// non-completable.
pub fn completable(s: &PartialOutmapTable, cfg: &CompletionConfig) -> Result<CertificateReport> {
    if let Some(t) = complete(s, cfg)? {
        return Ok(CertificateReport::Completable(t));
    }
    let mut keep: BTreeSet<Vertex> = s.known().into_iter().map(|(u, _)| u).collect();
    for (u, _) in s.known() {
        keep.remove(&u);
        let t = s.restrict(|v| keep.contains(&v));
        if complete(&t, cfg)?.is_some() {
            keep.insert(u);
        }
    }
    Ok(CertificateReport::NonCompletable(
        s.restrict(|v| keep.contains(&v)),
    ))
}

/// True iff `s` is non-completable and dropping any one known vertex makes
/// it completable (completability is inherited by restrictions, so this
/// covers every proper subset).
pub fn is_k_certificate(s: &PartialOutmapTable, cfg: &CompletionConfig) -> Result<bool> {
    if complete(s, cfg)?.is_some() {
        return Ok(false);
    }
    for (u, _) in s.known() {
        if complete(&s.restrict(|v| v != u), cfg)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `KCertificate(k)` if `s` is a certificate, otherwise the verdict of
/// [`completable`].
pub fn classify(s: &PartialOutmapTable, cfg: &CompletionConfig) -> Result<CertificateReport> {
    if is_k_certificate(s, cfg)? {
        return Ok(CertificateReport::KCertificate(s.known_count()));
    }
    completable(s, cfg)
}

/// Dimensions in which two known vertices differ.
pub fn spanned_dims(s: &PartialOutmapTable) -> u32 {
    let known = s.known();
    let Some(&(first, _)) = known.first() else {
        return 0;
    };
    known.iter().fold(0, |m, &(u, _)| m | (u ^ first))
}

/// Dimensions in which all known outmap values agree.
pub fn projectable_dims(s: &PartialOutmapTable) -> u32 {
    let known = s.known();
    let Some(&(_, first)) = known.first() else {
        return full_mask(s.dim());
    };
    full_mask(s.dim()) & !known.iter().fold(0, |m, &(_, a)| m | (a ^ first))
}

/// The projected partial outmap onto the dimensions `keep`, renumbered in
/// increasing order.
pub fn project(s: &PartialOutmapTable, keep: u32) -> Result<PartialOutmapTable> {
    let n = s.dim();
    if keep & !full_mask(n) != 0 {
        return Err(Error::InvalidArgument(format!(
            "{keep:#b} exceeds dimension {n}"
        )));
    }
    let m = keep.count_ones() as usize;
    let mut values: Vec<Option<(Vertex, OutmapValue)>> = vec![None; 1 << m];
    for (u, a) in s.known() {
        let (pu, pa) = (compress(u, keep), compress(a, keep));
        match values[pu as usize] {
            Some((v, b)) if b != pa => {
                let dim = (0..n).find(|&i| keep >> i & 1 == 0).map_or(0, |i| i + 1);
                return Err(Error::IllDefinedProjection { dim, u: v, v: u });
            }
            Some(_) => {}
            None => values[pu as usize] = Some((u, pa)),
        }
    }
    PartialOutmapTable::new(m, values.into_iter().map(|x| x.map(|(_, a)| a)).collect())
}

/// Drops non-spanned dimensions, then (when no known pair clashes)
/// projectable ones, until neither kind is left. Completability is preserved
/// in both directions.
pub fn reduce(s: &PartialOutmapTable) -> Result<PartialOutmapTable> {
    let mut cur = s.clone();
    loop {
        let full = full_mask(cur.dim());
        let spanned = spanned_dims(&cur);
        if spanned != full {
            cur = project(&cur, spanned)?;
            continue;
        }
        let proj = projectable_dims(&cur);
        if proj != 0 && cur.find_clash().is_none() {
            cur = project(&cur, full & !proj)?;
            continue;
        }
        return Ok(cur);
    }
}

/// `s(1^n) = 0^n` and `s(e_i) = e_i | e_{i+1}` with indices mod `n`: a
/// non-completable partial outmap with `n + 1` known vertices.
pub fn family_certificate(n: usize) -> Result<PartialOutmapTable> {
    check_dim(n)?;
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "family needs n >= 3, got {n}"
        )));
    }
    let mut pairs = vec![(full_mask(n), 0)];
    for i in 0..n {
        pairs.push((1 << i, 1 << i | 1 << ((i + 1) % n)));
    }
    pairs.sort_unstable();
    PartialOutmapTable::from_pairs(n, &pairs)
}

/// Serialization compared lexicographically; unknown vertices encode as
/// `2^n`, above every value.
fn serialize(values: &[Option<OutmapValue>], n: usize) -> Vec<u32> {
    values.iter().map(|v| v.unwrap_or(1 << n)).collect()
}

/// Canonical form of a partial outmap under cube automorphisms combined with
/// flipping every edge in a set of dimensions (`s -> s ^ z`).
fn canonical_with_flips(
    s: &PartialOutmapTable,
    group: &[crate::symmetry::CubeSymmetry],
) -> Vec<u32> {
    let n = s.dim();
    let mut best: Option<Vec<u32>> = None;
    let mut img = vec![None; 1 << n];
    for z in 0..1u32 << n {
        for g in group {
            img.iter_mut().for_each(|x| *x = None);
            for (u, a) in s.known() {
                img[g.vertex(u) as usize] = Some(g.value(a ^ z));
            }
            let key = serialize(&img, n);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.expect("group is nonempty")
}

/// Every 4-certificate at n = 3 with all dimensions spanned and none
/// projectable, one canonical representative per class under the 384
/// symmetries (automorphisms and edge flips), in increasing canonical order.
pub fn enumerate_4_certificates() -> Result<Vec<PartialOutmapTable>> {
    let n = 3;
    let group = cube_group(n);
    let cfg = CompletionConfig::default();
    let quads: Vec<u32> = (0u32..256).filter(|q| q.count_ones() == 4).collect();
    let found: Vec<BTreeSet<Vec<u32>>> = quads
        .par_iter()
        .map(|&quad| -> Result<BTreeSet<Vec<u32>>> {
            let mut classes = BTreeSet::new();
            let verts: Vec<Vertex> = (0..8).filter(|&u| quad >> u & 1 == 1).collect();
            for code in 0u32..1 << 12 {
                let pairs: Vec<(Vertex, OutmapValue)> = verts
                    .iter()
                    .enumerate()
                    .map(|(k, &u)| (u, code >> (3 * k) & 7))
                    .collect();
                let no_clash = pairs
                    .iter()
                    .enumerate()
                    .all(|(i, &(u, a))| pairs[i + 1..].iter().all(|&(v, b)| !clashes(u, a, v, b)));
                if !no_clash {
                    continue;
                }
                let s = PartialOutmapTable::from_pairs(n, &pairs)?;
                if spanned_dims(&s) != 7 || projectable_dims(&s) != 0 {
                    continue;
                }
                if is_k_certificate(&s, &cfg)? {
                    classes.insert(canonical_with_flips(&s, &group));
                }
            }
            Ok(classes)
        })
        .collect::<Result<_>>()?;
    found
        .into_iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|key| {
            let values = key.iter().map(|&x| (x < 8).then_some(x)).collect();
            PartialOutmapTable::new(n, values)
        })
        .collect()
}

/// Not a USO, but every facet is.
pub fn is_puso(s: &OutmapTable) -> bool {
    let n = s.dim();
    if n == 0 || is_uso(s) {
        return false;
    }
    let vals = s.values();
    (0..n).all(|i| {
        [0, 1u32 << i].into_iter().all(|side| {
            let facet: Vec<Vertex> = (0..vals.len() as Vertex)
                .filter(|&u| u & (1 << i) == side)
                .collect();
            facet.iter().enumerate().all(|(k, &u)| {
                facet[k + 1..]
                    .iter()
                    .all(|&v| !clashes(u, vals[u as usize], v, vals[v as usize]))
            })
        })
    })
}

/// Clashing pairs `(u, v)` with `u < v`.
pub fn clashing_pairs(s: &OutmapTable) -> Vec<(Vertex, Vertex)> {
    let vals = s.values();
    let size = vals.len() as Vertex;
    (0..size)
        .flat_map(|u| (u + 1..size).map(move |v| (u, v)))
        .filter(|&(u, v)| clashes(u, vals[u as usize], v, vals[v as usize]))
        .collect()
}

/// Largest dimension accepted by [`puso_scan`].
pub const PUSO_SCAN_DIM_LIMIT: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PusoScan {
    /// Every PUSO table, in increasing lexicographic order.
    pub tables: Vec<OutmapTable>,
    /// Lexicographically minimal member of each class under automorphisms.
    pub classes: Vec<OutmapTable>,
}

/// All PUSOs of the `n`-cube, by backtracking in vertex order with
/// non-antipodal clashes pruned.
pub fn puso_scan(n: usize) -> Result<PusoScan> {
    if n > PUSO_SCAN_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            n,
            limit: PUSO_SCAN_DIM_LIMIT,
        });
    }
    fn go(n: usize, vals: &mut Vec<OutmapValue>, out: &mut Vec<OutmapTable>) {
        let size = 1usize << n;
        let u = vals.len();
        if u == size {
            let t = OutmapTable::new(n, vals.clone()).expect("valid values");
            if is_puso(&t) {
                out.push(t);
            }
            return;
        }
        let full = full_mask(n);
        for a in 0..size as OutmapValue {
            let ok = vals.iter().enumerate().all(|(v, &b)| {
                (u as Vertex ^ v as Vertex) == full || !clashes(u as Vertex, a, v as Vertex, b)
            });
            if ok {
                vals.push(a);
                go(n, vals, out);
                vals.pop();
            }
        }
    }
    let mut tables = Vec::new();
    go(n, &mut Vec::with_capacity(1 << n), &mut tables);
    let group = cube_group(n);
    let mut classes: BTreeSet<Vec<OutmapValue>> = BTreeSet::new();
    for t in &tables {
        let min = group
            .iter()
            .map(|g| g.table(t).into_values())
            .min()
            .expect("group is nonempty");
        classes.insert(min);
    }
    Ok(PusoScan {
        tables,
        classes: classes
            .into_iter()
            .map(|v| OutmapTable::new(n, v))
            .collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_is_completable() {
        for a in 0..8 {
            let s = PartialOutmapTable::from_pairs(3, &[(5, a)]).unwrap();
            match completable(&s, &CompletionConfig::default()).unwrap() {
                CertificateReport::Completable(t) => {
                    assert!(crate::cube::is_uso(&t));
                    assert_eq!(t.get(5), a);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn clashing_pair_is_a_2_certificate() {
        let s = PartialOutmapTable::from_pairs(2, &[(0, 1), (3, 1)]).unwrap();
        assert!(is_k_certificate(&s, &CompletionConfig::default()).unwrap());
        assert_eq!(
            classify(&s, &CompletionConfig::default()).unwrap(),
            CertificateReport::KCertificate(2)
        );
    }

    #[test]
    fn family_n3() {
        let s = family_certificate(3).unwrap();
        assert_eq!(s.known(), vec![(1, 0b011), (2, 0b110), (4, 0b101), (7, 0)]);
        assert_eq!(spanned_dims(&s), 7);
        assert_eq!(projectable_dims(&s), 0);
        assert_eq!(reduce(&s).unwrap(), s);
        let cfg = CompletionConfig::default();
        assert!(is_k_certificate(&s, &cfg).unwrap());
        assert_eq!(
            completable(&s, &cfg).unwrap(),
            CertificateReport::NonCompletable(s.clone())
        );
    }

    #[test]
    fn minimal_certificate_by_deletion() {
        // a clash between 0 and 3 plus an irrelevant vertex
        let s = PartialOutmapTable::from_pairs(2, &[(0, 1), (1, 3), (3, 1)]).unwrap();
        let want = PartialOutmapTable::from_pairs(2, &[(0, 1), (3, 1)]).unwrap();
        assert_eq!(
            completable(&s, &CompletionConfig::default()).unwrap(),
            CertificateReport::NonCompletable(want)
        );
    }

    #[test]
    fn projection_errors() {
        // 0 and 1 differ only in dimension 1 and disagree in dimension 2
        let s = PartialOutmapTable::from_pairs(2, &[(0, 0b01), (1, 0b11)]).unwrap();
        assert!(matches!(
            project(&s, 0b10),
            Err(Error::IllDefinedProjection { .. })
        ));
    }

    #[test]
    fn one_known_vertex_reduces_to_a_point() {
        let s = PartialOutmapTable::from_pairs(4, &[(9, 6)]).unwrap();
        assert_eq!(reduce(&s).unwrap().dim(), 0);
    }

    #[test]
    fn guard() {
        let s = PartialOutmapTable::unknown(5).unwrap();
        assert!(matches!(
            completable(&s, &CompletionConfig::default()),
            Err(Error::DimensionTooLarge { .. })
        ));
        let cfg = CompletionConfig {
            dim_limit: 4,
            node_limit: Some(3),
        };
        let s = PartialOutmapTable::unknown(4).unwrap();
        assert!(matches!(completable(&s, &cfg), Err(Error::Aborted(_))));
    }

    #[test]
    fn puso_by_brute_force_n2() {
        let mut brute = Vec::new();
        for code in 0u32..256 {
            let t = OutmapTable::new(2, (0..4).map(|u| code >> (2 * u) & 3).collect()).unwrap();
            if is_puso(&t) {
                brute.push(t);
            }
        }
        assert_eq!(puso_scan(2).unwrap().tables, brute);
    }
}
