//! Constructions and transformations of unique sink orientations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::{
    check_dim, compress, expand, face_sink, full_mask, FaceSpec, OutmapTable, OutmapValue, Vertex,
};
use crate::error::{Error, Result};
use crate::symmetry::{permutation_map, permutations};

/// An edge `{low, low ^ e_dim}`, stored by its endpoint with bit `dim - 1` clear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub low: Vertex,
    /// 1-based dimension.
    pub dim: usize,
}

impl Edge {
    pub fn new(n: usize, u: Vertex, dim: usize) -> Result<Self> {
        if dim == 0 || dim > n || u & !full_mask(n) != 0 {
            return Err(Error::InvalidArgument(format!(
                "edge at {u} in dimension {dim} does not fit in dimension {n}"
            )));
        }
        Ok(Self {
            low: u & !(1 << (dim - 1)),
            dim,
        })
    }

    pub fn high(&self) -> Vertex {
        self.low | self.bit()
    }

    fn bit(&self) -> u32 {
        1 << (self.dim - 1)
    }
}

pub fn xor_relabel(s: &OutmapTable, z: OutmapValue) -> Result<OutmapTable> {
    if z & !full_mask(s.dim()) != 0 {
        return Err(Error::InvalidArgument(format!(
            "{z} exceeds dimension {}",
            s.dim()
        )));
    }
    Ok(OutmapTable::from_raw(
        s.dim(),
        s.values().iter().map(|&x| x ^ z).collect(),
    ))
}

/// The orientation induced on the dimensions `dims` by the sinks of the
/// complementary co-faces. Dimensions are renumbered in increasing order.
pub fn inherited(s: &OutmapTable, dims: u32) -> Result<OutmapTable> {
    let n = s.dim();
    let all = full_mask(n);
    if dims & !all != 0 {
        return Err(Error::InvalidArgument(format!(
            "dimension set {dims:#b} exceeds dimension {n}"
        )));
    }
    let co = all & !dims;
    let k = dims.count_ones() as usize;
    let mut out = Vec::with_capacity(1 << k);
    for x in 0..1u32 << k {
        let base = expand(x, dims);
        let face = FaceSpec::new(n, base, co)?;
        let sink = match face_sink(s, &face) {
            Ok(Some(v)) => v,
            Ok(None) => {
                return Err(Error::InheritedUndefined {
                    base,
                    dims: co,
                    sinks: 0,
                })
            }
            Err(Error::MultipleSinks { .. }) => {
                let sinks = face.vertices().filter(|&v| s.get(v) & co == 0).count();
                return Err(Error::InheritedUndefined {
                    base,
                    dims: co,
                    sinks,
                });
            }
            Err(e) => return Err(e),
        };
        out.push(compress(s.get(sink), dims));
    }
    Ok(OutmapTable::from_raw(k, out))
}

/// Product of an outer `k`-dimensional table with one inner table per outer
/// vertex. Inner tables occupy the low dimensions `1..=n-k`, the outer table
/// the high dimensions.
pub fn product(outer: &OutmapTable, inner: &[OutmapTable]) -> Result<OutmapTable> {
    let k = outer.dim();
    if inner.len() != outer.num_vertices() {
        return Err(Error::InvalidArgument(format!(
            "product needs {} inner tables, got {}",
            outer.num_vertices(),
            inner.len()
        )));
    }
    let m = inner.first().map(|t| t.dim()).unwrap_or(0);
    if let Some(t) = inner.iter().find(|t| t.dim() != m) {
        return Err(Error::InvalidArgument(format!(
            "inner tables differ in dimension ({} and {m})",
            t.dim()
        )));
    }
    check_dim(k + m)?;
    let mut out = Vec::with_capacity(1 << (k + m));
    for (u, t) in inner.iter().enumerate() {
        let hi = outer.get(u as Vertex) << m;
        out.extend(t.values().iter().map(|&x| hi | x));
    }
    Ok(OutmapTable::from_raw(k + m, out))
}

/// True iff all vertices of `f` agree on the outmap bits outside `f`.
pub fn is_hypervertex(s: &OutmapTable, f: &FaceSpec) -> bool {
    let outside = full_mask(s.dim()) & !f.dims();
    let mut it = f.vertices().map(|v| s.get(v) & outside);
    let first = it.next().unwrap_or(0);
    it.all(|x| x == first)
}

/// Replaces the orientation inside the hypervertex `f` by `r`.
pub fn hypervertex_replace(s: &OutmapTable, f: &FaceSpec, r: &OutmapTable) -> Result<OutmapTable> {
    if r.dim() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "replacement has dimension {}, face has {}",
            r.dim(),
            f.dim()
        )));
    }
    if !is_hypervertex(s, f) {
        return Err(Error::PreconditionViolated(format!(
            "face through {} spanned by {:#b} is not a hypervertex",
            f.base(),
            f.dims()
        )));
    }
    let mut out = s.values().to_vec();
    for v in f.vertices() {
        let inside = expand(r.get(compress(v, f.dims())), f.dims());
        out[v as usize] = (s.get(v) & !f.dims()) | inside;
    }
    Ok(OutmapTable::from_raw(s.dim(), out))
}

/// All edges whose endpoints agree outside the edge's own dimension,
/// ordered by dimension, then by lower endpoint.
pub fn flippable_edges(s: &OutmapTable) -> Vec<Edge> {
    let n = s.dim();
    let mut out = Vec::new();
    for dim in 1..=n {
        let bit = 1u32 << (dim - 1);
        for low in (0..s.num_vertices() as u32).filter(|u| u & bit == 0) {
            if (s.get(low) ^ s.get(low | bit)) & !bit == 0 {
                out.push(Edge { low, dim });
            }
        }
    }
    out
}

/// Reverses every edge of a matching of flippable edges.
pub fn flip_matching(s: &OutmapTable, m: &[Edge]) -> Result<OutmapTable> {
    let n = s.dim();
    let mut used = vec![false; s.num_vertices()];
    let mut out = s.values().to_vec();
    for e in m {
        if e.dim == 0 || e.dim > n || e.low & !full_mask(n) != 0 || e.low & e.bit() != 0 {
            return Err(Error::InvalidArgument(format!(
                "{e:?} is not an edge of the {n}-cube"
            )));
        }
        let (a, b) = (e.low, e.high());
        if used[a as usize] || used[b as usize] {
            return Err(Error::PreconditionViolated(format!(
                "edge {e:?} shares a vertex with another edge of the matching"
            )));
        }
        if (s.get(a) ^ s.get(b)) & !e.bit() != 0 {
            return Err(Error::PreconditionViolated(format!(
                "edge {e:?} is not flippable"
            )));
        }
        used[a as usize] = true;
        used[b as usize] = true;
        out[a as usize] ^= e.bit();
        out[b as usize] ^= e.bit();
    }
    Ok(OutmapTable::from_raw(n, out))
}

/// Entrywise: keep `s(u)` where `u_i = s(u)_i`, otherwise take `s(u ^ e_i)`.
pub fn partial_swap(s: &OutmapTable, dim: usize) -> Result<OutmapTable> {
    if dim == 0 || dim > s.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} out of range 1..={}",
            s.dim()
        )));
    }
    let bit = 1u32 << (dim - 1);
    let out = (0..s.num_vertices() as u32)
        .map(|u| {
            let x = s.get(u);
            if (u ^ x) & bit == 0 {
                x
            } else {
                s.get(u ^ bit)
            }
        })
        .collect();
    Ok(OutmapTable::from_raw(s.dim(), out))
}

/// A pseudo-random USO, reproducible per `(n, seed)`.
///
/// Built as a product of a random 1-dimensional orientation with two
/// independently generated `(n-1)`-dimensional halves, then scrambled by a
/// random dimension permutation, a random `xor_relabel` and the flip of a
/// random matching of flippable edges. Not uniform over all USOs.
pub fn random_uso(n: usize, seed: u64) -> Result<OutmapTable> {
    check_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_uso_with(n, &mut rng))
}

fn random_uso_with(n: usize, rng: &mut ChaCha8Rng) -> OutmapTable {
    if n == 0 {
        return OutmapTable::from_raw(0, vec![0]);
    }
    let outer = if rng.gen() {
        OutmapTable::from_raw(1, vec![0, 1])
    } else {
        OutmapTable::from_raw(1, vec![1, 0])
    };
    let inner = [random_uso_with(n - 1, rng), random_uso_with(n - 1, rng)];
    let s = product(&outer, &inner).expect("dimensions agree");

    let perms = permutations(n);
    let map = permutation_map(perms.choose(rng).expect("nonempty"));
    let mut values = vec![0; s.num_vertices()];
    for (u, &x) in s.values().iter().enumerate() {
        values[map[u] as usize] = map[x as usize];
    }
    let z = rng.gen_range(0..1u32 << n);
    let s = xor_relabel(&OutmapTable::from_raw(n, values), z).expect("z fits");

    let mut edges = flippable_edges(&s);
    edges.shuffle(rng);
    let mut used = vec![false; s.num_vertices()];
    let mut matching = Vec::new();
    for e in edges {
        if !used[e.low as usize] && !used[e.high() as usize] && rng.gen_bool(0.5) {
            used[e.low as usize] = true;
            used[e.high() as usize] = true;
            matching.push(e);
        }
    }
    flip_matching(&s, &matching).expect("disjoint flippable edges")
}
