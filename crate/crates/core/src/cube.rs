//! Vertices, faces, outmaps and the clash predicate.
//!
//! Dimension `i` (1-based) is bit `i - 1` of a vertex label or outmap value.

use std::fmt;

use crate::error::{Error, Result};

/// Largest dimension for which dense tables may be built.
pub const MAX_DIM: usize = 16;

/// Default dimension limit for the `3^n` face scan in [`is_uso_by_faces`].
pub const FACE_SCAN_LIMIT: usize = 4;

/// A vertex label: bit `i - 1` is the coordinate in dimension `i`.
pub type Vertex = u32;

/// An outmap value: bit `i - 1` is set iff the `i`-edge is outgoing.
pub type OutmapValue = u32;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::DimensionTooLarge { n, limit: MAX_DIM });
    }
    Ok(())
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Iterates over all submasks of `mask`, starting with 0.
pub(crate) fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some((cur.wrapping_sub(mask)) & mask)
        };
        Some(cur)
    })
}

/// Packs the bits of `x` selected by `mask` into the low bits.
pub(crate) fn compress(x: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= ((x >> b) & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`compress`]: spreads the low bits of `x` over the positions of `mask`.
pub(crate) fn expand(x: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= ((x >> k) & 1) << b;
        k += 1;
        m &= m - 1;
    }
    out
}

/// The clash predicate without argument checks.
#[inline]
pub(crate) fn clashes(u: Vertex, su: OutmapValue, v: Vertex, sv: OutmapValue) -> bool {
    (su ^ sv) & (u ^ v) == 0
}

/// True iff distinct vertices `u` and `v` agree in every dimension in which they differ.
pub fn clash(u: Vertex, su: OutmapValue, v: Vertex, sv: OutmapValue) -> Result<bool> {
    if u == v {
        return Err(Error::InvalidArgument(format!(
            "clash needs two distinct vertices, got {u} twice"
        )));
    }
    Ok(clashes(u, su, v, sv))
}

/// The face through `base` spanned by the dimensions in `dims`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaceSpec {
    base: Vertex,
    dims: u32,
}

impl FaceSpec {
    pub fn new(n: usize, base: Vertex, dims: u32) -> Result<Self> {
        check_dim(n)?;
        let mask = full_mask(n);
        if base & !mask != 0 || dims & !mask != 0 {
            return Err(Error::InvalidArgument(format!(
                "face (base {base}, dims {dims:#b}) does not fit in dimension {n}"
            )));
        }
        Ok(Self { base, dims })
    }

    pub fn whole(n: usize) -> Self {
        Self {
            base: 0,
            dims: full_mask(n),
        }
    }

    pub fn base(&self) -> Vertex {
        self.base
    }

    pub fn dims(&self) -> u32 {
        self.dims
    }

    /// Number of spanning dimensions.
    pub fn dim(&self) -> usize {
        self.dims.count_ones() as usize
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (v ^ self.base) & !self.dims == 0
    }

    /// Vertices of the face in increasing label order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        let anchor = self.base & !self.dims;
        submasks(self.dims).map(move |s| anchor | s)
    }
}

/// A total outmap: one value per vertex of the `n`-cube.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutmapTable {
    n: usize,
    values: Vec<OutmapValue>,
}

impl OutmapTable {
    pub fn new(n: usize, values: Vec<OutmapValue>) -> Result<Self> {
        check_dim(n)?;
        if values.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "a table of dimension {n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        let mask = full_mask(n);
        if let Some(pos) = values.iter().position(|&x| x & !mask != 0) {
            return Err(Error::InvalidArgument(format!(
                "entry {pos} ({}) exceeds dimension {n}",
                values[pos]
            )));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, f: impl FnMut(Vertex) -> OutmapValue) -> Result<Self> {
        check_dim(n)?;
        Self::new(n, (0..1u32 << n).map(f).collect())
    }

    /// The uniform orientation `s(u) = u`, with its sink at `0^n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_fn(n, |u| u)
    }

    pub(crate) fn from_raw(n: usize, values: Vec<OutmapValue>) -> Self {
        debug_assert_eq!(values.len(), 1usize << n);
        Self { n, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> OutmapValue {
        self.values[v as usize]
    }

    pub fn values(&self) -> &[OutmapValue] {
        &self.values
    }

    pub fn into_values(self) -> Vec<OutmapValue> {
        self.values
    }

    pub fn to_partial(&self) -> PartialOutmapTable {
        PartialOutmapTable {
            n: self.n,
            values: self.values.iter().map(|&x| Some(x)).collect(),
        }
    }

    /// Vertices whose outmap is `0^n`.
    pub fn sinks(&self) -> Vec<Vertex> {
        (0..self.values.len() as u32)
            .filter(|&v| self.values[v as usize] == 0)
            .collect()
    }
}

/// A partial outmap: `None` marks an unknown vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialOutmapTable {
    n: usize,
    values: Vec<Option<OutmapValue>>,
}

impl PartialOutmapTable {
    pub fn new(n: usize, values: Vec<Option<OutmapValue>>) -> Result<Self> {
        check_dim(n)?;
        if values.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "a table of dimension {n} needs {} entries, got {}",
                1usize << n,
                values.len()
            )));
        }
        let mask = full_mask(n);
        if let Some(pos) = values
            .iter()
            .position(|x| matches!(x, Some(x) if x & !mask != 0))
        {
            return Err(Error::InvalidArgument(format!(
                "entry {pos} exceeds dimension {n}"
            )));
        }
        Ok(Self { n, values })
    }

    pub fn unknown(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n,
            values: vec![None; 1usize << n],
        })
    }

    pub fn from_pairs(n: usize, pairs: &[(Vertex, OutmapValue)]) -> Result<Self> {
        let mut t = Self::unknown(n)?;
        for &(v, s) in pairs {
            if v as usize >= t.values.len() || s & !full_mask(n) != 0 {
                return Err(Error::InvalidArgument(format!(
                    "pair ({v}, {s}) does not fit in dimension {n}"
                )));
            }
            if t.values[v as usize].is_some() {
                return Err(Error::InvalidArgument(format!("vertex {v} given twice")));
            }
            t.values[v as usize] = Some(s);
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> Option<OutmapValue> {
        self.values[v as usize]
    }

    pub fn values(&self) -> &[Option<OutmapValue>] {
        &self.values
    }

    /// Known `(vertex, value)` pairs in increasing vertex order.
    pub fn known(&self) -> Vec<(Vertex, OutmapValue)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.map(|x| (v as Vertex, x)))
            .collect()
    }

    pub fn known_count(&self) -> usize {
        self.values.iter().filter(|x| x.is_some()).count()
    }

    /// Returns the total table if every vertex is known.
    pub fn to_total(&self) -> Option<OutmapTable> {
        let values: Option<Vec<_>> = self.values.iter().copied().collect();
        values.map(|v| OutmapTable::from_raw(self.n, v))
    }

    /// Keeps only the known vertices for which `keep` holds.
    pub fn restrict(&self, mut keep: impl FnMut(Vertex) -> bool) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(v, x)| if keep(v as Vertex) { *x } else { None })
            .collect();
        Self { n: self.n, values }
    }

    /// First clashing pair among the known vertices, lexicographically.
    pub fn find_clash(&self) -> Option<(Vertex, Vertex)> {
        let known = self.known();
        for (a, &(u, su)) in known.iter().enumerate() {
            for &(v, sv) in &known[a + 1..] {
                if clashes(u, su, v, sv) {
                    return Some((u, v));
                }
            }
        }
        None
    }
}

/// Lexicographically smallest clashing pair `(u, v)` with `u < v`, if any.
pub fn find_clash(s: &OutmapTable) -> Option<(Vertex, Vertex)> {
    let vals = s.values();
    for (u, &su) in vals.iter().enumerate() {
        for (v, &sv) in vals.iter().enumerate().skip(u + 1) {
            if clashes(u as Vertex, su, v as Vertex, sv) {
                return Some((u as Vertex, v as Vertex));
            }
        }
    }
    None
}

/// A table is a USO iff no two vertices clash.
pub fn is_uso(s: &OutmapTable) -> bool {
    find_clash(s).is_none()
}

/// The unique sink of face `f`, `None` if it has none.
pub fn face_sink(s: &OutmapTable, f: &FaceSpec) -> Result<Option<Vertex>> {
    if !fits(s.dim(), f) {
        return Err(Error::InvalidArgument(format!(
            "face {f:?} does not fit in dimension {}",
            s.dim()
        )));
    }
    let mut found = None;
    for v in f.vertices() {
        if s.get(v) & f.dims() == 0 {
            match found {
                None => found = Some(v),
                Some(first) => return Err(Error::MultipleSinks { first, second: v }),
            }
        }
    }
    Ok(found)
}

fn fits(n: usize, f: &FaceSpec) -> bool {
    let mask = full_mask(n);
    f.base() & !mask == 0 && f.dims() & !mask == 0
}

/// USO test straight from the definition: every face has exactly one sink.
pub fn is_uso_by_faces(s: &OutmapTable) -> Result<bool> {
    is_uso_by_faces_limited(s, FACE_SCAN_LIMIT)
}

pub fn is_uso_by_faces_limited(s: &OutmapTable, limit: usize) -> Result<bool> {
    let n = s.dim();
    if n > limit {
        return Err(Error::DimensionTooLarge { n, limit });
    }
    let all = full_mask(n);
    for dims in submasks(all) {
        // one face per assignment of the coordinates outside `dims`
        for base in submasks(all & !dims) {
            let f = FaceSpec { base, dims };
            match face_sink(s, &f) {
                Ok(Some(_)) => {}
                Ok(None) | Err(Error::MultipleSinks { .. }) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

/// `x` as `n` bits, dimension `n` leftmost.
pub fn fmt_bits(x: u32, n: usize) -> String {
    (0..n)
        .rev()
        .map(|i| if x >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl fmt::Display for OutmapTable {
    /// The outmap text format: `n`, then one `vertex value` line per vertex.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (v, &x) in self.values.iter().enumerate() {
            writeln!(f, "{} {}", fmt_bits(v as u32, self.n), fmt_bits(x, self.n))?;
        }
        Ok(())
    }
}

impl fmt::Display for PartialOutmapTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (v, x) in self.values.iter().enumerate() {
            match x {
                Some(x) => writeln!(f, "{} {}", fmt_bits(v as u32, self.n), fmt_bits(*x, self.n))?,
                None => writeln!(f, "{} *", fmt_bits(v as u32, self.n))?,
            }
        }
        Ok(())
    }
}
