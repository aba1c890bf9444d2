//! The automorphism group of the `n`-cube: dimension permutations combined
//! with XOR translations, acting on vertices and on outmap bit positions.

use crate::cube::{OutmapTable, OutmapValue, Vertex};

/// Largest dimension for which the whole group is materialized.
pub const GROUP_DIM_LIMIT: usize = 6;

/// One automorphism `u -> pi(u) ^ shift`. Outmap values transform by `pi` alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeSymmetry {
    map: Vec<u32>,
    shift: Vertex,
}

impl CubeSymmetry {
    #[inline]
    pub fn vertex(&self, u: Vertex) -> Vertex {
        self.map[u as usize] ^ self.shift
    }

    #[inline]
    pub fn value(&self, s: OutmapValue) -> OutmapValue {
        self.map[s as usize]
    }

    pub fn shift(&self) -> Vertex {
        self.shift
    }

    /// The image table `t` with `t(g(u)) = g(s(u))`.
    pub fn table(&self, s: &OutmapTable) -> OutmapTable {
        let mut out = vec![0; s.num_vertices()];
        for (u, &x) in s.values().iter().enumerate() {
            out[self.vertex(u as Vertex) as usize] = self.value(x);
        }
        OutmapTable::from_raw(s.dim(), out)
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Bit-pattern map of the permutation sending dimension `i` to `perm[i]`.
pub fn permutation_map(perm: &[usize]) -> Vec<u32> {
    let n = perm.len();
    (0..1u32 << n)
        .map(|x| {
            (0..n)
                .filter(|&i| x >> i & 1 == 1)
                .fold(0, |acc, i| acc | 1 << perm[i])
        })
        .collect()
}

/// The full group, `n! * 2^n` elements; the identity comes first.
pub fn cube_group(n: usize) -> Vec<CubeSymmetry> {
    assert!(
        n <= GROUP_DIM_LIMIT,
        "cube group materialized only up to n = {GROUP_DIM_LIMIT}"
    );
    let mut out = Vec::new();
    for perm in permutations(n) {
        let map = permutation_map(&perm);
        for shift in 0..1u32 << n {
            out.push(CubeSymmetry {
                map: map.clone(),
                shift,
            });
        }
    }
    out
}
