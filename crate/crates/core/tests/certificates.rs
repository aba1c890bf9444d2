use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uso_core::certificates::{
    clashing_pairs, completable, enumerate_4_certificates, family_certificate, is_k_certificate,
    is_puso, projectable_dims, puso_scan, reduce, spanned_dims, CertificateReport,
    CompletionConfig,
};
use uso_core::cube::clash;
use uso_core::symmetry::cube_group;
use uso_core::{is_uso, OutmapTable, OutmapValue, PartialOutmapTable, Vertex};

fn no_clash(pairs: &[(Vertex, OutmapValue)]) -> bool {
    pairs.iter().enumerate().all(|(i, &(u, a))| {
        pairs[i + 1..]
            .iter()
            .all(|&(v, b)| !clash(u, a, v, b).unwrap())
    })
}

fn is_completable(s: &PartialOutmapTable, cfg: &CompletionConfig) -> bool {
    match completable(s, cfg).unwrap() {
        CertificateReport::Completable(t) => {
            assert!(is_uso(&t));
            for (u, a) in s.known() {
                assert_eq!(t.get(u), a);
            }
            true
        }
        CertificateReport::NonCompletable(c) => {
            assert!(is_k_certificate(&c, cfg).unwrap());
            false
        }
        CertificateReport::KCertificate(_) => unreachable!(),
    }
}

/// Random partial table on `k` distinct vertices.
fn random_partial(rng: &mut impl Rng, n: usize, k: usize) -> Vec<(Vertex, OutmapValue)> {
    let mut verts: Vec<Vertex> = (0..1 << n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..verts.len());
        verts.swap(i, j);
    }
    let mut pairs: Vec<_> = verts[..k]
        .iter()
        .map(|&u| (u, rng.gen_range(0..1u32 << n)))
        .collect();
    pairs.sort_unstable();
    pairs
}

#[test]
fn no_3_certificates_up_to_n3() {
    let cfg = CompletionConfig::default();
    let mut checked = 0;
    for n in 2..=3usize {
        let size = 1u32 << n;
        for a in 0..size {
            for b in a + 1..size {
                for c in b + 1..size {
                    for code in 0..1u32 << (3 * n) {
                        let m = size - 1;
                        let w = n as u32;
                        let pairs = [(a, code & m), (b, code >> w & m), (c, code >> (2 * w) & m)];
                        if !no_clash(&pairs) {
                            continue;
                        }
                        let s = PartialOutmapTable::from_pairs(n, &pairs).unwrap();
                        assert!(is_completable(&s, &cfg), "{pairs:?}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 5_000);
}

#[test]
fn no_3_certificates_random_n4() {
    let cfg = CompletionConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 10_000 {
        let pairs = random_partial(&mut rng, 4, 3);
        if !no_clash(&pairs) {
            continue;
        }
        let s = PartialOutmapTable::from_pairs(4, &pairs).unwrap();
        assert!(is_completable(&s, &cfg), "{pairs:?}");
        checked += 1;
    }
}

#[test]
fn reduce_preserves_completability() {
    let cfg = CompletionConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut non_completable = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=(1usize << n).min(6));
        let pairs = random_partial(&mut rng, n, k);
        let s = PartialOutmapTable::from_pairs(n, &pairs).unwrap();
        let r = reduce(&s).unwrap();
        assert!(r.dim() <= n);
        let want = is_completable(&s, &cfg);
        assert_eq!(is_completable(&r, &cfg), want, "{pairs:?}");
        non_completable += usize::from(!want);
    }
    assert!(non_completable > 0);
}

#[test]
fn spanned_and_projectable_by_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=(1usize << n).min(5));
        let pairs = random_partial(&mut rng, n, k);
        let s = PartialOutmapTable::from_pairs(n, &pairs).unwrap();
        for i in 0..n {
            let bit = 1u32 << i;
            let spanned = pairs
                .iter()
                .any(|&(u, _)| pairs.iter().any(|&(v, _)| (u ^ v) & bit != 0));
            let projectable = pairs
                .iter()
                .all(|&(_, a)| pairs.iter().all(|&(_, b)| (a ^ b) & bit == 0));
            assert_eq!(spanned_dims(&s) & bit != 0, spanned);
            assert_eq!(projectable_dims(&s) & bit != 0, projectable);
        }
    }
    let point = PartialOutmapTable::from_pairs(3, &[(5, 1)]).unwrap();
    assert_eq!(spanned_dims(&point), 0);
}

#[test]
fn extend_never_creates_a_clash() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 10_000 {
        let n = rng.gen_range(2..=6);
        let pairs = random_partial(&mut rng, n, 2);
        let [(u, su), (v, sv)] = [pairs[0], pairs[1]];
        if clash(u, su, v, sv).unwrap() {
            continue;
        }
        let i = rng.gen_range(0..n);
        let e = 1u32 << i;
        if (su ^ sv) & (u ^ v) == e || u ^ e == v {
            continue;
        }
        assert!(
            !clash(u ^ e, su ^ e, v, sv).unwrap(),
            "{u} {su} {v} {sv} {i}"
        );
        checked += 1;
    }
}

#[test]
fn family_is_a_certificate() {
    let cfg = CompletionConfig {
        dim_limit: 5,
        node_limit: None,
    };
    for n in 3..=5 {
        let s = family_certificate(n).unwrap();
        assert_eq!(s.known_count(), n + 1);
        assert!(no_clash(&s.known()));
        assert_eq!(spanned_dims(&s), (1 << n) - 1);
        assert!(is_k_certificate(&s, &cfg).unwrap(), "n={n}");
    }
    assert!(family_certificate(2).is_err());
}

#[test]
fn two_classes_of_4_certificates() {
    let classes = enumerate_4_certificates().unwrap();
    assert_eq!(classes.len(), 2);
    let dist = |a: Vertex, b: Vertex| (a ^ b).count_ones();
    let profile = |s: &PartialOutmapTable| {
        let k = s.known();
        let mut d: Vec<u32> = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .map(|(i, j)| dist(k[i].0, k[j].0))
            .collect();
        d.sort_unstable();
        d
    };
    let mut profiles: Vec<Vec<u32>> = classes.iter().map(profile).collect();
    profiles.sort();
    assert_eq!(
        profiles,
        vec![vec![1, 1, 2, 2, 3, 3], vec![2, 2, 2, 2, 2, 2]]
    );
}

#[test]
fn puso_scan_matches_brute_force() {
    let scan = puso_scan(3).unwrap();
    let brute: Vec<OutmapTable> = (0..1u32 << 24)
        .map(|c| OutmapTable::from_fn(3, |u| c >> (3 * u) & 7).unwrap())
        .filter(is_puso)
        .collect();
    assert_eq!(scan.tables, brute);
    assert_eq!(scan.tables.len(), 16);
    assert_eq!(scan.classes.len(), 2);
    for t in &scan.tables {
        let pairs = clashing_pairs(t);
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|&(u, v)| u ^ v == 7));
    }
    // under automorphisms and edge flips both classes merge
    let group = cube_group(3);
    let flipped = |t: &OutmapTable, z: u32| OutmapTable::from_fn(3, |u| t.get(u) ^ z).unwrap();
    let a = &scan.classes[0];
    assert!((0..8).any(|z| group
        .iter()
        .any(|g| g.table(&flipped(a, z)) == scan.classes[1])));
}

proptest! {
    #[test]
    fn witness_agrees_with_input(n in 1usize..=4, seed in any::<u64>(), k in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = random_partial(&mut rng, n, k.min(1 << n));
        let s = PartialOutmapTable::from_pairs(n, &pairs).unwrap();
        // is_completable asserts the witness and the certificate
        let done = is_completable(&s, &CompletionConfig::default());
        if !no_clash(&pairs) {
            prop_assert!(!done);
        }
    }
}
