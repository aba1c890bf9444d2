//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. A failing criterion is reported but does
//! not fail the process unless `ACCEPTANCE_STRICT=1` is set. Set
//! `ACCEPTANCE_LP3_SOLUTION=path` to check an externally computed solution of
//! the symmetric n = 3 LP.

use std::collections::HashSet;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uso_core::certificates::{
    clashing_pairs, completable, enumerate_4_certificates, family_certificate, is_k_certificate,
    is_puso, puso_scan, CertificateReport, CompletionConfig,
};
use uso_core::constructions::{
    flip_matching, flippable_edges, hypervertex_replace, inherited, is_hypervertex, partial_swap,
    product, random_uso, xor_relabel,
};
use uso_core::cube::clash;
use uso_core::game::{compute_t, GameConfig, TValue};
use uso_core::lp::{
    check_solution, generate_lp, parse_solution, solve_exact, write_lp, LpMode, SimplexConfig,
};
use uso_core::resolution::{check_proof, cnf_generate, proof_generate, write_dimacs};
use uso_core::solvers::{
    product_solve, seesaw_solve, seven_steps_witness, verify_verdict, Algorithm, QueryOracle,
};
use uso_core::symmetry::cube_group;
use uso_core::{is_uso, is_uso_by_faces, FaceSpec, OutmapTable, PartialOutmapTable};

/// Reference optimum of the symmetric n = 3 LP and the allowed gap.
const LP3_OPTIMUM: f64 = 3.591333;
const LP3_OBJECTIVE_TOL: f64 = 1e-3;
const LP_FEASIBILITY_TOL: f64 = 1e-6;
/// Time budget for each of t(1), t(2), t(3).
const SMALL_T_BUDGET: Duration = Duration::from_secs(60);

/// Failed checks of one criterion, with notes for the report line.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn table(n: usize, code: u64) -> OutmapTable {
    let w = n as u64;
    OutmapTable::from_fn(n, |u| ((code >> (w * u as u64)) & ((1 << w) - 1)) as u32).unwrap()
}

fn all_usos(n: usize) -> Vec<OutmapTable> {
    (0..1u64 << (n << n))
        .map(|c| table(n, c))
        .filter(is_uso)
        .collect()
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

struct ByteCount(u64);

impl Write for ByteCount {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0 += buf.len() as u64;
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

fn small_values(r: &mut Report) {
    let cfg = GameConfig::default();
    let want = [2, 3, 5, 7];
    let mut got = Vec::new();
    for (n, &t) in (1..=4).zip(&want) {
        let start = Instant::now();
        let v = compute_t(n, 8, &cfg).unwrap();
        let took = start.elapsed();
        r.check(v == TValue::Exact(t), format!("t({n}) = {v:?}, want {t}"));
        if n < 4 {
            r.check(took <= SMALL_T_BUDGET, format!("t({n}) took {took:?}"));
        }
        got.push(format!("t({n})={v:?} in {:.2}s", took.as_secs_f64()));
    }
    r.note(got.join(", "));
}

fn lp_counts(lp: &uso_core::lp::LinearProgram) -> (usize, usize, usize) {
    (
        lp.num_variables(),
        lp.inequalities.len(),
        lp.equalities.len(),
    )
}

fn randomized_values(r: &mut Report) {
    let cfg = SimplexConfig::default();
    for (n, mode, want) in [
        (1, LpMode::Full, ratio(2, 1)),
        (1, LpMode::Symmetric, ratio(2, 1)),
        (2, LpMode::Full, ratio(46, 17)),
        (2, LpMode::Symmetric, ratio(46, 17)),
    ] {
        let lp = generate_lp(n, mode).unwrap();
        let got = solve_exact(&lp, &cfg).unwrap().objective;
        r.check(
            got == want,
            format!("optimum n={n} {mode:?} = {got}, want {want}"),
        );
    }

    let full2 = lp_counts(&generate_lp(2, LpMode::Full).unwrap());
    r.check(
        full2 == (225, 256, 141),
        format!("full n=2 sizes {full2:?}, want (225, 256, 141)"),
    );
    let sym2 = lp_counts(&generate_lp(2, LpMode::Symmetric).unwrap());
    r.check(
        sym2 == (43, 14, 20),
        format!("symmetric n=2 sizes {sym2:?}, want (43, 14, 20)"),
    );

    let start = Instant::now();
    let lp3 = generate_lp(3, LpMode::Symmetric).unwrap();
    let generated = start.elapsed();
    let sym3 = lp_counts(&lp3);
    r.check(
        sym3 == (87716, 352744, 57880),
        format!("symmetric n=3 sizes {sym3:?}, want (87716, 352744, 57880)"),
    );
    let mut sink = ByteCount(0);
    write_lp(&lp3, &mut sink).unwrap();
    r.note(format!(
        "n=3 generated in {:.1}s, export {} bytes in {:.1}s total",
        generated.as_secs_f64(),
        sink.0,
        start.elapsed().as_secs_f64()
    ));

    match std::env::var_os("ACCEPTANCE_LP3_SOLUTION") {
        None => r.note("no external n=3 solution supplied"),
        Some(path) => {
            let text = std::fs::read_to_string(&path).unwrap();
            let values = parse_solution(&text).unwrap();
            let rep = check_solution(&lp3, &values, LP_FEASIBILITY_TOL).unwrap();
            r.check(
                rep.feasible,
                format!("n=3 solution violates rows by {}", rep.max_violation),
            );
            r.check(
                (rep.objective - LP3_OPTIMUM).abs() <= LP3_OBJECTIVE_TOL,
                format!("n=3 objective {} vs {LP3_OPTIMUM}", rep.objective),
            );
            r.note(format!("n=3 external objective {}", rep.objective));
        }
    }
}

fn solver_bounds(r: &mut Report) {
    let mut worst = [0usize; 4];
    for code in 0..256 {
        let s = table(2, code);
        let mut o = QueryOracle::new(&s);
        let v = seesaw_solve(&mut o);
        r.check(
            verify_verdict(&s, &v),
            format!("seesaw wrong on n=2 table {code}"),
        );
        worst[2] = worst[2].max(v.queries);
        let mut o = QueryOracle::new(&s);
        let v = product_solve(&mut o, 1, &Algorithm::Seesaw);
        r.check(
            verify_verdict(&s, &v),
            format!("product wrong on n=2 table {code}"),
        );
        worst[0] = worst[0].max(v.queries);
    }
    for code in 0..1u64 << 24 {
        let s = table(3, code);
        let mut o = QueryOracle::new(&s);
        let v = seesaw_solve(&mut o);
        if !verify_verdict(&s, &v) {
            r.check(false, format!("seesaw wrong on n=3 table {code}"));
            break;
        }
        worst[3] = worst[3].max(v.queries);
    }
    r.check(
        worst[2] <= 3,
        format!("seesaw used {} queries at n=2", worst[2]),
    );
    r.check(
        worst[3] <= 5,
        format!("seesaw used {} queries at n=3", worst[3]),
    );
    r.check(
        worst[0] <= 4,
        format!("product used {} queries at n=2", worst[0]),
    );
    r.note(format!(
        "worst queries: seesaw n=2 {}, n=3 {}; product n=2 {}",
        worst[2], worst[3], worst[0]
    ));
}

fn resolution_suite(r: &mut Report) {
    let sizes = [2, 14, 102, 1046, 18294];
    let widths = [2, 4, 6, 9, 13];
    let mut got_w = Vec::new();
    for n in 1..=5 {
        let f = cnf_generate(n).unwrap();
        let p = proof_generate(n).unwrap();
        r.check(check_proof(&f, &p).is_ok(), format!("proof n={n} rejected"));
        r.check(
            p.size() == sizes[n - 1],
            format!("size n={n} = {}", p.size()),
        );
        r.check(
            p.width() == widths[n - 1],
            format!("width n={n} = {}, want {}", p.width(), widths[n - 1]),
        );
        r.check(
            p.conclusion().is_some_and(|c| c.is_empty()),
            format!("proof n={n} does not end in the empty clause"),
        );
        got_w.push(p.width().to_string());
    }
    for (n, head) in [(1, "p cnf 2 4\n"), (3, "p cnf 24 112\n")] {
        let mut buf = Vec::new();
        write_dimacs(&cnf_generate(n).unwrap(), &mut buf).unwrap();
        r.check(
            buf.starts_with(head.as_bytes()),
            format!("DIMACS header n={n}"),
        );
    }
    r.note(format!("widths {}", got_w.join(" ")));
}

fn certificate_suite(r: &mut Report) {
    let cfg = CompletionConfig::default();
    let mut triples = 0;
    for a in 0..8u32 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                for code in 0..1u32 << 9 {
                    let pairs = [(a, code & 7), (b, code >> 3 & 7), (c, code >> 6 & 7)];
                    let clash_free = (0..3).all(|i| {
                        (i + 1..3).all(|j| {
                            !clash(pairs[i].0, pairs[i].1, pairs[j].0, pairs[j].1).unwrap()
                        })
                    });
                    if !clash_free {
                        continue;
                    }
                    let s = PartialOutmapTable::from_pairs(3, &pairs).unwrap();
                    let ok = matches!(
                        completable(&s, &cfg).unwrap(),
                        CertificateReport::Completable(_)
                    );
                    r.check(ok, format!("3-certificate {pairs:?}"));
                    triples += 1;
                }
            }
        }
    }
    let cfg5 = CompletionConfig {
        dim_limit: 5,
        node_limit: None,
    };
    for n in 3..=5 {
        let s = family_certificate(n).unwrap();
        r.check(
            is_k_certificate(&s, &cfg5).unwrap(),
            format!("family n={n} is not a certificate"),
        );
    }
    let classes = enumerate_4_certificates().unwrap().len();
    r.check(classes == 2, format!("{classes} classes of 4-certificates"));

    let scan = puso_scan(3).unwrap();
    let brute = (0..1u64 << 24).filter(|&c| is_puso(&table(3, c))).count();
    r.check(
        brute == scan.tables.len(),
        format!("scan {} vs brute force {brute}", scan.tables.len()),
    );
    r.check(
        scan.classes.len() == 2,
        format!("{} PUSOs up to isomorphism", scan.classes.len()),
    );
    let antipodal = scan
        .tables
        .iter()
        .all(|t| clashing_pairs(t).iter().all(|&(u, v)| u ^ v == 7));
    r.check(antipodal, "a PUSO has a non-antipodal clash");
    r.note(format!(
        "{triples} clash-free triples, {classes} classes, {} PUSO tables in {} classes",
        scan.tables.len(),
        scan.classes.len()
    ));
}

fn oracle_equivalences(r: &mut Report) {
    for code in 0..256 {
        let s = table(2, code);
        r.check(
            is_uso(&s) == is_uso_by_faces(&s).unwrap(),
            format!("n=2 table {code}"),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100_000 {
        let code = rng.gen::<u64>() & ((1 << 24) - 1);
        let s = table(3, code);
        r.check(
            is_uso(&s) == is_uso_by_faces(&s).unwrap(),
            format!("n=3 table {code}"),
        );
    }
    let counts: Vec<usize> = (1..=3).map(|n| all_usos(n).len()).collect();
    r.check(counts == [2, 12, 744], format!("USO counts {counts:?}"));

    let usos = all_usos(3);
    let lines = all_usos(1);
    let squares = all_usos(2);
    let mut bad = HashSet::new();
    for s in &usos {
        for z in 0..8 {
            if !is_uso(&xor_relabel(s, z).unwrap()) {
                bad.insert("xor_relabel");
            }
        }
        for dims in 1..8u32 {
            if !is_uso(&inherited(s, dims).unwrap()) {
                bad.insert("inherited");
            }
        }
        for dim in 1..=3 {
            if !is_uso(&partial_swap(s, dim).unwrap()) {
                bad.insert("partial_swap");
            }
        }
        for e in flippable_edges(s) {
            if !is_uso(&flip_matching(s, &[e]).unwrap()) {
                bad.insert("flip_matching");
            }
        }
        for dims in [1u32, 2, 4, 3, 5, 6] {
            let inner = if dims.count_ones() == 1 {
                &lines
            } else {
                &squares
            };
            for base in 0..8 {
                let f = FaceSpec::new(3, base & !dims, dims).unwrap();
                if !is_hypervertex(s, &f) {
                    continue;
                }
                for t in inner {
                    if !is_uso(&hypervertex_replace(s, &f, t).unwrap()) {
                        bad.insert("hypervertex_replace");
                    }
                }
            }
        }
        for g in cube_group(3) {
            if !is_uso(&g.table(s)) {
                bad.insert("automorphism");
            }
        }
    }
    for outer in &squares {
        for k in 0..16u32 {
            let inner: Vec<_> = (0..4)
                .map(|i| lines[(k >> i & 1) as usize].clone())
                .collect();
            if !is_uso(&product(outer, &inner).unwrap()) {
                bad.insert("product");
            }
        }
    }
    let mut bad: Vec<_> = bad.into_iter().collect();
    bad.sort_unstable();
    r.check(bad.is_empty(), format!("not preserved: {bad:?}"));
    r.note(format!("USO counts {counts:?}"));
}

fn seven_steps(r: &mut Report) {
    let w = seven_steps_witness();
    let known = w.known();
    r.check(w.dim() == 4, "witness is not 4-dimensional");
    r.check(
        known.len() == 7,
        format!("witness has {} known vertices", known.len()),
    );
    r.check(known.iter().all(|&(_, a)| a != 0), "witness has a sink");
    for (i, &(u, a)) in known.iter().enumerate() {
        for &(v, b) in &known[i + 1..] {
            r.check(!clash(u, a, v, b).unwrap(), format!("{u} and {v} clash"));
        }
    }
    r.note(format!(
        "{} known vertices in dimension {}, no sink, no clash",
        known.len(),
        w.dim()
    ));
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn uso(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_uso"))
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success(), "{args:?}");
    out.stdout
}

fn reproducibility(r: &mut Report) {
    let dir = std::env::temp_dir().join(format!("uso-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let uso3 = golden("uso3_seed7.txt");
    let uso3 = uso3.to_str().unwrap();
    let invocations: Vec<Vec<String>> = [
        vec!["--seed", "7", "gen", "--n", "3"],
        vec!["--seed", "99", "gen", "--n", "6"],
        vec!["gen", "--witness"],
        vec!["verify", "--in", uso3],
        vec!["solve", "--algo", "seesaw", "--in", uso3],
        vec!["solve", "--algo", "product:1", "--in", uso3],
        vec!["game", "--n", "3", "--q", "4"],
        vec!["lp", "--n", "2", "--symmetric", "--solve"],
        vec!["proof", "--n", "3", "--check"],
        vec!["cert", "--enumerate4"],
    ]
    .iter()
    .map(|a| a.iter().map(|s| s.to_string()).collect())
    .collect();
    for args in &invocations {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        r.check(
            uso(&args) == uso(&args),
            format!("`uso {}` differs between runs", args.join(" ")),
        );
    }

    let files = [
        ("f2.cnf", vec!["proof", "--n", "2", "--emit-cnf"]),
        ("p2.txt", vec!["proof", "--n", "2", "--emit-proof"]),
        ("lp1_full.lp", vec!["lp", "--n", "1", "--export"]),
        (
            "lp2_symmetric.lp",
            vec!["lp", "--n", "2", "--symmetric", "--export"],
        ),
    ];
    for (name, args) in files {
        let out = path(name);
        let mut args = args.clone();
        args.push(&out);
        uso(&args);
        let got = std::fs::read(&out).unwrap();
        r.check(
            got == std::fs::read(golden(name)).unwrap(),
            format!("{name} differs from golden"),
        );
    }
    for (name, args) in [
        ("uso3_seed7.txt", vec!["--seed", "7", "gen", "--n", "3"]),
        ("seven_steps.txt", vec!["gen", "--witness"]),
    ] {
        r.check(
            uso(&args) == std::fs::read(golden(name)).unwrap(),
            format!("{name} differs from golden"),
        );
    }
    // library rendering agrees with the CLI
    let lib = random_uso(3, 7).unwrap().to_string();
    r.check(
        lib.as_bytes() == std::fs::read(golden("uso3_seed7.txt")).unwrap(),
        "random_uso(3, 7) text",
    );
    let _ = std::fs::remove_dir_all(&dir);
    r.note(format!(
        "{} invocations repeated, 6 golden files",
        invocations.len()
    ));
}

type Criterion = (&'static str, fn(&mut Report));

fn main() {
    let criteria: [Criterion; 8] = [
        ("deterministic small-dimension values", small_values),
        ("randomized values and LP sizes", randomized_values),
        ("solver totality and bounds", solver_bounds),
        ("resolution suite", resolution_suite),
        ("certificate suite", certificate_suite),
        ("oracle equivalences", oracle_equivalences),
        ("seven-step witness", seven_steps),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut r = Report::default();
        run(&mut r);
        let verdict = if r.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        failed += usize::from(!r.failures.is_empty());
        let mut detail = r.notes.clone();
        detail.extend(r.failures.iter().take(5).cloned());
        if r.failures.len() > 5 {
            detail.push(format!("{} more failures", r.failures.len() - 5));
        }
        println!(
            "criterion {}: {verdict} {name} [{:.1}s] {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            detail.join("; ")
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
