use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use uso_core::certificates::{
    clashing_pairs, classify, enumerate_4_certificates, family_certificate, is_k_certificate,
    puso_scan, CertificateReport, CompletionConfig,
};
use uso_core::constructions::random_uso;
use uso_core::cube::fmt_bits;
use uso_core::game::{compute_t, player_wins_with, GameConfig, TValue};
use uso_core::lp::{
    check_solution, generate_lp, parse_solution, solve_exact, write_lp, LpMode, SimplexConfig,
};
use uso_core::resolution::{
    check_proof, cnf_generate, parse_proof, proof_generate, write_dimacs, write_proof,
};
use uso_core::solvers::{
    seven_steps_witness, solve, verify_verdict, Algorithm, QueryOracle, VerdictKind,
};
use uso_core::{find_clash, is_uso, OutmapTable, PartialOutmapTable, Vertex};

/// Unique sink orientations and the Sink-or-Clash problem.
#[derive(Parser, Debug)]
#[command(name = "uso", version)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Wall-clock limit in seconds for long searches.
    #[arg(long, global = true)]
    time_limit: Option<f64>,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check whether an outmap file is a USO.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a Sink-or-Clash algorithm against an outmap file.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        /// `seesaw` or `product:K`.
        #[arg(long, default_value = "seesaw")]
        algo: String,
    },
    /// Deterministic query game.
    Game(GameArgs),
    /// Randomized-complexity linear program.
    Lp(LpArgs),
    /// CNF formula and resolution refutation.
    Proof(ProofArgs),
    /// Completability and certificates.
    Cert(CertArgs),
    /// Emit fixtures in the outmap text format.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct GameArgs {
    #[arg(long)]
    n: usize,
    /// Query budget.
    #[arg(long)]
    q: Option<usize>,
    /// Smallest winning budget, trying budgets up to --q (default 13).
    #[arg(long, conflicts_with = "lower_bound")]
    exact: bool,
    /// Report `t(n) > q` when the player loses with budget --q.
    #[arg(long, requires = "q")]
    lower_bound: bool,
}

#[derive(Args, Debug)]
struct LpArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    symmetric: bool,
    /// Solve exactly; the optimum is printed as `p/q`.
    #[arg(long)]
    solve: bool,
    #[arg(long, value_name = "PATH")]
    export: Option<PathBuf>,
    /// Evaluate a `name value` solution file against the model.
    #[arg(long, value_name = "PATH")]
    check_solution: Option<PathBuf>,
    /// Feasibility tolerance for --check-solution.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct ProofArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_name = "PATH")]
    emit_cnf: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    emit_proof: Option<PathBuf>,
    /// Check a proof file against the formula, or the generated proof when
    /// no file is given.
    #[arg(long, value_name = "PATH", num_args = 0..=1)]
    check: Option<Option<PathBuf>>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct CertArgs {
    /// Classify a partial outmap file.
    #[arg(long, value_name = "FILE")]
    check: Option<PathBuf>,
    /// The non-completable family with n + 1 known vertices.
    #[arg(long, value_name = "N")]
    family: Option<usize>,
    /// Classes of 4-certificates in dimension 3.
    #[arg(long)]
    enumerate4: bool,
    /// All PUSOs of dimension N.
    #[arg(long, value_name = "N")]
    puso_scan: Option<usize>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GenArgs {
    /// A pseudo-random USO of this dimension, from --seed.
    #[arg(long)]
    n: Option<usize>,
    /// The seven-step partial outmap.
    #[arg(long)]
    witness: bool,
}

struct Ctx {
    seed: u64,
    time_limit: Option<Duration>,
    threads: usize,
}

fn bits_of(known: &[(Vertex, u32)], n: usize) -> Value {
    known
        .iter()
        .map(|&(u, a)| json!([fmt_bits(u, n), fmt_bits(a, n)]))
        .collect()
}

fn read_table(path: &Path) -> Result<OutmapTable> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse()
        .with_context(|| format!("parsing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn parse_algo(s: &str) -> Result<Algorithm> {
    match s.split_once(':') {
        None if s == "seesaw" => Ok(Algorithm::Seesaw),
        Some(("product", k)) => {
            let k: usize = k
                .parse()
                .with_context(|| format!("bad product split `{k}`"))?;
            Ok(Algorithm::product(k, Algorithm::Seesaw))
        }
        _ => bail!("unknown algorithm `{s}` (expected seesaw or product:K)"),
    }
}

fn verify(input: &Path) -> Result<Value> {
    let s = read_table(input)?;
    if is_uso(&s) {
        return Ok(json!({ "uso": true }));
    }
    let n = s.dim();
    let (u, v) = find_clash(&s).expect("non-USO has a clash");
    Ok(json!({ "uso": false, "clash": [fmt_bits(u, n), fmt_bits(v, n)] }))
}

fn run_solve(input: &Path, algo: &str) -> Result<Value> {
    let alg = parse_algo(algo)?;
    let s = read_table(input)?;
    let n = s.dim();
    let mut oracle = QueryOracle::new(&s);
    let v = solve(&alg, &mut oracle);
    let verified = verify_verdict(&s, &v);
    let mut out = match v.kind {
        VerdictKind::Sink(u) => json!({ "verdict": "sink", "vertex": fmt_bits(u, n) }),
        VerdictKind::Clash(a, b) => {
            json!({ "verdict": "clash", "vertices": [fmt_bits(a, n), fmt_bits(b, n)] })
        }
    };
    out["queries"] = json!(v.queries);
    out["verified"] = json!(verified);
    if !verified {
        bail!("solver returned an unverified verdict: {out}");
    }
    Ok(out)
}

fn game(a: &GameArgs, ctx: &Ctx) -> Result<Value> {
    let cfg = GameConfig {
        time_limit: ctx.time_limit,
        threads: ctx.threads,
        ..GameConfig::default()
    };
    let start = Instant::now();
    let out = match a.q {
        Some(q) if !a.exact => {
            let r = player_wins_with(a.n, q, &cfg)?;
            let mut out = json!({
                "n": a.n,
                "q": q,
                "player_wins": r.player_wins,
                "nodes": r.stats.nodes,
                "table_hits": r.stats.table_hits,
                "table_size": r.stats.table_size,
            });
            if a.lower_bound {
                out["lower_bound"] = if r.player_wins {
                    Value::Null
                } else {
                    json!(q + 1)
                };
            }
            out
        }
        cap => match compute_t(a.n, cap.unwrap_or(13), &cfg)? {
            TValue::Exact(t) => json!({ "n": a.n, "t": t }),
            TValue::AtLeast(t) => json!({ "n": a.n, "t_at_least": t }),
        },
    };
    // timings go to stderr so that stdout stays reproducible
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    Ok(out)
}

fn lp(a: &LpArgs) -> Result<Value> {
    let mode = if a.symmetric {
        LpMode::Symmetric
    } else {
        LpMode::Full
    };
    let model = generate_lp(a.n, mode)?;
    let mut out = json!({
        "n": a.n,
        "mode": if a.symmetric { "symmetric" } else { "full" },
        "variables": model.num_variables(),
        "inequalities": model.inequalities.len(),
        "equalities": model.equalities.len(),
        "nonzeros": model.num_nonzeros(),
    });
    if let Some(path) = &a.export {
        let mut w = create(path)?;
        write_lp(&model, &mut w)?;
        w.flush()?;
    }
    if a.solve {
        let sol = solve_exact(&model, &SimplexConfig::default())?;
        out["optimum"] = json!(sol.objective.to_string());
        out["pivots"] = json!(sol.iterations);
    }
    if let Some(path) = &a.check_solution {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let values = parse_solution(&text)?;
        let r = check_solution(&model, &values, a.tolerance)?;
        out["solution"] = json!({
            "objective": r.objective,
            "max_violation": r.max_violation,
            "missing": r.missing,
            "feasible": r.feasible,
        });
    }
    Ok(out)
}

fn proof(a: &ProofArgs) -> Result<Value> {
    let f = cnf_generate(a.n)?;
    let mut out = json!({
        "n": a.n,
        "variables": f.num_variables(),
        "clauses": f.clauses().len(),
    });
    if let Some(path) = &a.emit_cnf {
        write_dimacs(&f, create(path)?)?;
    }
    let generated = if a.emit_proof.is_some() || matches!(a.check, Some(None)) {
        Some(proof_generate(a.n)?)
    } else {
        None
    };
    if let (Some(path), Some(p)) = (&a.emit_proof, &generated) {
        write_proof(p, create(path)?)?;
    }
    let checked = match &a.check {
        None => None,
        Some(None) => generated,
        Some(Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(parse_proof(&text).with_context(|| format!("parsing {}", path.display()))?)
        }
    };
    if let Some(p) = checked {
        out["size"] = json!(p.size());
        out["width"] = json!(p.width());
        if let Err(fault) = check_proof(&f, &p) {
            bail!("proof rejected: {fault}");
        }
        out["valid"] = json!(true);
    }
    Ok(out)
}

fn report(r: &CertificateReport, n: usize) -> Value {
    match r {
        CertificateReport::Completable(t) => json!({
            "verdict": "completable",
            "witness": t.values().iter().map(|&x| fmt_bits(x, n)).collect::<Vec<_>>(),
        }),
        CertificateReport::NonCompletable(c) => json!({
            "verdict": "non_completable",
            "certificate": bits_of(&c.known(), n),
        }),
        CertificateReport::KCertificate(k) => json!({ "verdict": "k_certificate", "k": k }),
    }
}

fn cert(a: &CertArgs) -> Result<Value> {
    if let Some(path) = &a.check {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let s: PartialOutmapTable = text
            .parse()
            .with_context(|| format!("parsing {}", path.display()))?;
        let cfg = CompletionConfig::default();
        let mut out = report(&classify(&s, &cfg)?, s.dim());
        out["n"] = json!(s.dim());
        out["known"] = json!(s.known_count());
        return Ok(out);
    }
    if let Some(n) = a.family {
        let s = family_certificate(n)?;
        let cfg = CompletionConfig {
            dim_limit: 5,
            node_limit: None,
        };
        let certified = if n <= cfg.dim_limit {
            json!(is_k_certificate(&s, &cfg)?)
        } else {
            Value::Null
        };
        return Ok(json!({
            "n": n,
            "known": bits_of(&s.known(), n),
            "is_certificate": certified,
        }));
    }
    if a.enumerate4 {
        let classes = enumerate_4_certificates()?;
        let reps: Vec<Value> = classes.iter().map(|s| bits_of(&s.known(), 3)).collect();
        return Ok(json!({ "n": 3, "classes": classes.len(), "representatives": reps }));
    }
    let n = a.puso_scan.expect("clap requires one option");
    let scan = puso_scan(n)?;
    let antipodal = scan.tables.iter().all(|t| {
        clashing_pairs(t)
            .iter()
            .all(|&(u, v)| u ^ v == (1 << n) - 1)
    });
    let reps: Vec<Vec<String>> = scan
        .classes
        .iter()
        .map(|t| t.values().iter().map(|&x| fmt_bits(x, n)).collect())
        .collect();
    Ok(json!({
        "n": n,
        "pusos": scan.tables.len(),
        "classes": scan.classes.len(),
        "representatives": reps,
        "only_antipodal_clashes": antipodal,
    }))
}

fn gen(a: &GenArgs, ctx: &Ctx) -> Result<String> {
    if a.witness {
        return Ok(seven_steps_witness().to_string());
    }
    let n = a.n.expect("clap requires one option");
    Ok(random_uso(n, ctx.seed)?.to_string())
}

fn run(cli: &Cli) -> Result<()> {
    let ctx = Ctx {
        seed: cli.seed,
        time_limit: cli.time_limit.map(Duration::from_secs_f64),
        threads: cli.threads,
    };
    let value = match &cli.cmd {
        Cmd::Verify { input } => verify(input)?,
        Cmd::Solve { input, algo } => run_solve(input, algo)?,
        Cmd::Game(a) => game(a, &ctx)?,
        Cmd::Lp(a) => lp(a)?,
        Cmd::Proof(a) => proof(a)?,
        Cmd::Cert(a) => cert(a)?,
        Cmd::Gen(a) => {
            print!("{}", gen(a, &ctx)?);
            return Ok(());
        }
    };
    println!("{value}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    if cli.time_limit.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
        eprintln!("error: --time-limit must be a positive number of seconds");
        return ExitCode::from(2);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .expect("thread pool");
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
