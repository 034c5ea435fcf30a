//! Command implementations behind the `cyclohecke` binary.
//!
//! Exit-code contract: 0 on success, 2 on configuration errors, 3 on
//! verification failures or internal arithmetic failures. All primary output
//! is JSON on stdout (CSV for period sweep tables); logs go to stderr.
//! Identical configuration and seed produce byte-identical output for every
//! command except `bench`, whose payload contains wall-clock timings.

use clap::{Parser, Subcommand, ValueEnum};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use cyclohecke::hecke::{AlgebraElement, AlgebraParams, Flavor};
use cyclohecke::idempotents::verify_idempotent_system;
use cyclohecke::periodicity::{verify_periodicity, PeriodReport};
use cyclohecke::regrep::RegularRep;
use cyclohecke::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    #[value(name = "deg")]
    Deg,
    #[value(name = "nondeg")]
    Nondeg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "cyclohecke",
    about = "Exact computations in degenerate and non-degenerate cyclotomic Hecke algebras over GF(p^k)",
    version
)]
pub struct Cli {
    /// Algebra flavor: deg (q = 1) or nondeg (q != 1).
    #[arg(long, global = true, value_enum)]
    pub flavor: Option<FlavorArg>,

    /// Field characteristic (prime).
    #[arg(long, global = true)]
    pub p: Option<u64>,

    /// Quantum characteristic (non-degenerate only; deg forces e = p).
    #[arg(long, global = true)]
    pub e: Option<u64>,

    /// Number of strands.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Multicharge: comma-separated residues mod e (a multiset; order is
    /// irrelevant and canonicalized ascending).
    #[arg(long, global = true, value_delimiter = ',')]
    pub kappa: Option<Vec<u64>>,

    /// Output format (csv only affects period sweep tables).
    #[arg(long = "out", global = true, value_enum, default_value = "json")]
    pub out: OutFormat,

    /// Seed for the randomized property samples inside `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Refuse regular representations larger than this dimension.
    #[arg(long = "size-cap", global = true)]
    pub size_cap: Option<u64>,

    /// Period sweep, e.g. --sweep n=1..3 (periods command only).
    #[arg(long, global = true)]
    pub sweep: Option<String>,

    /// Test fixture: corrupt one generator matrix entry so that the
    /// verification gates demonstrably fail.
    #[arg(long = "mutation-fixture", global = true, hide = true)]
    pub mutation_fixture: bool,

    /// Debug: include the generator matrices in `verify` output.
    #[arg(long = "dump-matrices", global = true)]
    pub dump_matrices: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Compute the idempotent system and cross-check all three constructions.
    Idempotents,
    /// Compute and verify the Jucys-Murphy periodicity data.
    Periods,
    /// Run every verification suite on the configured instance.
    Verify,
    /// Time the three idempotent constructions (requires their agreement).
    Bench,
    /// Print the algebra dimension and the size-cap verdict.
    Dims,
}

/// Stdout payload plus the success verdict for one command run.
pub struct CmdOutput {
    pub body: String,
    pub pass: bool,
}

/// Runs a parsed command line; `Err` carries the exit code.
pub fn run(cli: &Cli) -> Result<CmdOutput, i32> {
    let params = build_params(cli)?;
    match cli.command {
        Command::Dims => cmd_dims(cli, &params),
        Command::Idempotents => cmd_idempotents(cli, &params),
        Command::Periods => cmd_periods(cli, &params),
        Command::Verify => cmd_verify(cli, &params),
        Command::Bench => cmd_bench(cli, &params),
    }
}

fn config_err(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_CONFIG
}

fn map_core_err(err: Error) -> i32 {
    let code = match err {
        Error::NonNilpotent { .. } | Error::NoRepeatWithinBound { .. } => EXIT_VERIFY,
        _ => EXIT_CONFIG,
    };
    eprintln!("error: {err}");
    code
}

fn build_params(cli: &Cli) -> Result<AlgebraParams, i32> {
    let flavor = match cli
        .flavor
        .ok_or_else(|| config_err("--flavor is required"))?
    {
        FlavorArg::Deg => Flavor::Degenerate,
        FlavorArg::Nondeg => Flavor::NonDegenerate,
    };
    let p = cli.p.ok_or_else(|| config_err("--p is required"))?;
    let n = cli.n.ok_or_else(|| config_err("--n is required"))?;
    let kappa = cli
        .kappa
        .clone()
        .ok_or_else(|| config_err("--kappa is required"))?;
    AlgebraParams::from_characteristics(flavor, p, cli.e, n, &kappa).map_err(map_core_err)
}

fn build_rep(cli: &Cli, params: &AlgebraParams) -> Result<RegularRep, i32> {
    let mut rep = RegularRep::build(params, cli.size_cap).map_err(map_core_err)?;
    if cli.mutation_fixture {
        rep.corrupt_for_mutation_testing();
    }
    Ok(rep)
}

fn params_json(params: &AlgebraParams) -> serde_json::Value {
    serde_json::json!({
        "flavor": params.flavor(),
        "p": params.p(),
        "k": params.field().k(),
        "e": params.e(),
        "n": params.n(),
        "kappa": params.kappa(),
    })
}

fn cmd_dims(cli: &Cli, params: &AlgebraParams) -> Result<CmdOutput, i32> {
    let cap = cli.size_cap.unwrap_or(cyclohecke::regrep::DEFAULT_SIZE_CAP);
    let dim = params.dim();
    let body = serde_json::json!({
        "v": 1,
        "params": params_json(params),
        "dim": dim,
        "size_cap": cap,
        "within_cap": dim.is_some_and(|d| d <= cap),
    });
    Ok(CmdOutput {
        body: body.to_string(),
        pass: true,
    })
}

fn cmd_idempotents(cli: &Cli, params: &AlgebraParams) -> Result<CmdOutput, i32> {
    let rep = build_rep(cli, params)?;
    let report = verify_idempotent_system(&rep).map_err(map_core_err)?;
    Ok(CmdOutput {
        pass: report.all_pass(),
        body: report.to_json(false).to_string(),
    })
}

fn cmd_periods(cli: &Cli, params: &AlgebraParams) -> Result<CmdOutput, i32> {
    let sweep = match &cli.sweep {
        None => None,
        Some(spec) => Some(parse_sweep(spec)?),
    };
    let mut runs: Vec<(AlgebraParams, Vec<PeriodReport>)> = Vec::new();
    match sweep {
        None => {
            let rep = build_rep(cli, params)?;
            runs.push((
                params.clone(),
                verify_periodicity(&rep).map_err(map_core_err)?,
            ));
        }
        Some((lo, hi)) => {
            for n in lo..=hi {
                let swept = AlgebraParams::from_characteristics(
                    params.flavor(),
                    params.p(),
                    Some(params.e()),
                    n,
                    params.kappa(),
                )
                .map_err(map_core_err)?;
                let rep = build_rep(cli, &swept)?;
                runs.push((swept, verify_periodicity(&rep).map_err(map_core_err)?));
            }
        }
    }
    let pass = runs
        .iter()
        .all(|(_, reports)| reports.iter().all(|r| r.verdict));
    let body = match cli.out {
        OutFormat::Csv => {
            let mut lines = vec![PeriodReport::csv_header().to_string()];
            for (params, reports) in &runs {
                for r in reports {
                    lines.push(r.csv_row(params));
                }
            }
            lines.join("\n")
        }
        OutFormat::Json => {
            let runs_json: Vec<serde_json::Value> = runs
                .iter()
                .map(|(params, reports)| {
                    serde_json::json!({
                        "params": params_json(params),
                        "reports": reports,
                    })
                })
                .collect();
            serde_json::json!({ "v": 1, "runs": runs_json }).to_string()
        }
    };
    Ok(CmdOutput { body, pass })
}

fn parse_sweep(spec: &str) -> Result<(usize, usize), i32> {
    let parse = || -> Option<(usize, usize)> {
        let rest = spec.strip_prefix("n=")?;
        let (lo, hi) = rest.split_once("..")?;
        let lo: usize = lo.parse().ok()?;
        let hi: usize = hi.parse().ok()?;
        (lo >= 1 && lo <= hi).then_some((lo, hi))
    };
    parse().ok_or_else(|| config_err("--sweep expects the form n=<lo>..<hi> with 1 <= lo <= hi"))
}

fn cmd_verify(cli: &Cli, params: &AlgebraParams) -> Result<CmdOutput, i32> {
    let rep = build_rep(cli, params)?;
    let mut sections: Vec<(String, bool)> = Vec::new();

    // Defining relations in the regular representation.
    let relations = rep.relation_check();
    sections.push(("relations".into(), relations.all_pass()));

    // Dimension count.
    sections.push(("dimension".into(), Some(rep.dim() as u64) == params.dim()));

    // Idempotent system (three constructions, orthogonality, completeness).
    let idem = verify_idempotent_system(&rep).map_err(map_core_err)?;
    sections.push(("idempotents".into(), idem.all_pass()));

    // Periodicity.
    let periods = verify_periodicity(&rep).map_err(map_core_err)?;
    sections.push(("periods".into(), periods.iter().all(|r| r.verdict)));

    // Randomized module invariants, seed-fixed: the regular representation
    // is a homomorphism and multiplication is associative.
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let basis = params.basis();
    let mut homomorphism = true;
    let mut associativity = true;
    for _ in 0..20 {
        let pick = |rng: &mut ChaCha8Rng| {
            AlgebraElement::monomial(params, basis[rng.random_range(0..basis.len())].clone())
        };
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let ab = &a * &b;
        if rep.to_matrix(&ab) != rep.to_matrix(&a).mat_mul(&rep.to_matrix(&b)) {
            homomorphism = false;
        }
        if &ab * &c != &a * &(&b * &c) {
            associativity = false;
        }
    }
    sections.push(("homomorphism-samples".into(), homomorphism));
    sections.push(("associativity-samples".into(), associativity));

    // Field lemmas on the configured field: Frobenius additivity and the
    // geometric sums of the quantum characteristic.
    let ctx = params.field();
    let mut field_lemmas = true;
    for _ in 0..50 {
        let a = ctx.element_from_index(rng.random_range(0..ctx.order()));
        let b = ctx.element_from_index(rng.random_range(0..ctx.order()));
        let pk = params.p().pow(rng.random_range(0..3u32));
        if (&a - &b).pow(pk) != &a.pow(pk) - &b.pow(pk) {
            field_lemmas = false;
        }
    }
    let e = params.e();
    for k in 0..(2 * e) {
        let mut sum = ctx.zero();
        for j in 0..e {
            sum = &sum + &params.q().pow(j * k);
        }
        // Non-degenerate: the sum vanishes exactly off the multiples of e.
        // Degenerate: e = p, so the k = 0 (mod e) value e * 1 vanishes too.
        let expect_zero = k % e != 0 || params.is_degenerate();
        if sum.is_zero() != expect_zero {
            field_lemmas = false;
        }
    }
    sections.push(("field-lemmas".into(), field_lemmas));

    let pass = sections.iter().all(|(_, ok)| *ok);
    for (name, ok) in &sections {
        eprintln!("{}: {}", name, if *ok { "pass" } else { "FAIL" });
    }
    let mut body = serde_json::json!({
        "v": 1,
        "params": params_json(params),
        "dim": rep.dim(),
        "sections": sections.iter().map(|(name, ok)| serde_json::json!({
            "name": name,
            "pass": ok,
        })).collect::<Vec<_>>(),
        "relation_checks": relations,
        "all_pass": pass,
    });
    if cli.dump_matrices {
        body["generator_matrices"] = serde_json::json!({
            "t": (1..params.n()).map(|r| rep.gen_t_matrix(r).to_json()).collect::<Vec<_>>(),
            "x": (1..=params.n()).map(|r| rep.gen_x_matrix(r).to_json()).collect::<Vec<_>>(),
        });
    }
    Ok(CmdOutput {
        body: body.to_string(),
        pass,
    })
}

fn cmd_bench(cli: &Cli, params: &AlgebraParams) -> Result<CmdOutput, i32> {
    let rep = build_rep(cli, params)?;
    let report = verify_idempotent_system(&rep).map_err(map_core_err)?;
    if !report.all_pass() {
        eprintln!("error: constructions disagree; no timings reported");
        return Err(EXIT_VERIFY);
    }
    Ok(CmdOutput {
        pass: true,
        body: report.to_json(true).to_string(),
    })
}
