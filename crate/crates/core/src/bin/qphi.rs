use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qphi::cache::{SeriesCache, ENGINE_VERSION};
use qphi::frobenius::{cphi6_gen, cphi_oracle_in};
use qphi::verify::{
    default_ledger, primitive_claims, render_table, run_ledger, scan_congruences, Ledger, Profile, RunOptions,
    RunParameters, RunReport, VerificationReport, Witness,
};
use qphi::{CoefficientRing, Error, Result, Series};

#[derive(Parser)]
#[command(
    name = "qphi",
    version,
    about = "q-series engine and congruence checker for cphi_k(n)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print cphi_k(0..=terms).
    Expand(ExpandArgs),
    /// Run the named ledger entries.
    Verify(VerifyArgs),
    /// Run the whole ledger.
    VerifyAll(VerifyArgs),
    /// Compare the k = 6 closed formula against the quadratic-form oracle.
    Oracle(OracleArgs),
    /// Search for congruences cphi_k(an+b) = 0 mod M.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Gen,
    Oracle,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    terms: usize,
    /// exact | mod:M
    #[arg(long, default_value = "exact")]
    ring: CoefficientRing,
    /// Defaults to the closed formula for k = 6, the oracle otherwise.
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Write the series as JSON instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "quick")]
    profile: Profile,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Ledger file; the built-in ledger if absent.
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Write the JSON report here instead of printing a table.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "entry")]
    entries: Vec<String>,
    /// Override identity orders; caps congruence ranges at this many terms.
    #[arg(long)]
    terms: Option<usize>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    terms: usize,
    #[arg(long, default_value = "exact")]
    ring: CoefficientRing,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 6)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    max_a: usize,
    /// Comma-separated moduli.
    #[arg(long, value_delimiter = ',', default_value = "4,9")]
    moduli: Vec<u64>,
    #[arg(long, default_value_t = 200)]
    terms: usize,
    #[arg(long, default_value_t = 10)]
    min_witnesses: usize,
    /// Drop claims implied by other claims found.
    #[arg(long)]
    primitive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Expand(args) => expand(args),
        Command::Verify(args) => {
            if args.entries.is_empty() {
                return Err(Error::Parse("verify needs at least one --entry".into()));
            }
            verify(args)
        }
        Command::VerifyAll(args) => {
            if !args.entries.is_empty() {
                return Err(Error::Parse("verify-all takes no --entry".into()));
            }
            verify(args)
        }
        Command::Oracle(args) => oracle(args),
        Command::Scan(args) => scan(args),
    }
}

fn expand(args: ExpandArgs) -> Result<u8> {
    let method = args
        .method
        .unwrap_or(if args.k == 6 { Method::Gen } else { Method::Oracle });
    let series = match method {
        Method::Gen if args.k == 6 => cphi6_gen(args.terms, args.ring)?,
        Method::Gen => return Err(Error::Parse("the closed formula exists only for k = 6".into())),
        Method::Oracle => cphi_oracle_in(args.k, args.terms, args.ring)?,
    };
    match args.out {
        Some(path) => std::fs::write(path, serde_json::to_string(&series)? + "\n")?,
        None => {
            for (n, c) in series.coefficients().iter().enumerate() {
                println!("{n} {c}");
            }
        }
    }
    Ok(0)
}

fn load_ledger(path: Option<&PathBuf>) -> Result<Ledger> {
    match path {
        Some(p) => Ledger::from_json(&std::fs::read_to_string(p)?),
        None => Ok(default_ledger()),
    }
}

fn cache_for(run: &RunArgs) -> SeriesCache {
    if run.no_cache {
        SeriesCache::disabled()
    } else if let Some(dir) = &run.cache_dir {
        SeriesCache::at(dir)
    } else {
        SeriesCache::from_env()
    }
}

fn exit_code(reports: &[VerificationReport]) -> u8 {
    use qphi::verify::Status;
    if reports.iter().any(|r| r.status == Status::Error) {
        2
    } else if reports.iter().any(|r| r.status == Status::Fail) {
        1
    } else {
        0
    }
}

fn emit(report: &RunReport, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, report.to_json())?,
        None => print!("{}", render_table(&report.reports)),
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<u8> {
    let ledger = load_ledger(args.run.ledger.as_ref())?;
    let opts = RunOptions {
        profile: args.run.profile,
        jobs: args.run.jobs,
        entries: args.entries.clone(),
        terms: args.terms,
        cache: cache_for(&args.run),
    };
    let reports = run_ledger(&ledger, &opts)?;
    let report = RunReport {
        engine_version: ENGINE_VERSION.to_string(),
        ledger_hash: ledger.hash(),
        parameters: RunParameters {
            profile: args.run.profile.to_string(),
            jobs: args.run.jobs,
            terms: args.terms,
            entries: args.entries,
            ledger_path: args.run.ledger.map(|p| p.display().to_string()),
        },
        reports,
    };
    emit(&report, args.run.out.as_ref())?;
    Ok(exit_code(&report.reports))
}

fn compare(name: &str, order: usize, lhs: &Series, rhs: &Series, start: Instant) -> Result<VerificationReport> {
    Ok(match lhs.first_difference(rhs)? {
        None => VerificationReport::pass(name, order, start.elapsed()),
        Some(i) => VerificationReport::fail(
            name,
            order,
            Witness {
                index: i,
                lhs: lhs.coeff(i).to_string(),
                rhs: rhs.coeff(i).to_string(),
            },
            start.elapsed(),
        ),
    })
}

fn oracle(args: OracleArgs) -> Result<u8> {
    let start = Instant::now();
    let gen = cphi6_gen(args.terms, args.ring)?;
    let oracle = cphi_oracle_in(6, args.terms, args.ring)?;
    let report = compare("gen-vs-oracle", args.terms, &gen, &oracle, start)?
        .with_detail(format!("closed formula vs quadratic form over {}", args.ring));
    let run = RunReport {
        engine_version: ENGINE_VERSION.to_string(),
        ledger_hash: default_ledger().hash(),
        parameters: RunParameters {
            profile: "oracle".into(),
            jobs: 1,
            terms: Some(args.terms),
            entries: Vec::new(),
            ledger_path: None,
        },
        reports: vec![report],
    };
    emit(&run, args.out.as_ref())?;
    Ok(exit_code(&run.reports))
}

fn scan(args: ScanArgs) -> Result<u8> {
    let mut claims = scan_congruences(args.k, args.max_a, &args.moduli, args.terms, args.min_witnesses)?;
    if args.primitive {
        claims = primitive_claims(&claims);
    }
    match args.out {
        Some(path) => std::fs::write(path, serde_json::to_string_pretty(&claims)? + "\n")?,
        None => {
            for c in &claims {
                println!("{}", c.describe());
            }
            println!("{} claims", claims.len());
        }
    }
    Ok(0)
}
