//! Command-line surface for the integral-simplex toolkit.
//!
//! Subcommands cover the census (single cells and whole tables), partition
//! listing, realizability checks on matrix files, explicit embeddings,
//! the nondegeneracy inequalities, and the critical threshold.
//!
//! Exit codes: 0 on success, 2 for invalid input (flags, files, parameter
//! ranges), 3 when a search budget is exhausted (partial statistics are
//! printed to stderr) or a runtime failure occurs.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use intsimplex::bijection::{
    enumerate_partitions, lemma_check, partition_count, sigma, threshold_scan, Partition,
};
use intsimplex::census::{census_table, enumerate, CensusError, CensusTask, DiameterMode};
use intsimplex::embedding::{build_coordinates, reduce_dimension};
use intsimplex::exact::{parse_rational, Rational};
use intsimplex::geometry::{gram_oracle, menger_realizable, minimal_embedding_dimension};
use thiserror::Error;

use intsimplex_cli::formats::{
    align_columns, census_csv_row, census_text, grid_csv, grid_text, EmbeddingFile, MatrixFile,
    CENSUS_CSV_HEADER,
};

#[derive(Parser)]
#[command(
    name = "intsimplex",
    version,
    about = "Exact census, partition correspondence, and explicit embeddings \
             for simplices with integer distances",
    after_help = "Exit codes: 0 success, 2 invalid input, 3 budget exhausted or runtime \
                  failure.\nINTSIMPLEX_JOBS sets the default worker count for census and \
                  table runs (0 = one worker per core)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count nonisomorphic simplices for one (dimension, diameter) cell
    Census(CensusArgs),
    /// Sweep a rectangle of census cells and print the grid of counts
    Table(TableArgs),
    /// List or count the integer partitions of n
    Partitions(PartitionsArgs),
    /// Decide realizability of a squared-distance matrix file
    Check(CheckArgs),
    /// Build explicit coordinates for a partition's two-distance simplex
    Embed(EmbedArgs),
    /// Verify the nondegeneracy inequalities over all partitions
    Lemma(LemmaArgs),
    /// Evaluate the critical distance threshold, or scan a lambda^2 grid
    Sigma(SigmaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Largest distance must equal the diameter
    Exact,
    /// Largest distance may be any value up to the diameter
    Upto,
}

impl From<ModeArg> for DiameterMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => DiameterMode::Exact,
            ModeArg::Upto => DiameterMode::UpTo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Text,
}

#[derive(Args)]
struct CensusArgs {
    /// Simplex dimension d; the search runs on d+1 points
    #[arg(long)]
    dim: usize,
    /// Largest allowed distance
    #[arg(long)]
    diameter: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Print the canonical representative of every isomorphism class
    #[arg(long)]
    emit: bool,
    /// Worker threads; 0 means one per core
    #[arg(long, env = "INTSIMPLEX_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Abort after this many search nodes; 0 disables the limit
    #[arg(long, default_value_t = 1_000_000_000)]
    budget_nodes: u64,
    /// Abort after this many seconds; 0 disables the limit
    #[arg(long, default_value_t = 600)]
    budget_seconds: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
}

#[derive(Args)]
struct TableArgs {
    /// Dimension range, inclusive: "3..6" or a single value
    #[arg(long, value_parser = parse_usize_range)]
    dims: (usize, usize),
    /// Diameter range, inclusive: "1..4" or a single value
    #[arg(long, value_parser = parse_u32_range)]
    diameters: (u32, u32),
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Worker threads; 0 means one per core
    #[arg(long, env = "INTSIMPLEX_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Per-cell node budget; 0 disables the limit
    #[arg(long, default_value_t = 1_000_000_000)]
    budget_nodes: u64,
    /// Per-cell time budget in seconds; 0 disables the limit
    #[arg(long, default_value_t = 600)]
    budget_seconds: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum ListCount {
    List,
    Count,
}

#[derive(Args)]
struct PartitionsArgs {
    /// The integer to partition
    #[arg(long)]
    n: usize,
    /// list: one partition per line, reverse lexicographic; count: p(n)
    #[arg(long, value_enum, default_value_t = ListCount::List)]
    format: ListCount,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    /// JSON file with fields n and sq_dists (rationals as integers or "p/q")
    #[arg(long)]
    matrix: PathBuf,
    /// Target embedding dimension
    #[arg(long)]
    dim: usize,
    /// Eigenvalue tolerance for the floating-point cross-check
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Args)]
struct EmbedArgs {
    /// Block sizes, comma separated: "3,2,1" (order does not matter)
    #[arg(long)]
    partition: String,
    /// Squared inter-block distance, a rational like "4" or "17/4"
    #[arg(long, default_value = "4")]
    lambda_sq: String,
    /// Project down to the minimal dimension (point count minus one)
    #[arg(long)]
    reduce: bool,
    /// Write the embedding file here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaArgs {
    /// Check every partition of every n up to this bound
    #[arg(long)]
    max_n: usize,
    /// Comma-separated squared distances to test, e.g. "4,17/4,9"
    #[arg(long, default_value = "4")]
    lambda_sq: String,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
}

#[derive(Args)]
struct SigmaArgs {
    /// Evaluate the threshold at this dimension (d >= 2)
    #[arg(long, conflicts_with = "scan")]
    d: Option<u64>,
    /// Exhaustively classify two-valued matrices over a lambda^2 grid
    #[arg(long, requires = "dim", requires = "grid")]
    scan: bool,
    /// Simplex dimension for --scan (at most 5; the scan is exponential)
    #[arg(long, requires = "scan")]
    dim: Option<usize>,
    /// Comma-separated lambda^2 grid for --scan, e.g. "4,15/4,7/2"
    #[arg(long, requires = "scan")]
    grid: Option<String>,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) | CliError::Failure(_) => 3,
        }
    }

    fn from_census(e: CensusError) -> Self {
        match &e {
            CensusError::InvalidTask(_) => CliError::Input(e.to_string()),
            CensusError::BudgetExceeded { stats, .. } => CliError::Budget(format!(
                "{e}; partial stats: pruned triangle {}, realizability {}, canonicity {}",
                stats.pruned_triangle, stats.pruned_realizability, stats.pruned_canonicity
            )),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn parse_range<T: std::str::FromStr + Copy>(s: &str) -> Result<(T, T), String> {
    let one = |t: &str| {
        t.trim().parse::<T>().map_err(|_| format!("cannot parse {t:?} as a number"))
    };
    match s.split_once("..") {
        None => one(s).map(|v| (v, v)),
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (lo, hi) = (one(a)?, one(b)?);
            Ok((lo, hi))
        }
    }
}

fn parse_usize_range(s: &str) -> Result<(usize, usize), String> {
    parse_range::<usize>(s)
}

fn parse_u32_range(s: &str) -> Result<(u32, u32), String> {
    parse_range::<u32>(s)
}

fn parse_rational_list(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').map(|t| parse_rational(t.trim()).map_err(input_err)).collect()
}

// Rust ignores SIGPIPE, so `intsimplex ... | head` would otherwise panic on
// the closed pipe. Restoring the default handler gives the usual quiet exit.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Census(args) => run_census(args),
        Command::Table(args) => run_table(args),
        Command::Partitions(args) => run_partitions(args),
        Command::Check(args) => run_check(args),
        Command::Embed(args) => run_embed(args),
        Command::Lemma(args) => run_lemma(args),
        Command::Sigma(args) => run_sigma(args),
    }
}

fn run_census(args: CensusArgs) -> Result<(), CliError> {
    let mut task = CensusTask::new(args.dim, args.diameter);
    task.mode = args.mode.into();
    task.emit_representatives = args.emit;
    task.jobs = args.jobs;
    task.node_budget = args.budget_nodes;
    task.time_budget = Duration::from_secs(args.budget_seconds);
    let result = enumerate(&task).map_err(CliError::from_census)?;
    match args.format {
        TableFormat::Csv => {
            println!("{CENSUS_CSV_HEADER}");
            println!("{}", census_csv_row(&result));
        }
        TableFormat::Text => println!("{}", census_text(&result)),
    }
    if let Some(reps) = &result.representatives {
        for (i, rep) in reps.iter().enumerate() {
            match args.format {
                TableFormat::Csv => {
                    let word: Vec<String> = rep.word().iter().map(u32::to_string).collect();
                    println!("# representative {}: {}", i + 1, word.join(","));
                }
                TableFormat::Text => {
                    println!();
                    println!("representative {}:", i + 1);
                    print!("{rep}");
                }
            }
        }
    }
    Ok(())
}

fn run_table(args: TableArgs) -> Result<(), CliError> {
    let mut template = CensusTask::new(args.dims.0.max(1), args.diameters.0.max(1));
    template.mode = args.mode.into();
    template.jobs = args.jobs;
    template.node_budget = args.budget_nodes;
    template.time_budget = Duration::from_secs(args.budget_seconds);
    let cells = census_table(
        args.dims.0..=args.dims.1,
        args.diameters.0..=args.diameters.1,
        &template,
    )
    .map_err(CliError::from_census)?;
    match args.format {
        TableFormat::Csv => print!("{}", grid_csv(&cells)),
        TableFormat::Text => print!("{}", grid_text(&cells)),
    }
    Ok(())
}

fn run_partitions(args: PartitionsArgs) -> Result<(), CliError> {
    match args.format {
        ListCount::Count => println!("{}", partition_count(args.n)),
        ListCount::List => {
            for p in enumerate_partitions(args.n) {
                let parts: Vec<String> = p.parts().iter().map(u32::to_string).collect();
                println!("{}", parts.join(","));
            }
        }
    }
    Ok(())
}

fn run_check(args: CheckArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.matrix)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", args.matrix.display())))?;
    let a = MatrixFile::parse(&text).map_err(input_err)?.to_matrix().map_err(input_err)?;
    let verdict = menger_realizable(&a, args.dim);
    let report = minimal_embedding_dimension(&a);
    let float_realizable = gram_oracle(&a, args.dim, args.tolerance);
    let agrees = float_realizable == verdict.realizable;
    match args.format {
        ReportFormat::Json => {
            let json = serde_json::json!({
                "dim": args.dim,
                "tolerance": args.tolerance,
                "realizable": verdict.realizable,
                "witness": verdict.witness,
                "minimal_dimension": report.realizable_in_dim,
                "nondegenerate": report.nondegenerate,
                "float_realizable": float_realizable,
                "float_agrees": agrees,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("static shape"));
        }
        ReportFormat::Text => {
            println!(
                "realizable in dimension {}: {}",
                args.dim,
                if verdict.realizable { "yes" } else { "no" }
            );
            if let Some(w) = &verdict.witness {
                println!("witness subset: {w:?}");
            }
            match report.realizable_in_dim {
                Some(m) => println!(
                    "minimal dimension: {} ({})",
                    m,
                    if report.nondegenerate { "nondegenerate" } else { "degenerate" }
                ),
                None => println!("minimal dimension: none (not realizable in any dimension)"),
            }
            println!(
                "float cross-check (tolerance {:e}): {}, {}",
                args.tolerance,
                if float_realizable { "realizable" } else { "not realizable" },
                if agrees { "agrees" } else { "DISAGREES" }
            );
        }
    }
    Ok(())
}

fn run_embed(args: EmbedArgs) -> Result<(), CliError> {
    let mut parts: Vec<u32> = args
        .partition
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Input(format!("bad block size {:?}", t.trim())))
        })
        .collect::<Result<_, _>>()?;
    parts.sort_unstable_by(|a, b| b.cmp(a));
    let pi = Partition::new(parts).map_err(input_err)?;
    let lambda_sq = parse_rational(&args.lambda_sq).map_err(input_err)?;
    let mut emb = build_coordinates(&pi, &lambda_sq).map_err(input_err)?;
    if args.reduce {
        emb = reduce_dimension(&emb).map_err(input_err)?;
    }
    let file = EmbeddingFile::from_embedding(&emb);
    match &args.out {
        Some(path) => {
            fs::write(path, file.to_json() + "\n")
                .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
            println!(
                "wrote {} points in {} dimensions to {}",
                emb.points.len(),
                emb.ambient_dim,
                path.display()
            );
        }
        None => println!("{}", file.to_json()),
    }
    Ok(())
}

fn run_lemma(args: LemmaArgs) -> Result<(), CliError> {
    let grid = parse_rational_list(&args.lambda_sq)?;
    let mut text_rows: Vec<Vec<String>> = vec![
        ["partition", "lambda^2", "combined", "bordered", "holds"]
            .map(str::to_owned)
            .to_vec(),
    ];
    let mut csv = String::from("partition,lambda_sq,expr_combined,expr_bordered,holds\n");
    let mut total = 0usize;
    let mut failures = 0usize;
    for n in 1..=args.max_n {
        for pi in enumerate_partitions(n) {
            for l in &grid {
                let rep = lemma_check(&pi, l).map_err(input_err)?;
                let holds = rep.holds();
                total += 1;
                failures += usize::from(!holds);
                text_rows.push(vec![
                    pi.to_string(),
                    l.to_string(),
                    rep.expr_combined.to_string(),
                    rep.expr_bordered.to_string(),
                    if holds { "yes" } else { "NO" }.to_owned(),
                ]);
                let plus: Vec<String> = pi.parts().iter().map(u32::to_string).collect();
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    plus.join("+"),
                    l,
                    rep.expr_combined,
                    rep.expr_bordered,
                    holds
                ));
            }
        }
    }
    match args.format {
        TableFormat::Csv => print!("{csv}"),
        TableFormat::Text => {
            print!("{}", align_columns(&text_rows));
            if failures == 0 {
                println!("all {total} rows hold");
            } else {
                println!("{failures} of {total} rows FAIL");
            }
        }
    }
    if failures > 0 {
        return Err(CliError::Failure(format!(
            "nondegeneracy verification failed on {failures} of {total} rows"
        )));
    }
    Ok(())
}

fn run_sigma(args: SigmaArgs) -> Result<(), CliError> {
    if args.scan {
        let d = args.dim.expect("clap enforces --dim with --scan");
        let grid_text_arg = args.grid.as_deref().expect("clap enforces --grid with --scan");
        let grid = parse_rational_list(grid_text_arg)?;
        let rows = threshold_scan(d, &grid).map_err(input_err)?;
        match args.format {
            TableFormat::Csv => {
                println!("lambda_sq,realizable_count,partition_count,holds");
                for r in &rows {
                    println!(
                        "{},{},{},{}",
                        r.lambda_sq,
                        r.realizable_count,
                        r.partition_count,
                        r.bijection_holds()
                    );
                }
            }
            TableFormat::Text => {
                let mut table: Vec<Vec<String>> = vec![
                    ["lambda^2", "realizable", "partitions", "verdict"]
                        .map(str::to_owned)
                        .to_vec(),
                ];
                for r in &rows {
                    table.push(vec![
                        r.lambda_sq.to_string(),
                        r.realizable_count.to_string(),
                        r.partition_count.to_string(),
                        if r.bijection_holds() { "holds" } else { "FAILS" }.to_owned(),
                    ]);
                }
                print!("{}", align_columns(&table));
                for r in &rows {
                    for w in &r.unexpected_words {
                        let word: Vec<String> = w.iter().map(u32::to_string).collect();
                        println!("lambda^2 {}: unexpected word {}", r.lambda_sq, word.join(","));
                    }
                    for p in &r.failed_partitions {
                        println!("lambda^2 {}: failed partition {p}", r.lambda_sq);
                    }
                }
            }
        }
        return Ok(());
    }
    let d = args
        .d
        .ok_or_else(|| CliError::Input("pass --d <dim> or --scan --dim <d> --grid <list>".into()))?;
    let s = sigma(d).map_err(input_err)?;
    match args.format {
        TableFormat::Csv => {
            println!("d,value");
            println!("{},{}", d, s.value);
        }
        TableFormat::Text => {
            println!("sigma({d}) = {}", s.value);
            println!(
                "exact form: sqrt(({} + sqrt({})) / {})",
                s.linear_term, s.inner_radicand, s.denominator
            );
        }
    }
    Ok(())
}
