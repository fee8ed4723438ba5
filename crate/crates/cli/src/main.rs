//! `motifrank`: find outlier motifs in heterogeneous networks.
//!
//! ```text
//! motifrank stats  --graph g.tsv
//! motifrank query  --graph g.tsv --query q.json [--metric pathsim] [--top 10] [--groups 10 --distribution]
//! motifrank bench  [--nodes 2000] [--degrees 2,4,8] [--lengths 3,5,7,9] [--reps 5] [--seed 42]
//! motifrank verify [--cases 100] [--seed 0]
//! ```
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use motifrank_core::bench::{self, BenchConfig};
use motifrank_core::ingest::{graph_stats, load_edge_list};
use motifrank_core::oracle::{run_verification, Fault, VerifyConfig};
use motifrank_core::pipeline::{run_query, QueryOptions};
use motifrank_core::query::parse_query;
use motifrank_core::scoring::{group_distribution, Metric};
use motifrank_core::{Error, HeteroGraph};

#[derive(Parser, Debug)]
#[command(name = "motifrank", version, about = "Query-driven outlier motif detection")]
struct Cli {
    /// Worker threads for the engine (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Node and edge counts per type.
    Stats(StatsArgs),
    /// Rank candidate motifs by outlier score.
    Query(QueryArgs),
    /// Time the pipeline on synthetic graphs.
    Bench(BenchArgs),
    /// Check the engine against brute-force enumeration.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Tsv,
    Json,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Drop nodes of TYPE with degree above N before reporting.
    #[arg(long = "degree-threshold", value_name = "TYPE=N", value_parser = parse_threshold)]
    degree_threshold: Vec<(String, usize)>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    query: PathBuf,
    /// Overrides the query's metric.
    #[arg(long, value_parser = parse_metric)]
    metric: Option<Metric>,
    /// Rows shown at each end of the ranking (overrides the query's top_k).
    #[arg(long)]
    top: Option<usize>,
    /// Number of rank buckets for --distribution.
    #[arg(long, default_value_t = 10)]
    groups: usize,
    /// Print per-bucket node frequencies.
    #[arg(long)]
    distribution: bool,
    #[arg(long = "degree-threshold", value_name = "TYPE=N", value_parser = parse_threshold)]
    degree_threshold: Vec<(String, usize)>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 2000)]
    nodes: usize,
    #[arg(long, default_value_t = 2)]
    types: usize,
    /// Expected average degrees for the degree sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [2.0, 4.0, 8.0])]
    degrees: Vec<f64>,
    /// Degree of the graph used for the path length sweep.
    #[arg(long, default_value_t = 4.0)]
    degree: f64,
    /// Score path lengths for the length sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [3, 5, 7, 9])]
    lengths: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    search_len: usize,
    #[arg(long, default_value_t = 3)]
    pattern_size: usize,
    #[arg(long, default_value_t = 3)]
    score_len: usize,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_parser = parse_metric, default_value = "pathsim")]
    metric: Metric,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    max_nodes: usize,
    /// Corrupt the engine on purpose (harness self-test).
    #[arg(long, hide = true, value_parser = parse_fault)]
    inject_fault: Option<Fault>,
}

fn parse_threshold(s: &str) -> Result<(String, usize), String> {
    let (ty, n) = s.split_once('=').ok_or_else(|| format!("expected TYPE=N, got `{s}`"))?;
    if ty.is_empty() {
        return Err(format!("empty type in `{s}`"));
    }
    let n = n.parse().map_err(|_| format!("bad threshold `{n}`"))?;
    Ok((ty.to_owned(), n))
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse()
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    match s {
        "pair-count" => Ok(Fault::PairCountOffByOne),
        "drop-candidate" => Ok(Fault::DropCandidate),
        _ => Err(format!("unknown fault `{s}` (pair-count, drop-candidate)")),
    }
}

/// Failure with an exit code attached.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

fn load_graph(path: &Path) -> Result<HeteroGraph, Failure> {
    let file = File::open(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    load_edge_list(file).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn thresholds(list: &[(String, usize)]) -> BTreeMap<String, usize> {
    list.iter().cloned().collect()
}

fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut graph = load_graph(&args.graph)?;
    if !args.degree_threshold.is_empty() {
        let by_type = graph.thresholds_by_name(args.degree_threshold.iter().map(|(k, v)| (k.as_str(), *v)));
        graph = graph.filter_high_degree(&by_type);
    }
    let stats = graph_stats(&graph);
    match args.format {
        Format::Tsv => report::stats_tsv(&stats, out)?,
        Format::Json => report::json(&stats, out)?,
    }
    Ok(())
}

fn cmd_query(args: &QueryArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let graph = load_graph(&args.graph)?;
    let text =
        std::fs::read_to_string(&args.query).map_err(|e| input_error(format!("{}: {e}", args.query.display())))?;
    let spec = parse_query(&text)?;
    if args.top == Some(0) {
        return Err(input_error("--top must be positive".into()));
    }
    let opts = QueryOptions {
        metric: args.metric,
        top_k: args.top,
        degree_thresholds: thresholds(&args.degree_threshold),
    };
    let outcome = run_query(&graph, &spec, &opts)?;
    let distribution = if args.distribution {
        Some(group_distribution(
            &outcome.ranked,
            args.groups,
            &outcome.query.pattern,
            &outcome.graph,
        )?)
    } else {
        None
    };
    let rep = report::QueryReport::new(&outcome, distribution);
    match args.format {
        Format::Tsv => rep.write_tsv(out)?,
        Format::Json => report::json(&rep, out)?,
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let base = BenchConfig {
        node_types: args.types,
        nodes: args.nodes,
        avg_degree: args.degree,
        search_len: args.search_len,
        pattern_size: args.pattern_size,
        score_len: args.score_len,
        reps: args.reps,
        seed: args.seed,
        metric: args.metric,
    };
    base.validate()?;
    for &k in &args.degrees {
        BenchConfig {
            avg_degree: k,
            ..base.clone()
        }
        .validate()?;
    }
    let by_degree = bench::sweep_degree(&base, &args.degrees)?;
    let by_length = bench::sweep_path_length(&base, &args.lengths)?;
    let rep = report::BenchReport {
        config: base,
        degree_sweep: by_degree,
        length_sweep: by_length,
    };
    match args.format {
        Format::Tsv => rep.write_tsv(out)?,
        Format::Json => report::json(&rep, out)?,
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = VerifyConfig {
        cases: args.cases,
        seed: args.seed,
        max_nodes: args.max_nodes,
        fault: args.inject_fault,
        ..Default::default()
    };
    let report = run_verification(&cfg);
    writeln!(
        out,
        "# {} cases from seed {}: {} pair counts, {} candidate keys, {} scores compared in {:.2}s",
        report.cases,
        cfg.seed,
        report.pair_checks,
        report.candidate_checks,
        report.score_checks,
        report.elapsed.as_secs_f64()
    )?;
    if report.passed() {
        writeln!(out, "all {} cases passed", report.cases)?;
        return Ok(());
    }
    for f in &report.failures {
        writeln!(out, "FAIL seed {} [{}]: {}", f.seed, f.check, f.detail)?;
        writeln!(out, "  reproduce: motifrank verify --cases 1 --seed {}", f.seed)?;
    }
    Err(Failure {
        code: 1,
        message: format!("{} of {} checks failed", report.failures.len(), report.cases * 3),
    })
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(input_error("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| input_error(e.to_string()))?;
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match &cli.command {
        Command::Stats(a) => cmd_stats(a, &mut out)?,
        Command::Query(a) => cmd_query(a, &mut out)?,
        Command::Bench(a) => cmd_bench(a, &mut out)?,
        Command::Verify(a) => {
            let r = cmd_verify(a, &mut out);
            out.flush()?;
            r?
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("motifrank: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
