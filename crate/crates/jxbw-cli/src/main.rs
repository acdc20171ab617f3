//! `jxbw` — build, query, verify, benchmark, and inspect substructure-search
//! indexes over JSONL files.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 verification
//! disagreement.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;

use jxbw_core::engine::{substructure_search, QueryStats};
use jxbw_core::{
    build_symbol_table, merge_all, merge_stats, mt_search, naive_search, normalize, parse_jsonl,
    parse_query, synth, JsonTree, QueryTree, ResultSet, XbwIndex,
};

#[derive(Parser)]
#[command(name = "jxbw", version, about = "Substructure search over JSONL corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a JSONL file
    Build {
        /// Input JSONL file (one JSON object per line)
        input: PathBuf,
        /// Where to write the index
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run one query against an index
    Query {
        index: PathBuf,
        /// The query pattern, as JSON text
        #[arg(short, long)]
        query: String,
        /// Original JSONL file (required for mt/naive and for --format lines)
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Algorithm::Xbw)]
        algorithm: Algorithm,
        #[arg(long, value_enum, default_value_t = Format::Ids)]
        format: Format,
    },
    /// Run queries under all three algorithms and compare their answers
    Verify {
        index: PathBuf,
        #[arg(long)]
        jsonl: PathBuf,
        /// File of queries, one JSON value per line
        #[arg(long, conflicts_with = "random")]
        queries: Option<PathBuf>,
        /// Generate this many random queries from the corpus instead
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Measure per-query latency for the selected algorithms
    Bench {
        index: PathBuf,
        #[arg(long)]
        jsonl: PathBuf,
        /// File of queries, one JSON value per line
        #[arg(long)]
        queries: PathBuf,
        /// Timed repetitions per query
        #[arg(long, default_value_t = 3)]
        repeat: usize,
        #[arg(long, value_enum, value_delimiter = ',',
              default_values_t = vec![Algorithm::Xbw, Algorithm::Mt, Algorithm::Naive])]
        algorithms: Vec<Algorithm>,
        /// Emit one JSON object per algorithm instead of the table
        #[arg(long)]
        json: bool,
    },
    /// Print index statistics
    Stats { index: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    /// The index-based three-step search
    Xbw,
    /// Traversal of the merged tree (rebuilt from the JSONL)
    Mt,
    /// Per-line tree traversal (rebuilt from the JSONL)
    Naive,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Xbw => "xbw",
            Algorithm::Mt => "mt",
            Algorithm::Naive => "naive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Matching line numbers, space separated
    Ids,
    /// Number of matches
    Count,
    /// The matching JSONL lines verbatim
    Lines,
    /// A JSON report with ids, count, and timing
    Json,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let is_usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if is_usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Build { input, output } => cmd_build(&input, &output),
        Command::Query { index, query, jsonl, algorithm, format } => {
            cmd_query(&index, &query, jsonl.as_deref(), algorithm, format)
        }
        Command::Verify { index, jsonl, queries, random, seed } => {
            cmd_verify(&index, &jsonl, queries.as_deref(), random, seed)
        }
        Command::Bench { index, jsonl, queries, repeat, algorithms, json } => {
            cmd_bench(&index, &jsonl, &queries, repeat, &algorithms, json)
        }
        Command::Stats { index } => cmd_stats(&index),
    }
}

/// Reads and parses a JSONL corpus, also returning the raw non-blank lines
/// aligned with tree identifiers.
fn load_corpus(path: &Path) -> Result<(Vec<JsonTree>, Vec<String>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let trees = parse_jsonl(&text).map_err(data_err)?;
    let lines = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .map(str::to_owned)
        .collect();
    Ok((trees, lines))
}

fn load_index(path: &Path) -> Result<XbwIndex, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    XbwIndex::load(std::io::BufReader::new(file)).map_err(data_err)
}

fn cmd_build(input: &Path, output: &Path) -> Result<ExitCode, CliError> {
    let total_start = Instant::now();
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;

    let t = Instant::now();
    let trees = parse_jsonl(&text).map_err(data_err)?;
    if trees.is_empty() {
        return Err(CliError::Data(format!("{}: empty corpus", input.display())));
    }
    let parse_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mt = merge_all(&trees).map_err(data_err)?;
    let merge_secs = t.elapsed().as_secs_f64();
    let stats = merge_stats(&mt, &trees);

    let t = Instant::now();
    let table = build_symbol_table(&trees);
    let sigma = table.sigma();
    let norm = normalize(&mt, &table).map_err(data_err)?;
    let index = jxbw_core::build_xbw(&norm, table).map_err(data_err)?;
    let index_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let file = std::fs::File::create(output)
        .map_err(|e| CliError::Data(format!("{}: {e}", output.display())))?;
    index
        .save(std::io::BufWriter::new(file))
        .map_err(|e| CliError::Data(format!("{}: {e}", output.display())))?;
    let write_secs = t.elapsed().as_secs_f64();

    println!("lines               {}", stats.lines);
    println!("total tree nodes    {}", stats.total_nodes);
    println!(
        "merged tree nodes   {} ({:.1}% of total)",
        stats.merged_nodes,
        100.0 * stats.compression_ratio()
    );
    println!("distinct labels     {sigma}");
    println!("individual trees    {parse_secs:.3}s");
    println!("tree merging        {merge_secs:.3}s");
    println!("index construction  {index_secs:.3}s");
    println!("index write         {write_secs:.3}s");
    println!("total               {:.3}s", total_start.elapsed().as_secs_f64());
    Ok(ExitCode::SUCCESS)
}

/// Runs `query` under one algorithm; returns the result and the elapsed time
/// of the search call alone (corpus parsing and merging excluded).
fn run_algorithm(
    algorithm: Algorithm,
    index: &XbwIndex,
    corpus: Option<&[JsonTree]>,
    query: &QueryTree,
) -> Result<(ResultSet, f64), CliError> {
    match algorithm {
        Algorithm::Xbw => {
            let t = Instant::now();
            let (result, _) = substructure_search(index, query);
            Ok((result, t.elapsed().as_secs_f64()))
        }
        Algorithm::Naive => {
            let corpus = corpus.ok_or_else(|| {
                CliError::Usage("--jsonl <file> is required for the naive algorithm".into())
            })?;
            let t = Instant::now();
            let result = naive_search(corpus, query);
            Ok((result, t.elapsed().as_secs_f64()))
        }
        Algorithm::Mt => {
            let corpus = corpus.ok_or_else(|| {
                CliError::Usage("--jsonl <file> is required for the mt algorithm".into())
            })?;
            let mt = merge_all(corpus).map_err(data_err)?;
            let t = Instant::now();
            let result = mt_search(&mt, query);
            Ok((result, t.elapsed().as_secs_f64()))
        }
    }
}

fn cmd_query(
    index_path: &Path,
    query_text: &str,
    jsonl: Option<&Path>,
    algorithm: Algorithm,
    format: Format,
) -> Result<ExitCode, CliError> {
    let index = load_index(index_path)?;
    let query = parse_query(query_text).map_err(|e| CliError::Data(format!("bad query: {e}")))?;

    let corpus_and_lines = match jsonl {
        Some(path) => Some(load_corpus(path)?),
        None => None,
    };
    let corpus = corpus_and_lines.as_ref().map(|(trees, _)| trees.as_slice());

    let (result, elapsed) = run_algorithm(algorithm, &index, corpus, &query)?;

    match format {
        Format::Ids => {
            let ids: Vec<String> = result.ids().iter().map(u32::to_string).collect();
            println!("{}", ids.join(" "));
        }
        Format::Count => println!("{}", result.len()),
        Format::Lines => {
            let (_, lines) = corpus_and_lines.as_ref().ok_or_else(|| {
                CliError::Usage("--jsonl <file> is required for --format lines".into())
            })?;
            for &id in result.ids() {
                let line = lines.get(id as usize - 1).ok_or_else(|| {
                    CliError::Data(format!("id {id} has no line in the supplied JSONL"))
                })?;
                println!("{line}");
            }
        }
        Format::Json => {
            let report = serde_json::json!({
                "query": query_text,
                "algorithm": algorithm.name(),
                "ids": result.ids(),
                "count": result.len(),
                "elapsed_micros": (elapsed * 1e6).round() as u64,
            });
            println!("{report}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_queries_file(path: &Path) -> Result<Vec<(String, QueryTree)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut queries = Vec::new();
    for line in text.lines() {
        let line = line.strip_suffix('\r').unwrap_or(line).trim();
        if line.is_empty() {
            continue;
        }
        let query = parse_query(line).map_err(data_err)?;
        queries.push((line.to_owned(), query));
    }
    Ok(queries)
}

fn cmd_verify(
    index_path: &Path,
    jsonl: &Path,
    queries_file: Option<&Path>,
    random: Option<usize>,
    seed: u64,
) -> Result<ExitCode, CliError> {
    let index = load_index(index_path)?;
    let (corpus, _) = load_corpus(jsonl)?;
    let queries: Vec<(String, QueryTree)> = match (queries_file, random) {
        (Some(path), None) => read_queries_file(path)?,
        (None, Some(count)) => {
            let mut rng = StdRng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                match synth::sample_hit_query(&corpus, &mut rng, 2, 4) {
                    Some(q) => out.push((q.render_json(), q)),
                    None => break,
                }
            }
            out
        }
        (None, None) => {
            return Err(CliError::Usage("pass --queries <file> or --random <n>".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    if queries.is_empty() {
        println!("warning: no queries to verify; PASS (vacuous)");
        return Ok(ExitCode::SUCCESS);
    }

    let mt = merge_all(&corpus).map_err(data_err)?;
    let mut disagreements = 0usize;
    let mut pair_agree = [0usize; 3]; // xbw=mt, xbw=naive, mt=naive
    for (text, query) in &queries {
        let (xbw, _) = substructure_search(&index, query);
        let mt_result = mt_search(&mt, query);
        let naive = naive_search(&corpus, query);
        let xm = xbw == mt_result;
        let xn = xbw == naive;
        let mn = mt_result == naive;
        pair_agree[0] += xm as usize;
        pair_agree[1] += xn as usize;
        pair_agree[2] += mn as usize;
        if !(xm && xn) {
            disagreements += 1;
            eprintln!("DISAGREEMENT on query {text}");
            eprintln!("  xbw:   {:?}", xbw.ids());
            eprintln!("  mt:    {:?}", mt_result.ids());
            eprintln!("  naive: {:?}", naive.ids());
        }
    }
    let total = queries.len();
    println!("queries: {total}");
    println!("agreement: xbw=mt {}/{total}, xbw=naive {}/{total}, mt=naive {}/{total}",
        pair_agree[0], pair_agree[1], pair_agree[2]);
    if disagreements == 0 {
        println!("PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL ({disagreements} disagreements)");
        Ok(ExitCode::from(3))
    }
}

struct BenchRow {
    algorithm: Algorithm,
    mean_ms: f64,
    stddev_ms: f64,
    median_ms: f64,
    mean_hits: f64,
}

fn cmd_bench(
    index_path: &Path,
    jsonl: &Path,
    queries_path: &Path,
    repeat: usize,
    algorithms: &[Algorithm],
    json: bool,
) -> Result<ExitCode, CliError> {
    if repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let index = load_index(index_path)?;
    let (corpus, _) = load_corpus(jsonl)?;
    let queries = read_queries_file(queries_path)?;
    if queries.is_empty() {
        return Err(CliError::Data("no queries in the queries file".into()));
    }

    // Setup work (merging for mt) is done once, outside the timed region.
    let mt = algorithms
        .contains(&Algorithm::Mt)
        .then(|| merge_all(&corpus).map_err(data_err))
        .transpose()?;

    let mut rows = Vec::new();
    let mut xbw_stats: Vec<QueryStats> = Vec::new();
    for &algorithm in algorithms {
        let mut samples_ms = Vec::with_capacity(queries.len() * repeat);
        let mut hits = 0usize;
        for (_, query) in &queries {
            for rep in 0..repeat {
                let t = Instant::now();
                let result = match algorithm {
                    Algorithm::Xbw => {
                        let (result, stats) = substructure_search(&index, query);
                        if rep == 0 {
                            xbw_stats.push(stats);
                        }
                        result
                    }
                    Algorithm::Mt => mt_search(mt.as_ref().unwrap(), query),
                    Algorithm::Naive => naive_search(&corpus, query),
                };
                samples_ms.push(t.elapsed().as_secs_f64() * 1e3);
                if rep == 0 {
                    hits += result.len();
                }
            }
        }
        let mean = samples_ms.iter().sum::<f64>() / samples_ms.len() as f64;
        let var = samples_ms.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
            / samples_ms.len() as f64;
        let mut sorted = samples_ms.clone();
        sorted.sort_by(f64::total_cmp);
        rows.push(BenchRow {
            algorithm,
            mean_ms: mean,
            stddev_ms: var.sqrt(),
            median_ms: sorted[sorted.len() / 2],
            mean_hits: hits as f64 / queries.len() as f64,
        });
    }

    let xbw_mean = rows
        .iter()
        .find(|r| r.algorithm == Algorithm::Xbw)
        .map(|r| r.mean_ms);
    if json {
        for row in &rows {
            let speedup = xbw_mean.map(|x| row.mean_ms / x);
            let report = serde_json::json!({
                "algorithm": row.algorithm.name(),
                "queries": queries.len(),
                "repeat": repeat,
                "mean_ms": row.mean_ms,
                "stddev_ms": row.stddev_ms,
                "median_ms": row.median_ms,
                "avg_hits": row.mean_hits,
                "speedup_vs_xbw": speedup,
            });
            println!("{report}");
        }
    } else {
        println!(
            "{:<8} {:>12} {:>12} {:>12} {:>10} {:>14}",
            "alg", "mean_ms", "stddev_ms", "median_ms", "avg_hits", "speedup_vs_xbw"
        );
        for row in &rows {
            let mut line = format!(
                "{:<8} {:>12.4} {:>12.4} {:>12.4} {:>10.1}",
                row.algorithm.name(),
                row.mean_ms,
                row.stddev_ms,
                row.median_ms,
                row.mean_hits
            );
            match xbw_mean {
                Some(x) => {
                    let _ = write!(line, " {:>14.1}", row.mean_ms / x);
                }
                None => line.push_str("              -"),
            }
            println!("{line}");
        }
    }
    if !xbw_stats.is_empty() {
        let n = xbw_stats.len() as f64;
        let mean_p = xbw_stats.iter().map(|s| s.path_count as f64).sum::<f64>() / n;
        let mean_r = xbw_stats.iter().map(|s| s.matched_positions as f64).sum::<f64>() / n;
        let mean_c = xbw_stats.iter().map(|s| s.root_candidates as f64).sum::<f64>() / n;
        let mean_d = xbw_stats.iter().map(|s| s.mean_depth).sum::<f64>() / n;
        println!(
            "xbw query shape: mean paths {mean_p:.2}, matched positions {mean_r:.2}, \
             validated roots {mean_c:.2}, path depth {mean_d:.2}"
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(index_path: &Path) -> Result<ExitCode, CliError> {
    let file = std::fs::File::open(index_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", index_path.display())))?;
    let size = file.metadata().map_err(data_err)?.len();
    let (index, layout) =
        XbwIndex::load_with_layout(std::io::BufReader::new(file)).map_err(data_err)?;
    let space = index.space_report();
    println!("nodes               {}", index.node_count());
    println!("distinct labels     {}", index.sigma());
    println!("leaves              {}", index.leaf_count());
    println!("file size           {size} bytes");
    println!("  header            {} bytes", layout.header);
    println!("  symbol table      {} bytes", layout.symbol_table);
    println!("  bit arrays        {} bytes", layout.bit_arrays);
    println!("  wavelet matrices  {} bytes", layout.wavelet_matrices);
    println!("  f table           {} bytes", layout.f_table);
    println!("  id store          {} bytes", layout.id_store);
    println!("  checksum          {} bytes", layout.checksum);
    println!("symbol table text   {} bytes", index.symbol_table().text_bytes());
    println!(
        "rank/select payload {} bits, directories {} bits ({:.1}% overhead)",
        space.raw_payload_bits,
        space.directory_bits,
        100.0 * space.directory_bits as f64 / space.raw_payload_bits.max(1) as f64
    );
    Ok(ExitCode::SUCCESS)
}
