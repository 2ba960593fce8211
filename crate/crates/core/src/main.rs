use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use parsemem::bundle::{self, BuildParams, IndexBundle};
use parsemem::fasta::{read_patterns, read_text, AlphabetMode};
use parsemem::filters::FilterKind;
use parsemem::parsing::{KmerOrder, MinimizerParams, RollingHasher};
use parsemem::pseudomem::Selection;
use parsemem::query::{self, Mode, QueryParams, QueryReport, Status};
use parsemem::verify::{check_index_file, run_suites, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "parsemem",
    version,
    about = "Find long f-MEMs of patterns against an indexed text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index a FASTA or raw text file.
    Build(BuildArgs),
    /// Report f-MEMs of each pattern as TSV.
    Query(QueryArgs),
    /// Report per-pattern search totals as TSV.
    Stats(QueryArgs),
    /// Run the seeded property suites, or check an index file.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// FASTA or raw text to index.
    text: PathBuf,
    /// Output index file.
    #[arg(short, long, env = "PARSEMEM_INDEX")]
    output: PathBuf,
    /// Parse window width.
    #[arg(short, default_value_t = bundle::DEFAULT_WINDOW)]
    w: usize,
    /// Parse trigger modulus.
    #[arg(short, default_value_t = bundle::DEFAULT_TRIGGER_MODULUS)]
    p: u64,
    /// k-mer length for the k-mer filter.
    #[arg(short, default_value_t = bundle::DEFAULT_KMER_LEN)]
    k: usize,
    #[arg(long, default_value_t = bundle::DEFAULT_MINIMIZER_K)]
    minimizer_k: usize,
    #[arg(long, default_value_t = bundle::DEFAULT_MINIMIZER_W)]
    minimizer_w: usize,
    /// Rank minimizer k-mers by a seeded hash instead of lexicographically.
    #[arg(long)]
    hashed_minimizers: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target false-positive rate of both filters.
    #[arg(long, default_value_t = bundle::DEFAULT_FILTER_FPR)]
    filter_fpr: f64,
    /// Store exact k-mer and phrase counts instead of counting filters.
    #[arg(long)]
    exact_filter: bool,
    /// Reject characters other than ACGT.
    #[arg(long)]
    dna: bool,
}

#[derive(Args)]
struct QueryArgs {
    /// FASTA or one pattern per line.
    patterns: PathBuf,
    /// Index file.
    #[arg(short, long, env = "PARSEMEM_INDEX")]
    index: PathBuf,
    #[arg(long, default_value = "parse")]
    mode: Mode,
    /// Minimum number of occurrences in the text.
    #[arg(short, default_value_t = 1)]
    f: usize,
    /// Report the t longest f-MEMs (ties kept).
    #[arg(short, conflicts_with = "min_len")]
    t: Option<usize>,
    /// Report f-MEMs of at least this length.
    #[arg(short = 'L', id = "min_len")]
    min_len: Option<usize>,
    /// Expected k-mer length; rejected if it differs from the index.
    #[arg(short)]
    k: Option<usize>,
    /// Expected window width; rejected if it differs from the index.
    #[arg(short)]
    w: Option<usize>,
    /// Expected trigger modulus; rejected if it differs from the index.
    #[arg(short)]
    p: Option<u64>,
    /// Reject pattern characters other than ACGT.
    #[arg(long)]
    dna: bool,
    /// Also write pseudo-MEMs as TSV to this file.
    #[arg(long)]
    pseudo_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, default_value_t = 2000)]
    max_text: usize,
    #[arg(long, default_value_t = 200)]
    max_pattern: usize,
    /// Check this index file instead of running the suites.
    #[arg(long)]
    index: Option<PathBuf>,
}

enum Failure {
    Verify(String),
    Usage(String),
    Io(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    Ok(fs::read(path).with_context(|| format!("reading {}", path.display()))?)
}

fn alphabet(dna: bool) -> AlphabetMode {
    if dna {
        AlphabetMode::Dna
    } else {
        AlphabetMode::Raw
    }
}

fn cmd_build(a: BuildArgs) -> Result<(), Failure> {
    let order = if a.hashed_minimizers {
        KmerOrder::Hashed { seed: a.seed }
    } else {
        KmerOrder::Lexicographic
    };
    let minimizer =
        MinimizerParams::new(a.minimizer_k, a.minimizer_w, order).map_err(|e| Failure::Usage(e.to_string()))?;
    let hasher = RollingHasher::with_defaults(a.w, a.p).map_err(|e| Failure::Usage(e.to_string()))?;
    if a.k == 0 {
        return Err(Failure::Usage("-k must be at least 1".into()));
    }
    if !(a.filter_fpr > 0.0 && a.filter_fpr < 1.0) {
        return Err(Failure::Usage(format!("--filter-fpr {} outside (0, 1)", a.filter_fpr)));
    }
    let params = BuildParams {
        window: a.w,
        trigger_modulus: a.p,
        hash_base: hasher.base(),
        hash_prime: hasher.modulus(),
        kmer_len: a.k,
        minimizer,
        filter_kind: if a.exact_filter {
            FilterKind::Exact
        } else {
            FilterKind::Counting
        },
        filter_fpr: a.filter_fpr,
        seed: a.seed,
        dna: a.dna,
    };
    let text = read_text(&read(&a.text)?, alphabet(a.dna)).map_err(|e| Failure::Io(e.into()))?;
    let index = IndexBundle::build(text, params).map_err(|e| Failure::Io(e.into()))?;
    fs::write(&a.output, index.to_bytes()).with_context(|| format!("writing {}", a.output.display()))?;
    Ok(())
}

fn load(a: &QueryArgs) -> Result<Vec<QueryReport>, Failure> {
    let f = |t: usize| -> Result<usize, Failure> {
        if t == 0 {
            return Err(Failure::Usage("-f, -t and -L must be at least 1".into()));
        }
        Ok(t)
    };
    let selection = match (a.t, a.min_len) {
        (Some(t), _) => Selection::Top(f(t)?),
        (_, Some(l)) => Selection::MinLen(f(l)?),
        _ => Selection::MinLen(1),
    };
    let params = QueryParams {
        mode: a.mode,
        f: f(a.f)?,
        selection,
    };
    let bytes = read(&a.index)?;
    let built = IndexBundle::read_params(&bytes).with_context(|| format!("loading {}", a.index.display()))?;
    for (flag, given, stored) in [
        ("-k", a.k.map(|v| v as u64), built.kmer_len as u64),
        ("-w", a.w.map(|v| v as u64), built.window as u64),
        ("-p", a.p, built.trigger_modulus),
    ] {
        if given.is_some_and(|g| g != stored) {
            return Err(Failure::Usage(format!(
                "{flag} {} differs from the index's {stored}",
                given.unwrap()
            )));
        }
    }
    if a.mode == Mode::Kebab {
        match selection {
            Selection::MinLen(l) if l <= built.kmer_len => eprintln!(
                "warning: the k-mer filter only guarantees MEMs of length at least k = {}; -L {l} should exceed it",
                built.kmer_len
            ),
            Selection::Top(_) => eprintln!(
                "warning: the k-mer filter only guarantees MEMs of length at least k = {}",
                built.kmer_len
            ),
            _ => {}
        }
    }
    let index = IndexBundle::from_bytes(&bytes).with_context(|| format!("loading {}", a.index.display()))?;
    let records =
        read_patterns(&read(&a.patterns)?, alphabet(a.dna || built.dna)).map_err(|e| Failure::Io(e.into()))?;
    let mut reports = Vec::with_capacity(records.len());
    for r in query::run_all(&index, &records, &params) {
        let r = r.map_err(|e| Failure::Io(e.into()))?;
        match r.status {
            Status::EmptyPattern => eprintln!("warning: pattern {} is empty", r.pattern_id),
            Status::ShorterThanK => eprintln!("warning: pattern {} is shorter than k", r.pattern_id),
            Status::Ok => {}
        }
        reports.push(r);
    }
    Ok(reports)
}

fn cmd_query(a: QueryArgs) -> Result<(), Failure> {
    let reports = load(&a)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "{}", query::MEM_HEADER).context("writing output")?;
    for r in &reports {
        query::write_mems(&mut out, r).context("writing output")?;
    }
    out.flush().context("writing output")?;
    if let Some(path) = &a.pseudo_out {
        let mut file = BufWriter::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?);
        writeln!(file, "{}", query::PSEUDO_MEM_HEADER).context("writing pseudo-MEMs")?;
        for r in &reports {
            query::write_pseudo_mems(&mut file, r).context("writing pseudo-MEMs")?;
        }
        file.flush().context("writing pseudo-MEMs")?;
    }
    Ok(())
}

fn cmd_stats(a: QueryArgs) -> Result<(), Failure> {
    let reports = load(&a)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "{}", query::STATS_HEADER).context("writing output")?;
    for r in &reports {
        query::write_stats(&mut out, r).context("writing output")?;
    }
    out.flush().context("writing output")?;
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    if let Some(path) = a.index {
        let bytes = read(&path)?;
        return match check_index_file(&bytes) {
            Ok(()) => {
                println!("index\t{}\tok", path.display());
                Ok(())
            }
            Err(e) => Err(Failure::Verify(format!("index {}: {e}", path.display()))),
        };
    }
    if a.max_text == 0 || a.max_pattern == 0 {
        return Err(Failure::Usage("size limits must be at least 1".into()));
    }
    let cfg = VerifyConfig {
        seed: a.seed,
        instances: a.instances,
        max_text_len: a.max_text,
        max_pattern_len: a.max_pattern,
    };
    let outcomes = run_suites(&cfg);
    let mut failed = Vec::new();
    for o in &outcomes {
        println!(
            "{}\t{}/{}\t{}",
            o.name,
            o.passed,
            o.checked,
            if o.ok() { "pass" } else { "FAIL" }
        );
        if let Some(e) = &o.first_failure {
            eprintln!("{}: {e}", o.name);
            failed.push(o.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("failed: {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
