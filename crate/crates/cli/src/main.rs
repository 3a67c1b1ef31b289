use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use wordsurprise::analyze::Analysis;
use wordsurprise::oracle::ORACLE_CAP;
use wordsurprise::text::sniff_format;
use wordsurprise::verify::verify;
use wordsurprise::{
    analyze, default_max_len, ingest, sort_records, write_tsv, AnalysisConfig, BwtIndex, Error, Format, MarkovModel,
    Mode, Text, ZScore,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "wordsurprise", version, about = "Over- and under-represented substrings of a text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score maximal repeats and minimal rare/absent words and write a TSV report.
    Analyze(AnalyzeArgs),
    /// Compare every computed class, border and moment with brute force (small inputs).
    Verify(InputArgs),
    /// Write traversal telemetry as JSON lines.
    Stats(StatsArgs),
    /// Report the suffix interval and count of a literal pattern.
    Lookup {
        #[command(flatten)]
        input: InputArgs,
        pattern: String,
    },
}

#[derive(Args)]
struct InputArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// `empirical`, `uniform`, or a path to a `<symbol> <probability>` file.
    #[arg(long, default_value = "empirical")]
    model: String,
}

#[derive(Args)]
struct ScoringArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    z_min: f64,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    z_max: f64,
    /// Longest reported string (default: ceil(log_sigma N) + slack).
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long, default_value_t = 4)]
    slack: usize,
    /// Keep variance data only where maximal-repeat scoring reads it.
    #[arg(long)]
    fast_path: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scoring: ScoringArgs,
    /// Significant digits of floating-point columns.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write JSON-lines telemetry to this path.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Cross-check against brute force before reporting.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scoring: ScoringArgs,
    /// Stack sample period in nodes.
    #[arg(long, default_value_t = 1000)]
    sample_every: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Plain,
    Fasta,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Over,
    Under,
    Both,
    All,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Over => Mode::Over,
            ModeArg::Under => Mode::Under,
            ModeArg::Both => Mode::Both,
            ModeArg::All => Mode::All,
        }
    }
}

/// Verification found mismatches; already reported.
#[derive(Debug)]
struct VerifyFailed;

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for VerifyFailed {}

struct Loaded {
    text: Text,
    index: BwtIndex,
    model: MarkovModel,
}

fn load(args: &InputArgs) -> anyhow::Result<Loaded> {
    let bytes = std::fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let format = match args.format {
        FormatArg::Auto => sniff_format(&bytes),
        FormatArg::Plain => Format::Plain,
        FormatArg::Fasta => Format::Fasta,
    };
    let text = ingest(&bytes, format)?;
    let model = match args.model.as_str() {
        "empirical" => MarkovModel::empirical(&text),
        "uniform" => MarkovModel::uniform(&text),
        path => {
            let spec = std::fs::read_to_string(path).with_context(|| format!("reading model {path}"))?;
            MarkovModel::parse(&text, &spec)?
        }
    };
    let start = Instant::now();
    let index = BwtIndex::build(&text);
    log::info!(
        "n={} sigma={} N={} model={} index {:.2}s, {} bytes",
        text.len(),
        text.sigma(),
        model.scoring_len(),
        model.source(),
        start.elapsed().as_secs_f64(),
        index.size_in_bytes()
    );
    Ok(Loaded { text, index, model })
}

fn config(loaded: &Loaded, scoring: &ScoringArgs, sample_every: u64) -> AnalysisConfig {
    AnalysisConfig {
        mode: scoring.mode.into(),
        z_min: scoring.z_min,
        z_max: scoring.z_max,
        max_len: scoring
            .max_len
            .or_else(|| default_max_len(loaded.text.sigma(), loaded.model.scoring_len(), scoring.slack)),
        fast_path: scoring.fast_path,
        collect_probes: false,
        sample_every,
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_verify(loaded: &Loaded) -> anyhow::Result<()> {
    if loaded.text.len() > ORACLE_CAP {
        bail!(Error::OracleCap {
            n: loaded.text.len(),
            limit: ORACLE_CAP
        });
    }
    let (report, _) = verify(&loaded.text, &loaded.index, &loaded.model)?;
    eprintln!(
        "verify: {} set, {} count, {} border, {} phi/gamma, {} moment checks, {} mismatches",
        report.set_checks,
        report.count_checks,
        report.border_checks,
        report.phi_checks,
        report.moment_checks,
        report.mismatches.len()
    );
    for m in report.mismatches.iter().take(20) {
        eprintln!("  {m}");
    }
    if !report.passed() {
        bail!(VerifyFailed);
    }
    Ok(())
}

fn write_stats(out: &mut dyn Write, loaded: &Loaded, a: &Analysis, elapsed_ms: u128) -> anyhow::Result<()> {
    for s in &a.traversal.samples {
        let line = json!({
            "type": "sample",
            "node": s.node,
            "depth": s.depth,
            "frames": s.frames,
            "frame_bits": s.frame_bits,
            "aux_bits": s.aux_bits,
            "total_bits": s.frame_bits + s.aux_bits,
        });
        writeln!(out, "{line}")?;
    }
    let depths = a.read_histogram.len().max(a.traversal.depth_histogram.len());
    for d in 0..depths {
        let line = json!({
            "type": "depth",
            "depth": d,
            "reads": a.read_histogram.get(d).copied().unwrap_or(0),
            "nodes": a.traversal.depth_histogram.get(d).copied().unwrap_or(0),
        });
        writeln!(out, "{line}")?;
    }
    let summary = json!({
        "type": "summary",
        "n": a.n,
        "sigma": a.sigma,
        "scoring_length": a.scoring_len,
        "model": loaded.model.source(),
        "max_len": a.max_len,
        "nodes": a.traversal.nodes,
        "left_extensions": a.traversal.left_extensions,
        "max_frames": a.traversal.max_frames,
        "max_stack_bits": a.traversal.max_stack_bits,
        "average_stack_bits": a.average_stack_bits(),
        "text_bits": a.n as f64 * (a.sigma.max(2) as f64).log2(),
        "return_arcs": a.borders.return_arcs,
        "char_stack_entries": a.borders.char_entries,
        "classes": &a.classes,
        "records": a.records.len(),
        "bounds": a.bound_checks(),
        "index_bytes": loaded.index.size_in_bytes(),
        "elapsed_ms": elapsed_ms,
    });
    writeln!(out, "{summary}")?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Analyze(args) => {
            let loaded = load(&args.input)?;
            let config = config(&loaded, &args.scoring, if args.stats.is_some() { 1000 } else { 0 });
            if args.verify {
                run_verify(&loaded)?;
            }
            let start = Instant::now();
            let mut a = analyze(&loaded.text, &loaded.index, &loaded.model, &ZScore::default(), config)?;
            let elapsed = start.elapsed();
            log::info!(
                "{} nodes, {} records in {:.2}s",
                a.traversal.nodes,
                a.records.len(),
                elapsed.as_secs_f64()
            );
            sort_records(&mut a.records, config.mode);
            let mut out = output(args.output.as_deref())?;
            write_tsv(&mut out, &loaded.text, &a.records, args.precision as usize)?;
            out.flush()?;
            if let Some(path) = &args.stats {
                let mut s = output(Some(path))?;
                write_stats(&mut s, &loaded, &a, elapsed.as_millis())?;
                s.flush()?;
            }
        }
        Command::Verify(args) => {
            let loaded = load(&args)?;
            run_verify(&loaded)?;
            println!("ok");
        }
        Command::Stats(args) => {
            let loaded = load(&args.input)?;
            let config = config(&loaded, &args.scoring, args.sample_every);
            let start = Instant::now();
            let a = analyze(&loaded.text, &loaded.index, &loaded.model, &ZScore::default(), config)?;
            let mut out = output(args.output.as_deref())?;
            write_stats(&mut out, &loaded, &a, start.elapsed().as_millis())?;
            out.flush()?;
        }
        Command::Lookup { input, pattern } => {
            let loaded = load(&input)?;
            let mut out = output(None)?;
            let hit = loaded
                .text
                .encode(pattern.as_bytes())
                .and_then(|codes| loaded.index.backward_search(&codes));
            match hit {
                // 1-based inclusive interval among the sorted suffixes
                Some(r) => writeln!(out, "{pattern}\t{}\t{}\t{}", r.start + 1, r.end, r.len())?,
                None => writeln!(out, "{pattern}\t-\t-\t0")?,
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerifyFailed>().is_some() {
        return EXIT_VERIFY;
    }
    for cause in err.chain() {
        if cause.downcast_ref::<io::Error>().is_some() {
            return EXIT_IO;
        }
        if let Some(Error::Io(_)) = cause.downcast_ref::<Error>() {
            return EXIT_IO;
        }
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
