use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynreach::generate::{inject_query_batches, shuffle_sequence, GenSpec};
use dynreach::ingest::{events_to_sequence, parse_temporal_stream, snapshots_from_texts, VertexRelabeling};
use dynreach::{canonical_configs, AlgorithmSpec, OperationSequence};
use dynreach_bench::{apply_mode, instance_id, load_sequence, run_matrix, verify_all, write_csv, Job, Mode};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

#[derive(Parser)]
#[command(name = "dynreach", version, about = "Dynamic single-source reachability benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance from a key=value spec.
    Generate(GenerateArgs),
    /// Convert a temporal edge stream or snapshot files into an instance.
    Ingest(IngestArgs),
    /// Replay instances against algorithms and write a CSV of aggregates.
    Run(RunArgs),
    /// Check algorithms against the brute-force oracle and against each other.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct QueryInjection {
    /// Insert a batch of uniform queries after every N updates, given as N:BATCH.
    #[arg(long, value_name = "N:BATCH", value_parser = parse_injection)]
    inject_queries: Option<(usize, usize)>,
    /// Seed for injected queries and shuffling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Randomly permute the update operations.
    #[arg(long)]
    shuffle: bool,
}

#[derive(Args)]
struct GenerateArgs {
    /// Inline spec, e.g. "kind=er n=1000 d=2.5 sigma=1000 seed=1".
    #[arg(long, conflicts_with = "spec_file", required_unless_present = "spec_file")]
    spec: Option<String>,
    /// File holding the spec.
    #[arg(long)]
    spec_file: Option<PathBuf>,
    /// Overrides the seed given in the spec.
    #[arg(long)]
    gen_seed: Option<u64>,
    #[command(flatten)]
    post: QueryInjection,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// `<tail> <head> <sign> <timestamp>` lines.
    Temporal,
    /// Ordered snapshot files of `<tail> <head> [<relationship>]` lines.
    Snapshots,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long, value_enum)]
    format: InputFormat,
    /// Input files; snapshots are taken in the given order.
    #[arg(long, num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    /// Rank of the source among the first snapshot's highest out-degree vertices.
    #[arg(long, default_value_t = 0)]
    source_rank: usize,
    /// Seed for ordering snapshot differences.
    #[arg(long, default_value_t = 0)]
    diff_seed: u64,
    /// Writes `id label` lines mapping vertex ids back to input labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[command(flatten)]
    post: QueryInjection,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Lenient,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, num_args = 1.., required = true)]
    instance: Vec<PathBuf>,
    /// Algorithm specs; defaults to the 13 canonical configurations.
    #[arg(long, num_args = 1..)]
    algorithm: Vec<String>,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    /// Per-replay wall-clock budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Exit with status 3 if any replay timed out.
    #[arg(long)]
    fail_on_timeout: bool,
    /// Overrides the instances' lenient flag.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Run the oracle check before measuring.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, num_args = 1.., required = true)]
    instance: Vec<PathBuf>,
    /// Algorithm specs; defaults to the 13 canonical configurations.
    #[arg(long, num_args = 1..)]
    algorithm: Vec<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

fn parse_injection(s: &str) -> Result<(usize, usize), String> {
    let (every, batch) = s.split_once(':').ok_or("expected N:BATCH")?;
    let every = every.parse().map_err(|_| format!("bad N `{every}`"))?;
    let batch = batch.parse().map_err(|_| format!("bad BATCH `{batch}`"))?;
    Ok((every, batch))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn post_process(seq: OperationSequence, post: &QueryInjection) -> OperationSequence {
    let seq = if post.shuffle {
        shuffle_sequence(&seq, post.seed)
    } else {
        seq
    };
    match post.inject_queries {
        Some((every, batch)) => inject_query_batches(&seq, every, batch, post.seed),
        None => seq,
    }
}

fn generate(args: GenerateArgs) -> Outcome {
    let text = match (&args.spec, &args.spec_file) {
        (Some(s), _) => s.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => return Err(Failure::usage("one of --spec or --spec-file is required")),
    };
    let mut spec: GenSpec = text.parse().map_err(Failure::usage)?;
    if let Some(seed) = args.gen_seed {
        spec.set_seed(seed);
    }
    let seq = spec.generate().map_err(Failure::usage)?;
    write(&args.out, &post_process(seq, &args.post).to_text())
}

fn labels_text(labels: &VertexRelabeling) -> String {
    labels
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| format!("{i} {l}\n"))
        .collect()
}

fn ingest(args: IngestArgs) -> Outcome {
    let texts = args.input.iter().map(|p| read(p)).collect::<Result<Vec<_>, _>>()?;
    let (seq, labels) = match args.format {
        InputFormat::Temporal => {
            let mut events = Vec::new();
            for (path, text) in args.input.iter().zip(&texts) {
                let parsed =
                    parse_temporal_stream(text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                events.extend(parsed);
            }
            events_to_sequence(&events).map_err(Failure::usage)?
        }
        InputFormat::Snapshots => {
            snapshots_from_texts(&texts, args.source_rank, args.diff_seed).map_err(Failure::usage)?
        }
    };
    if let Some(path) = &args.labels {
        write(path, &labels_text(&labels))?;
    }
    write(&args.out, &post_process(seq, &args.post).to_text())
}

fn specs(given: &[String]) -> Result<Vec<AlgorithmSpec>, Failure> {
    if given.is_empty() {
        return Ok(canonical_configs());
    }
    given.iter().map(|s| s.parse().map_err(Failure::usage)).collect()
}

fn mode(arg: Option<ModeArg>) -> Option<Mode> {
    arg.map(|m| match m {
        ModeArg::Strict => Mode::Strict,
        ModeArg::Lenient => Mode::Lenient,
    })
}

fn load_all(paths: &[PathBuf], m: Option<ModeArg>) -> Result<Vec<(String, OperationSequence)>, Failure> {
    paths
        .iter()
        .map(|p| {
            let mut seq = load_sequence(p).map_err(Failure::usage)?;
            apply_mode(&mut seq, mode(m));
            Ok((instance_id(p), seq))
        })
        .collect()
}

fn verify_instances(instances: &[(String, OperationSequence)], specs: &[AlgorithmSpec]) -> Outcome {
    for (id, seq) in instances {
        match verify_all(seq, specs) {
            Ok(k) => eprintln!("{id}: {k} algorithms agree with the oracle"),
            Err(e) => {
                return Err(Failure {
                    code: EXIT_VERIFY,
                    message: format!("{id}: {e}"),
                })
            }
        }
    }
    Ok(())
}

fn run(args: RunArgs) -> Outcome {
    let specs = specs(&args.algorithm)?;
    if args.runs == 0 {
        return Err(Failure::usage("--runs must be at least 1"));
    }
    let timeout = match args.timeout {
        Some(t) if t.is_finite() && t >= 0.0 => Some(Duration::from_secs_f64(t)),
        Some(_) => return Err(Failure::usage("--timeout must be a non-negative number of seconds")),
        None => None,
    };
    let instances = load_all(&args.instance, args.mode)?;
    if args.verify {
        verify_instances(&instances, &specs)?;
    }
    let jobs: Vec<Job<'_>> = instances
        .iter()
        .flat_map(|(id, seq)| {
            specs.iter().map(move |&spec| Job {
                instance: id,
                sequence: seq,
                spec,
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(Failure::usage)?;
    let results = pool.install(|| run_matrix(&jobs, args.runs, timeout));
    let rows = results
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::usage)?;
    write_csv(&args.out, &rows).map_err(Failure::usage)?;
    let timed_out: Vec<String> = rows
        .iter()
        .filter(|r| r.timed_out)
        .map(|r| format!("{}/{}", r.instance, r.algorithm))
        .collect();
    if !timed_out.is_empty() {
        eprintln!("timed out: {}", timed_out.join(", "));
        if args.fail_on_timeout {
            return Err(Failure {
                code: EXIT_TIMEOUT,
                message: format!("{} replay(s) exceeded the timeout", timed_out.len()),
            });
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Outcome {
    let specs = specs(&args.algorithm)?;
    let instances = load_all(&args.instance, args.mode)?;
    verify_instances(&instances, &specs)
}

fn main() -> ExitCode {
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
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Ingest(a) => ingest(a),
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
