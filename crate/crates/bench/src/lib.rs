//! Benchmark harness: repeated replays with median aggregation, CSV output
//! and cross-algorithm verification.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use dynreach::registry::SpecError;
use dynreach::replay::{replay, OpKind, ReplayError, ReplayOptions, VerifyError};
use dynreach::sequence::SequenceError;
use dynreach::{verify_against_oracle, AlgorithmSpec, Counters, OperationSequence};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Instance { path: PathBuf, source: SequenceError },
    #[error("{algorithm}: {source}")]
    Replay { algorithm: String, source: ReplayError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("runs must be at least 1")]
    NoRuns,
}

impl BenchError {
    pub fn is_usage(&self) -> bool {
        matches!(self, BenchError::Spec(_) | BenchError::NoRuns)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Lenient,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub instance: PathBuf,
    pub algorithm: String,
    pub runs: usize,
    pub timeout: Option<Duration>,
    /// Overrides the sequence's own lenient flag when set.
    pub mode: Option<Mode>,
}

impl RunConfig {
    pub fn new(instance: impl Into<PathBuf>, algorithm: impl Into<String>) -> Self {
        RunConfig {
            instance: instance.into(),
            algorithm: algorithm.into(),
            runs: 3,
            timeout: None,
            mode: None,
        }
    }
}

/// Per-kind totals of one replay.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunTotals {
    pub init_time: Duration,
    pub insert_time: Duration,
    pub delete_time: Duration,
    pub query_time: Duration,
    pub insert: Counters,
    pub delete: Counters,
    pub query: Counters,
    pub init: Counters,
    pub timed_out: bool,
}

impl RunTotals {
    pub fn update_time(&self) -> Duration {
        self.insert_time + self.delete_time
    }

    pub fn counters(&self) -> Counters {
        let mut c = self.init;
        c += self.insert;
        c += self.delete;
        c += self.query;
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub instance: String,
    pub algorithm: String,
    pub n: usize,
    pub d_avg: f64,
    pub sigma: usize,
    pub init_time: Duration,
    pub total_insert_time: Duration,
    pub total_delete_time: Duration,
    pub total_update_time: Duration,
    pub total_query_time: Duration,
    pub insert: Counters,
    pub delete: Counters,
    pub query: Counters,
    pub counters: Counters,
    pub timed_out: bool,
}

/// Lower median; unaffected by the order of `values`.
pub fn median<T: Ord + Copy>(values: &[T]) -> T {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted[(sorted.len() - 1) / 2]
}

fn median_counters(runs: &[RunTotals], pick: impl Fn(&RunTotals) -> Counters) -> Counters {
    let field = |f: &dyn Fn(&Counters) -> u64| median(&runs.iter().map(|r| f(&pick(r))).collect::<Vec<_>>());
    Counters {
        vertices_visited: field(&|c| c.vertices_visited),
        edges_scanned: field(&|c| c.edges_scanned),
        queue_pops: field(&|c| c.queue_pops),
        recomputations: field(&|c| c.recomputations),
        max_enqueues: field(&|c| c.max_enqueues),
    }
}

/// Aggregates repeated runs by taking the median of every aggregate on its own.
pub fn aggregate(instance: &str, algorithm: &str, seq: &OperationSequence, runs: &[RunTotals]) -> AggregateRow {
    let times = |f: fn(&RunTotals) -> Duration| median(&runs.iter().map(f).collect::<Vec<_>>());
    let insert_time = times(|r| r.insert_time);
    let delete_time = times(|r| r.delete_time);
    AggregateRow {
        instance: instance.to_string(),
        algorithm: algorithm.to_string(),
        n: seq.n,
        d_avg: seq.stats().average_density,
        sigma: seq.ops.len(),
        init_time: times(|r| r.init_time),
        total_insert_time: insert_time,
        total_delete_time: delete_time,
        total_update_time: insert_time + delete_time,
        total_query_time: times(|r| r.query_time),
        insert: median_counters(runs, |r| r.insert),
        delete: median_counters(runs, |r| r.delete),
        query: median_counters(runs, |r| r.query),
        counters: median_counters(runs, RunTotals::counters),
        timed_out: runs.iter().any(|r| r.timed_out),
    }
}

/// Replays `seq` once on a fresh instance of `spec`.
pub fn run_once(
    seq: &OperationSequence,
    spec: &AlgorithmSpec,
    timeout: Option<Duration>,
) -> Result<RunTotals, BenchError> {
    let mut alg = spec.build(seq.source);
    let out = replay(seq, &mut alg, ReplayOptions { timeout }).map_err(|source| BenchError::Replay {
        algorithm: spec.to_string(),
        source,
    })?;
    Ok(RunTotals {
        init_time: out.init.wall_time,
        insert_time: out.time_for(OpKind::Insert),
        delete_time: out.time_for(OpKind::Delete),
        query_time: out.time_for(OpKind::Query),
        insert: out.counters_for(OpKind::Insert),
        delete: out.counters_for(OpKind::Delete),
        query: out.counters_for(OpKind::Query),
        init: out.init.counters,
        timed_out: out.timed_out,
    })
}

/// Replays `runs` times and aggregates. A timed-out run ends the series and
/// the row reports its partial totals.
pub fn run_sequence(
    instance: &str,
    seq: &OperationSequence,
    spec: &AlgorithmSpec,
    runs: usize,
    timeout: Option<Duration>,
) -> Result<AggregateRow, BenchError> {
    if runs == 0 {
        return Err(BenchError::NoRuns);
    }
    let mut totals = Vec::with_capacity(runs);
    for _ in 0..runs {
        let t = run_once(seq, spec, timeout)?;
        if t.timed_out {
            return Ok(aggregate(instance, &spec.to_string(), seq, &[t]));
        }
        totals.push(t);
    }
    Ok(aggregate(instance, &spec.to_string(), seq, &totals))
}

pub fn instance_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn load_sequence(path: &Path) -> Result<OperationSequence, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_owned(),
        source,
    })?;
    OperationSequence::parse(&text).map_err(|source| BenchError::Instance {
        path: path.to_owned(),
        source,
    })
}

pub fn apply_mode(seq: &mut OperationSequence, mode: Option<Mode>) {
    match mode {
        Some(Mode::Strict) => seq.lenient = false,
        Some(Mode::Lenient) => seq.lenient = true,
        None => {}
    }
}

pub fn run_benchmark(cfg: &RunConfig) -> Result<AggregateRow, BenchError> {
    let spec: AlgorithmSpec = cfg.algorithm.parse()?;
    let mut seq = load_sequence(&cfg.instance)?;
    apply_mode(&mut seq, cfg.mode);
    run_sequence(&instance_id(&cfg.instance), &seq, &spec, cfg.runs, cfg.timeout)
}

/// One (instance, algorithm) cell of a benchmark matrix.
#[derive(Clone, Debug)]
pub struct Job<'a> {
    pub instance: &'a str,
    pub sequence: &'a OperationSequence,
    pub spec: AlgorithmSpec,
}

/// Runs every job on the rayon pool; results come back in job order.
pub fn run_matrix(jobs: &[Job<'_>], runs: usize, timeout: Option<Duration>) -> Vec<Result<AggregateRow, BenchError>> {
    jobs.par_iter()
        .map(|job| run_sequence(job.instance, job.sequence, &job.spec, runs, timeout))
        .collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    algorithm: &'a str,
    n: usize,
    d_avg: String,
    sigma: usize,
    init_us: String,
    ins_us: String,
    del_us: String,
    upd_us: String,
    qry_us: String,
    vertices_visited: u64,
    edges_scanned: u64,
    queue_pops: u64,
    recomputations: u64,
    timed_out: bool,
}

pub const CSV_COLUMNS: [&str; 15] = [
    "instance",
    "algorithm",
    "n",
    "d_avg",
    "sigma",
    "init_us",
    "ins_us",
    "del_us",
    "upd_us",
    "qry_us",
    "vertices_visited",
    "edges_scanned",
    "queue_pops",
    "recomputations",
    "timed_out",
];

fn micros(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e6)
}

pub fn emit_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.serialize(CsvRow {
            instance: &r.instance,
            algorithm: &r.algorithm,
            n: r.n,
            d_avg: format!("{:.4}", r.d_avg),
            sigma: r.sigma,
            init_us: micros(r.init_time),
            ins_us: micros(r.total_insert_time),
            del_us: micros(r.total_delete_time),
            upd_us: micros(r.total_update_time),
            qry_us: micros(r.total_query_time),
            vertices_visited: r.counters.vertices_visited,
            edges_scanned: r.counters.edges_scanned,
            queue_pops: r.counters.queue_pops,
            recomputations: r.counters.recomputations,
            timed_out: r.timed_out,
        })?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: PathBuf::from("<csv>"),
        source,
    })?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[AggregateRow]) -> Result<(), BenchError> {
    let io = |source| BenchError::Io {
        path: path.to_owned(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    emit_csv(rows, std::io::BufWriter::new(file))
}

#[derive(Debug, Error)]
pub enum VerificationFailure {
    #[error("{algorithm}: {source}")]
    Oracle { algorithm: String, source: VerifyError },
    #[error("{algorithm} answered query {index} differently from {reference}")]
    Answers {
        algorithm: String,
        reference: String,
        index: usize,
    },
}

/// Checks every algorithm against the oracle and checks that all of them
/// return the same query-answer vector.
pub fn verify_all(seq: &OperationSequence, specs: &[AlgorithmSpec]) -> Result<usize, VerificationFailure> {
    let outcomes: Vec<Result<Vec<bool>, VerificationFailure>> = specs
        .par_iter()
        .map(|spec| {
            let algorithm = spec.to_string();
            let mut alg = spec.build(seq.source);
            verify_against_oracle(seq, &mut alg).map_err(|source| VerificationFailure::Oracle {
                algorithm: algorithm.clone(),
                source,
            })?;
            let mut alg = spec.build(seq.source);
            replay(seq, &mut alg, ReplayOptions::default())
                .map(|o| o.answers)
                .map_err(|e| VerificationFailure::Oracle {
                    algorithm,
                    source: e.into(),
                })
        })
        .collect();
    let mut reference: Option<(String, Vec<bool>)> = None;
    for (spec, outcome) in specs.iter().zip(outcomes) {
        let answers = outcome?;
        match &reference {
            None => reference = Some((spec.to_string(), answers)),
            Some((name, expected)) => {
                if let Some(index) = expected.iter().zip(&answers).position(|(a, b)| a != b) {
                    return Err(VerificationFailure::Answers {
                        algorithm: spec.to_string(),
                        reference: name.clone(),
                        index,
                    });
                }
            }
        }
    }
    Ok(specs.len())
}
