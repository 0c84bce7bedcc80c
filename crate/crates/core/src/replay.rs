//! Replaying operation sequences against an algorithm, with per-operation
//! timing and work counters, plus oracle verification.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algorithm::{Counters, EdgeRef, SsrAlgorithm};
use crate::graph::{DiGraph, GraphError, VertexId};
use crate::oracle;
use crate::sequence::{Operation, OperationSequence, SequenceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Initialize,
    Insert,
    Delete,
    Query,
    /// Lenient-mode removal that found no matching edge.
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    /// Position in `ops`; `None` for initialization.
    pub op_index: Option<usize>,
    pub kind: OpKind,
    pub wall_time: Duration,
    pub counters: Counters,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("operation {op_index}: no live edge ({tail}, {head}) to remove")]
    MissingEdge {
        op_index: usize,
        tail: VertexId,
        head: VertexId,
    },
    #[error("algorithm source {algorithm} differs from sequence source {sequence}")]
    SourceMismatch { algorithm: VertexId, sequence: VertexId },
}

/// One replayed operation.
#[derive(Clone, Copy, Debug)]
pub struct Step {
    pub op: Operation,
    pub record: MeasurementRecord,
    pub answer: Option<bool>,
}

/// Step-by-step replay of a sequence. The session owns the graph; the
/// algorithm is borrowed so callers can inspect its state between steps.
pub struct Session<'a, A: SsrAlgorithm + ?Sized> {
    seq: &'a OperationSequence,
    alg: &'a mut A,
    graph: DiGraph,
    next: usize,
    init: MeasurementRecord,
}

impl<'a, A: SsrAlgorithm + ?Sized> Session<'a, A> {
    /// Loads the initial graph and runs (and times) `initialize`.
    pub fn start(seq: &'a OperationSequence, alg: &'a mut A) -> Result<Self, ReplayError> {
        seq.validate()?;
        if alg.source() != seq.source {
            return Err(ReplayError::SourceMismatch {
                algorithm: alg.source(),
                sequence: seq.source,
            });
        }
        let mut graph = DiGraph::with_vertices(seq.n);
        for &(u, v) in &seq.initial_edges {
            graph.add_edge(u, v)?;
        }
        let mut counters = Counters::default();
        let t0 = Instant::now();
        alg.initialize(&graph, &mut counters);
        let init = MeasurementRecord {
            op_index: None,
            kind: OpKind::Initialize,
            wall_time: t0.elapsed(),
            counters,
        };
        Ok(Session {
            seq,
            alg,
            graph,
            next: 0,
            init,
        })
    }

    pub fn init_record(&self) -> MeasurementRecord {
        self.init
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn algorithm(&self) -> &A {
        self.alg
    }

    /// Graph and algorithm together, for issuing extra queries between steps.
    pub fn parts_mut(&mut self) -> (&DiGraph, &mut A) {
        (&self.graph, self.alg)
    }

    /// Index of the next operation to replay.
    pub fn position(&self) -> usize {
        self.next
    }

    pub fn is_finished(&self) -> bool {
        self.next >= self.seq.ops.len()
    }

    pub fn step(&mut self) -> Option<Result<Step, ReplayError>> {
        let op_index = self.next;
        let op = *self.seq.ops.get(op_index)?;
        self.next += 1;
        let mut counters = Counters::default();
        let mut answer = None;
        let (kind, wall_time) = match op {
            Operation::AddEdge(u, v) => {
                let id = match self.graph.add_edge(u, v) {
                    Ok(id) => id,
                    Err(e) => return Some(Err(e.into())),
                };
                let edge = EdgeRef { id, tail: u, head: v };
                let t0 = Instant::now();
                self.alg.edge_inserted(&self.graph, edge, &mut counters);
                (OpKind::Insert, t0.elapsed())
            }
            Operation::RemoveEdge(u, v) => match self.graph.find_edge(u, v) {
                Some(id) => {
                    if let Err(e) = self.graph.remove_edge(id) {
                        return Some(Err(e.into()));
                    }
                    let edge = EdgeRef { id, tail: u, head: v };
                    let t0 = Instant::now();
                    self.alg.edge_deleted(&self.graph, edge, &mut counters);
                    (OpKind::Delete, t0.elapsed())
                }
                None if self.seq.lenient => (OpKind::Skipped, Duration::ZERO),
                None => {
                    return Some(Err(ReplayError::MissingEdge {
                        op_index,
                        tail: u,
                        head: v,
                    }))
                }
            },
            Operation::Query(t) => {
                let t0 = Instant::now();
                answer = Some(self.alg.query(&self.graph, t, &mut counters));
                (OpKind::Query, t0.elapsed())
            }
        };
        Some(Ok(Step {
            op,
            record: MeasurementRecord {
                op_index: Some(op_index),
                kind,
                wall_time,
                counters,
            },
            answer,
        }))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ReplayOptions {
    /// Wall-clock budget for the whole replay, initialization included.
    pub timeout: Option<Duration>,
}

#[derive(Clone, Debug)]
pub struct ReplayOutcome {
    pub init: MeasurementRecord,
    pub records: Vec<MeasurementRecord>,
    /// Answers of the `Query` operations, in order.
    pub answers: Vec<bool>,
    pub timed_out: bool,
}

impl ReplayOutcome {
    /// Sum of counters over all records of `kind`.
    pub fn counters_for(&self, kind: OpKind) -> Counters {
        let mut total = Counters::default();
        if kind == OpKind::Initialize {
            total += self.init.counters;
        }
        for r in self.records.iter().filter(|r| r.kind == kind) {
            total += r.counters;
        }
        total
    }

    pub fn time_for(&self, kind: OpKind) -> Duration {
        if kind == OpKind::Initialize {
            return self.init.wall_time;
        }
        self.records
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| r.wall_time)
            .sum()
    }

    /// Counter totals over initialization and every operation.
    pub fn total_counters(&self) -> Counters {
        let mut total = self.init.counters;
        for r in &self.records {
            total += r.counters;
        }
        total
    }
}

pub fn replay<A: SsrAlgorithm + ?Sized>(
    seq: &OperationSequence,
    alg: &mut A,
    options: ReplayOptions,
) -> Result<ReplayOutcome, ReplayError> {
    let started = Instant::now();
    let mut session = Session::start(seq, alg)?;
    let mut records = Vec::with_capacity(seq.ops.len());
    let mut answers = Vec::new();
    let mut timed_out = false;
    loop {
        if let Some(limit) = options.timeout {
            if started.elapsed() > limit {
                timed_out = !session.is_finished();
                break;
            }
        }
        let Some(step) = session.step() else { break };
        let step = step?;
        if let Some(a) = step.answer {
            answers.push(a);
        }
        records.push(step.record);
    }
    Ok(ReplayOutcome {
        init: session.init_record(),
        records,
        answers,
        timed_out,
    })
}

/// First point where an algorithm disagreed with the oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    /// Operation after which the mismatch was observed; `None` means right
    /// after initialization.
    pub op_index: Option<usize>,
    pub vertex: VertexId,
    pub expected: bool,
    pub actual: bool,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.op_index {
            Some(i) => write!(f, "after operation {i}")?,
            None => write!(f, "after initialization")?,
        }
        write!(
            f,
            ": vertex {} reported {}, oracle says {}",
            self.vertex,
            reach_word(self.actual),
            reach_word(self.expected)
        )
    }
}

fn reach_word(b: bool) -> &'static str {
    if b {
        "reachable"
    } else {
        "unreachable"
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("diverged from oracle {0}")]
    Diverged(Divergence),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub updates_checked: usize,
    pub queries_checked: usize,
}

/// Replays `seq` and, after initialization and after every update, queries
/// every vertex and compares against a fresh BFS. Query operations of the
/// sequence are compared as well.
pub fn verify_against_oracle<A: SsrAlgorithm + ?Sized>(
    seq: &OperationSequence,
    alg: &mut A,
) -> Result<VerifyReport, VerifyError> {
    let source = seq.source;
    let mut session = Session::start(seq, alg)?;
    let mut report = VerifyReport::default();
    sweep(&mut session, source, None)?;
    while let Some(step) = session.step() {
        let step = step?;
        let idx = step.record.op_index;
        match step.op {
            Operation::Query(t) => {
                let expected = oracle::oracle_reachable(session.graph(), source, t);
                let actual = step.answer.unwrap_or(!expected);
                if actual != expected {
                    return Err(VerifyError::Diverged(Divergence {
                        op_index: idx,
                        vertex: t,
                        expected,
                        actual,
                    }));
                }
                report.queries_checked += 1;
            }
            _ => {
                sweep(&mut session, source, idx)?;
                report.updates_checked += 1;
            }
        }
    }
    Ok(report)
}

fn sweep<A: SsrAlgorithm + ?Sized>(
    session: &mut Session<'_, A>,
    source: VertexId,
    op_index: Option<usize>,
) -> Result<(), VerifyError> {
    let (graph, alg) = session.parts_mut();
    let truth = oracle::reachable_set(graph, source);
    let mut scratch = Counters::default();
    for v in graph.vertices() {
        let actual = alg.query(graph, v, &mut scratch);
        if actual != truth[v.index()] {
            return Err(VerifyError::Diverged(Divergence {
                op_index,
                vertex: v,
                expected: truth[v.index()],
                actual,
            }));
        }
    }
    Ok(())
}
