//! Operation sequences and their line-oriented text encoding.
//!
//! ```text
//! # comment
//! n 4 source 0 lenient=1
//! i 0 1
//! a 1 2
//! d 0 1
//! q 2
//! ```
//!
//! The header line comes first, followed by the initial edges (`i`) and then the
//! operations (`a` insert, `d` delete, `q` query). `lenient=1` marks sequences
//! whose removals may target edges that are not present; those removals are
//! skipped during replay.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::graph::VertexId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    AddEdge(VertexId, VertexId),
    RemoveEdge(VertexId, VertexId),
    Query(VertexId),
}

impl Operation {
    pub fn is_update(&self) -> bool {
        !matches!(self, Operation::Query(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationSequence {
    pub n: usize,
    pub source: VertexId,
    pub initial_edges: Vec<(VertexId, VertexId)>,
    pub ops: Vec<Operation>,
    /// Removals of absent edges are skipped instead of rejected.
    pub lenient: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing header line `n <n> source <s>`")]
    MissingHeader,
    #[error("source {vertex} out of range for n = {n}")]
    SourceOutOfRange { vertex: VertexId, n: usize },
    #[error("vertex {vertex} out of range for n = {n} ({context})")]
    VertexOutOfRange {
        vertex: VertexId,
        n: usize,
        context: String,
    },
}

/// Summary numbers of a sequence, computed by simulating its edge multiset.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceStats {
    pub n: usize,
    pub initial_edges: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub queries: usize,
    /// Removals that find no live `(u, v)` edge when simulated.
    pub missing_removals: usize,
    pub final_edges: usize,
    /// Mean live-edge count over the initial graph and every update, divided by `n`.
    pub average_density: f64,
}

impl OperationSequence {
    pub fn new(n: usize, source: VertexId) -> Self {
        OperationSequence {
            n,
            source,
            initial_edges: Vec::new(),
            ops: Vec::new(),
            lenient: false,
        }
    }

    pub fn validate(&self) -> Result<(), SequenceError> {
        if self.source.index() >= self.n {
            return Err(SequenceError::SourceOutOfRange {
                vertex: self.source,
                n: self.n,
            });
        }
        let check = |v: VertexId, context: &dyn Fn() -> String| {
            if v.index() < self.n {
                Ok(())
            } else {
                Err(SequenceError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                    context: context(),
                })
            }
        };
        for (i, &(u, v)) in self.initial_edges.iter().enumerate() {
            check(u, &|| format!("initial edge {i}"))?;
            check(v, &|| format!("initial edge {i}"))?;
        }
        for (i, op) in self.ops.iter().enumerate() {
            let ctx = || format!("operation {i}");
            match *op {
                Operation::AddEdge(u, v) | Operation::RemoveEdge(u, v) => {
                    check(u, &ctx)?;
                    check(v, &ctx)?;
                }
                Operation::Query(t) => check(t, &ctx)?,
            }
        }
        Ok(())
    }

    pub fn update_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_update()).count()
    }

    pub fn stats(&self) -> SequenceStats {
        let mut live: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        for &e in &self.initial_edges {
            *live.entry(e).or_default() += 1;
        }
        let mut m = self.initial_edges.len();
        let mut density_sum = m as f64;
        let mut samples = 1usize;
        let (mut insertions, mut deletions, mut queries, mut missing) = (0, 0, 0, 0);
        for op in &self.ops {
            match *op {
                Operation::AddEdge(u, v) => {
                    insertions += 1;
                    *live.entry((u, v)).or_default() += 1;
                    m += 1;
                }
                Operation::RemoveEdge(u, v) => {
                    deletions += 1;
                    match live.get_mut(&(u, v)) {
                        Some(c) if *c > 0 => {
                            *c -= 1;
                            m -= 1;
                        }
                        _ => missing += 1,
                    }
                }
                Operation::Query(_) => {
                    queries += 1;
                    continue;
                }
            }
            density_sum += m as f64;
            samples += 1;
        }
        let average_density = if self.n == 0 {
            0.0
        } else {
            density_sum / samples as f64 / self.n as f64
        };
        SequenceStats {
            n: self.n,
            initial_edges: self.initial_edges.len(),
            insertions,
            deletions,
            queries,
            missing_removals: missing,
            final_edges: m,
            average_density,
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, SequenceError> {
        let mut seq: Option<OperationSequence> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| SequenceError::Parse { line: line_no, message };
            let mut tokens = line.split_whitespace();
            let tag = tokens.next().unwrap_or_default();
            let mut vertex = |what: &str| -> Result<VertexId, SequenceError> {
                let tok = tokens.next().ok_or_else(|| err(format!("missing {what}")))?;
                tok.parse::<u32>()
                    .map(VertexId)
                    .map_err(|_| err(format!("invalid {what} `{tok}`")))
            };

            let Some(current) = seq.as_mut() else {
                if tag != "n" {
                    return Err(SequenceError::MissingHeader);
                }
                seq = Some(parse_header(line).map_err(err)?);
                continue;
            };
            match tag {
                "i" => {
                    let (u, v) = (vertex("tail")?, vertex("head")?);
                    if !current.ops.is_empty() {
                        return Err(err("initial edge after the first operation".into()));
                    }
                    current.initial_edges.push((u, v));
                }
                "a" => {
                    let (u, v) = (vertex("tail")?, vertex("head")?);
                    current.ops.push(Operation::AddEdge(u, v));
                }
                "d" => {
                    let (u, v) = (vertex("tail")?, vertex("head")?);
                    current.ops.push(Operation::RemoveEdge(u, v));
                }
                "q" => {
                    let t = vertex("target")?;
                    current.ops.push(Operation::Query(t));
                }
                "n" => return Err(err("duplicate header".into())),
                other => return Err(err(format!("unknown record `{other}`"))),
            }
            if tokens.next().is_some() {
                return Err(err("trailing tokens".into()));
            }
        }
        let seq = seq.ok_or(SequenceError::MissingHeader)?;
        seq.validate()?;
        Ok(seq)
    }
}

fn parse_header(line: &str) -> Result<OperationSequence, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() < 4 || tokens[0] != "n" || tokens[2] != "source" {
        return Err("header must read `n <n> source <s>`".into());
    }
    let n = tokens[1]
        .parse::<usize>()
        .map_err(|_| format!("invalid vertex count `{}`", tokens[1]))?;
    let source = tokens[3]
        .parse::<u32>()
        .map_err(|_| format!("invalid source `{}`", tokens[3]))?;
    let mut seq = OperationSequence::new(n, VertexId(source));
    for extra in &tokens[4..] {
        match extra.split_once('=') {
            Some(("lenient", "1")) => seq.lenient = true,
            Some(("lenient", "0")) => seq.lenient = false,
            _ => return Err(format!("unknown header attribute `{extra}`")),
        }
    }
    Ok(seq)
}

impl FromStr for OperationSequence {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperationSequence::parse(s)
    }
}

impl fmt::Display for OperationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::with_capacity(16 * (self.initial_edges.len() + self.ops.len() + 1));
        write!(out, "n {} source {}", self.n, self.source)?;
        if self.lenient {
            out.push_str(" lenient=1");
        }
        out.push('\n');
        for (u, v) in &self.initial_edges {
            writeln!(out, "i {u} {v}")?;
        }
        for op in &self.ops {
            match op {
                Operation::AddEdge(u, v) => writeln!(out, "a {u} {v}")?,
                Operation::RemoveEdge(u, v) => writeln!(out, "d {u} {v}")?,
                Operation::Query(t) => writeln!(out, "q {t}")?,
            }
        }
        f.write_str(&out)
    }
}
