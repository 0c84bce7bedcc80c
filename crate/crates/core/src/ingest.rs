//! Conversion of real-world temporal graph data into operation sequences.
//!
//! Two input shapes are supported: timestamped edge streams with one
//! `<tail> <head> <sign> <timestamp>` event per line, and ordered snapshot
//! files of `<tail> <head> [<relationship>]` lines.

use std::collections::HashMap;

use thiserror::Error;

use crate::generate::{snapshots_to_sequence, EdgeSet, GenError};
use crate::graph::VertexId;
use crate::sequence::{Operation, OperationSequence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no events")]
    Empty,
    #[error("no insertion carries the minimum timestamp {0}")]
    NoSource(i64),
    #[error("snapshot {0} is empty")]
    EmptySnapshot(usize),
    #[error(transparent)]
    Snapshots(#[from] GenError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalEdgeEvent {
    pub tail: String,
    pub head: String,
    pub insertion: bool,
    pub timestamp: i64,
}

/// Dense numbering of external vertex labels in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexRelabeling {
    labels: Vec<String>,
    ids: HashMap<String, VertexId>,
}

impl VertexRelabeling {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = VertexId::from(self.labels.len());
        self.labels.push(label.to_string());
        self.ids.insert(label.to_string(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<VertexId> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(v.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels indexed by vertex id.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.trim();
        (!line.is_empty() && !line.starts_with('%') && !line.starts_with('#')).then_some((i + 1, line))
    })
}

pub fn parse_temporal_stream(text: &str) -> Result<Vec<TemporalEdgeEvent>, IngestError> {
    let mut events = Vec::new();
    for (line, content) in data_lines(text) {
        let malformed = |message: String| IngestError::Malformed { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [tail, head, sign, timestamp, ..] = fields[..] else {
            return Err(malformed(format!(
                "expected `<tail> <head> <sign> <timestamp>`, got `{content}`"
            )));
        };
        let sign: i64 = sign
            .parse()
            .map_err(|_| malformed(format!("sign `{sign}` is not an integer")))?;
        if sign == 0 {
            return Err(malformed("sign must be positive or negative".into()));
        }
        let timestamp = timestamp
            .parse()
            .map_err(|_| malformed(format!("timestamp `{timestamp}` is not an integer")))?;
        events.push(TemporalEdgeEvent {
            tail: tail.to_string(),
            head: head.to_string(),
            insertion: sign > 0,
            timestamp,
        });
    }
    Ok(events)
}

/// Events with the smallest timestamp form the initial graph; every later event
/// becomes one update in timestamp order, file order breaking ties. The source
/// is the tail of the first minimum-timestamp insertion.
pub fn events_to_sequence(events: &[TemporalEdgeEvent]) -> Result<(OperationSequence, VertexRelabeling), IngestError> {
    let mut order: Vec<&TemporalEdgeEvent> = events.iter().collect();
    order.sort_by_key(|e| e.timestamp);
    let first_ts = order.first().ok_or(IngestError::Empty)?.timestamp;

    let mut labels = VertexRelabeling::new();
    let ids: Vec<(VertexId, VertexId)> = order
        .iter()
        .map(|e| (labels.intern(&e.tail), labels.intern(&e.head)))
        .collect();

    let split = order
        .iter()
        .position(|e| e.timestamp != first_ts)
        .unwrap_or(order.len());
    let source = order[..split]
        .iter()
        .zip(&ids)
        .find(|(e, _)| e.insertion)
        .map(|(_, &(u, _))| u)
        .ok_or(IngestError::NoSource(first_ts))?;

    let mut seq = OperationSequence::new(labels.len(), source);
    seq.lenient = true;
    for (e, &(u, v)) in order[..split].iter().zip(&ids) {
        if e.insertion {
            seq.initial_edges.push((u, v));
        } else if let Some(pos) = seq.initial_edges.iter().rposition(|&x| x == (u, v)) {
            seq.initial_edges.remove(pos);
        }
    }
    for (e, &(u, v)) in order[split..].iter().zip(&ids[split..]) {
        seq.ops.push(if e.insertion {
            Operation::AddEdge(u, v)
        } else {
            Operation::RemoveEdge(u, v)
        });
    }
    Ok((seq, labels))
}

/// Parses one snapshot file into directed labelled edges. Fields may be
/// separated by whitespace or `|`. A relationship of `1` or a missing third
/// column keeps `tail -> head`, `-1` reverses it, `0` (peers) and `2`
/// (siblings) yield both directions.
pub fn parse_snapshot(text: &str) -> Result<Vec<(String, String)>, IngestError> {
    let mut edges = Vec::new();
    for (line, content) in data_lines(text) {
        let malformed = |message: String| IngestError::Malformed { line, message };
        let fields: Vec<&str> = content
            .split(|c: char| c.is_whitespace() || c == '|')
            .filter(|f| !f.is_empty())
            .collect();
        let (a, b, rel) = match fields[..] {
            [a, b] => (a, b, 1),
            [a, b, rel, ..] => {
                let rel = rel
                    .parse::<i64>()
                    .map_err(|_| malformed(format!("relationship `{rel}` is not an integer")))?;
                (a, b, rel)
            }
            _ => {
                return Err(malformed(format!(
                    "expected `<tail> <head> [<relationship>]`, got `{content}`"
                )))
            }
        };
        let (a, b) = (a.to_string(), b.to_string());
        match rel {
            1 => edges.push((a, b)),
            -1 => edges.push((b, a)),
            0 | 2 => {
                edges.push((a.clone(), b.clone()));
                edges.push((b, a));
            }
            other => return Err(malformed(format!("unknown relationship `{other}`"))),
        }
    }
    Ok(edges)
}

/// Turns ordered snapshot files into an update stream over their joint label
/// space. `source_rank` picks among the first snapshot's vertices by
/// decreasing out-degree.
pub fn snapshots_from_texts<S: AsRef<str>>(
    texts: &[S],
    source_rank: usize,
    seed: u64,
) -> Result<(OperationSequence, VertexRelabeling), IngestError> {
    let mut labels = VertexRelabeling::new();
    let mut sets = Vec::with_capacity(texts.len());
    for (i, text) in texts.iter().enumerate() {
        let edges = parse_snapshot(text.as_ref())?;
        if edges.is_empty() {
            return Err(IngestError::EmptySnapshot(i));
        }
        let set: EdgeSet = edges
            .iter()
            .map(|(a, b)| (labels.intern(a), labels.intern(b)))
            .collect();
        sets.push(set);
    }
    if sets.is_empty() {
        return Err(IngestError::Empty);
    }
    let seq = snapshots_to_sequence(labels.len(), &sets, source_rank, seed)?;
    Ok((seq, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn single_insertion_event() {
        let ev = parse_temporal_stream("1 2 +1 100").unwrap();
        assert_eq!(
            ev,
            vec![TemporalEdgeEvent {
                tail: "1".into(),
                head: "2".into(),
                insertion: true,
                timestamp: 100
            }]
        );
    }

    #[test]
    fn comments_only() {
        assert!(parse_temporal_stream("% comment\n# other\n\n").unwrap().is_empty());
    }

    #[test]
    fn targetless_deletion_parses() {
        let ev = parse_temporal_stream("1 2 -1 100").unwrap();
        assert!(!ev[0].insertion);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = parse_temporal_stream("% c\n1 2 +1 5\n1 2 0 6").unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 3, .. }));
        let err = parse_temporal_stream("1 2 x 6").unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 1, .. }));
        let err = parse_temporal_stream("1 2 1").unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 1, .. }));
        let err = parse_temporal_stream("1 2 1 t").unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 1, .. }));
    }

    #[test]
    fn minimum_timestamp_forms_initial_graph() {
        let ev = parse_temporal_stream("a b +1 1\nb c +1 2").unwrap();
        let (seq, labels) = events_to_sequence(&ev).unwrap();
        assert_eq!(seq.initial_edges, vec![(v(0), v(1))]);
        assert_eq!(seq.ops, vec![Operation::AddEdge(v(1), v(2))]);
        assert_eq!(labels.label(seq.source), Some("a"));
        assert!(seq.lenient);
    }

    #[test]
    fn stable_sort_keeps_file_order() {
        let ev = parse_temporal_stream("x y +1 3\nq r +1 1\ny z +1 3\np q +1 2\nz x +1 3").unwrap();
        let (seq, labels) = events_to_sequence(&ev).unwrap();
        let named: Vec<(String, String)> = seq
            .ops
            .iter()
            .map(|op| match *op {
                Operation::AddEdge(a, b) => (labels.label(a).unwrap().into(), labels.label(b).unwrap().into()),
                _ => unreachable!(),
            })
            .collect();
        let expect = [("p", "q"), ("x", "y"), ("y", "z"), ("z", "x")];
        assert_eq!(named, expect.map(|(a, b)| (a.to_string(), b.to_string())));
    }

    #[test]
    fn deletions_in_initial_group() {
        let ev = parse_temporal_stream("a b -1 0\na b +1 0\nb c +1 0\nb c -1 0\nc a -1 0").unwrap();
        let (seq, labels) = events_to_sequence(&ev).unwrap();
        assert_eq!(labels.labels(), ["a", "b", "c"]);
        assert_eq!(seq.initial_edges, vec![(v(0), v(1))]);
        assert_eq!(seq.source, v(0));
    }

    #[test]
    fn missing_source() {
        let ev = parse_temporal_stream("a b -1 0\nb c +1 1").unwrap();
        assert_eq!(events_to_sequence(&ev).unwrap_err(), IngestError::NoSource(0));
        assert_eq!(events_to_sequence(&[]).unwrap_err(), IngestError::Empty);
    }

    #[test]
    fn relabeling_round_trip() {
        let mut r = VertexRelabeling::new();
        for l in ["10", "x", "10", "7"] {
            r.intern(l);
        }
        assert_eq!(r.len(), 3);
        for (i, l) in r.labels().iter().enumerate() {
            assert_eq!(r.id(l), Some(VertexId::from(i)));
        }
    }

    #[test]
    fn snapshot_relationships() {
        let edges = parse_snapshot("# c\n1|2|-1\n3 4 0\n5 6 1\n7 8 2\n9 10").unwrap();
        let s = |a: &str, b: &str| (a.to_string(), b.to_string());
        assert_eq!(
            edges,
            vec![
                s("2", "1"),
                s("3", "4"),
                s("4", "3"),
                s("5", "6"),
                s("7", "8"),
                s("8", "7"),
                s("9", "10")
            ]
        );
        assert!(parse_snapshot("1 2 5").is_err());
    }

    #[test]
    fn peer_gives_anti_parallel_pair() {
        let (seq, labels) = snapshots_from_texts(&["a b 0"], 0, 0).unwrap();
        let a = labels.id("a").unwrap();
        let b = labels.id("b").unwrap();
        assert!(seq.initial_edges.contains(&(a, b)) && seq.initial_edges.contains(&(b, a)));
    }

    #[test]
    fn identical_snapshots_have_no_updates() {
        let (seq, _) = snapshots_from_texts(&["a b 1\nb c 1", "b c 1\na b 1"], 0, 3).unwrap();
        assert!(seq.ops.is_empty());
    }

    #[test]
    fn empty_snapshot_is_rejected() {
        assert_eq!(
            snapshots_from_texts(&["a b 1", "% nothing"], 0, 0).unwrap_err(),
            IngestError::EmptySnapshot(1)
        );
    }
}
