//! Dynamic directed multigraph with per-vertex incidence lists.
//!
//! Edges are appended to the incidence lists of their endpoints on insertion and
//! swap-removed on deletion, so both operations run in O(1). Edge identities are
//! handed out from a monotonically increasing counter and never reused.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense vertex identifier in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    #[inline]
    fn from(v: usize) -> Self {
        VertexId(v as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Edge identifier, unique over the lifetime of a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {vertex_count} vertices)")]
    VertexOutOfRange { vertex: VertexId, vertex_count: usize },
    #[error("edge {0} is not live")]
    DeadEdge(EdgeId),
}

/// One entry of an out-list (`other` is the head) or an in-list (`other` is the tail).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub edge: EdgeId,
    pub other: VertexId,
}

#[derive(Clone, Copy, Debug)]
struct EdgeSlot {
    tail: VertexId,
    head: VertexId,
    out_pos: u32,
    in_pos: u32,
}

#[derive(Clone, Debug, Default)]
pub struct DiGraph {
    out_edges: Vec<Vec<Incidence>>,
    in_edges: Vec<Vec<Incidence>>,
    edges: Vec<Option<EdgeSlot>>,
    // (tail, head) -> live parallel edges, oldest first
    by_endpoints: HashMap<(VertexId, VertexId), Vec<EdgeId>>,
    live_edges: usize,
}

impl DiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(n: usize) -> Self {
        DiGraph {
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
            ..Self::default()
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.out_edges.len()
    }

    /// Number of live edges.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    /// Upper bound (exclusive) on every `EdgeId` handed out so far.
    #[inline]
    pub fn edge_id_bound(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).map(VertexId::from)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId::from(self.vertex_count());
        self.out_edges.push(Vec::new());
        self.in_edges.push(Vec::new());
        id
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.index() < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count(),
            })
        }
    }

    pub fn add_edge(&mut self, tail: VertexId, head: VertexId) -> Result<EdgeId, GraphError> {
        self.check_vertex(tail)?;
        self.check_vertex(head)?;
        let id = EdgeId(self.edges.len() as u32);
        let out_list = &mut self.out_edges[tail.index()];
        let out_pos = out_list.len() as u32;
        out_list.push(Incidence { edge: id, other: head });
        let in_list = &mut self.in_edges[head.index()];
        let in_pos = in_list.len() as u32;
        in_list.push(Incidence { edge: id, other: tail });
        self.edges.push(Some(EdgeSlot {
            tail,
            head,
            out_pos,
            in_pos,
        }));
        self.by_endpoints.entry((tail, head)).or_default().push(id);
        self.live_edges += 1;
        Ok(id)
    }

    /// Removes a live edge and returns its `(tail, head)`.
    pub fn remove_edge(&mut self, e: EdgeId) -> Result<(VertexId, VertexId), GraphError> {
        let slot = self
            .edges
            .get_mut(e.index())
            .and_then(Option::take)
            .ok_or(GraphError::DeadEdge(e))?;

        let out_list = &mut self.out_edges[slot.tail.index()];
        out_list.swap_remove(slot.out_pos as usize);
        if let Some(moved) = out_list.get(slot.out_pos as usize) {
            if let Some(ms) = self.edges[moved.edge.index()].as_mut() {
                ms.out_pos = slot.out_pos;
            }
        }
        let in_list = &mut self.in_edges[slot.head.index()];
        in_list.swap_remove(slot.in_pos as usize);
        if let Some(moved) = in_list.get(slot.in_pos as usize) {
            if let Some(ms) = self.edges[moved.edge.index()].as_mut() {
                ms.in_pos = slot.in_pos;
            }
        }

        let key = (slot.tail, slot.head);
        if let Some(stack) = self.by_endpoints.get_mut(&key) {
            if let Some(i) = stack.iter().rposition(|&x| x == e) {
                stack.remove(i);
            }
            if stack.is_empty() {
                self.by_endpoints.remove(&key);
            }
        }
        self.live_edges -= 1;
        Ok((slot.tail, slot.head))
    }

    /// Most recently inserted live edge from `tail` to `head`, if any.
    pub fn find_edge(&self, tail: VertexId, head: VertexId) -> Option<EdgeId> {
        self.by_endpoints
            .get(&(tail, head))
            .and_then(|stack| stack.last().copied())
    }

    /// Number of live parallel edges from `tail` to `head`.
    pub fn multiplicity(&self, tail: VertexId, head: VertexId) -> usize {
        self.by_endpoints.get(&(tail, head)).map_or(0, Vec::len)
    }

    pub fn is_live(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(e.index()), Some(Some(_)))
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        self.edges
            .get(e.index())
            .and_then(|s| s.as_ref())
            .map(|s| (s.tail, s.head))
    }

    #[inline]
    pub fn out_edges(&self, v: VertexId) -> &[Incidence] {
        &self.out_edges[v.index()]
    }

    #[inline]
    pub fn in_edges(&self, v: VertexId) -> &[Incidence] {
        &self.in_edges[v.index()]
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_edges[v.index()].len()
    }

    #[inline]
    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_edges[v.index()].len()
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.out_degree(v) + self.in_degree(v)
    }

    /// Average out-degree `m / n`.
    pub fn density(&self) -> f64 {
        if self.vertex_count() == 0 {
            0.0
        } else {
            self.edge_count() as f64 / self.vertex_count() as f64
        }
    }

    /// Iterates over live edges as `(id, tail, head)` in id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (EdgeId(i as u32), s.tail, s.head)))
    }

    /// Full consistency scan of the incidence structure. Intended for tests and
    /// debug assertions; runs in O(n + m).
    pub fn check_consistency(&self) -> Result<(), String> {
        let mut live = 0usize;
        for (i, slot) in self.edges.iter().enumerate() {
            let Some(s) = slot else { continue };
            live += 1;
            let e = EdgeId(i as u32);
            let out = self.out_edges[s.tail.index()].get(s.out_pos as usize);
            if out != Some(&Incidence { edge: e, other: s.head }) {
                return Err(format!("{e} missing from out-list of {}", s.tail));
            }
            let inc = self.in_edges[s.head.index()].get(s.in_pos as usize);
            if inc != Some(&Incidence { edge: e, other: s.tail }) {
                return Err(format!("{e} missing from in-list of {}", s.head));
            }
        }
        let out_total: usize = self.out_edges.iter().map(Vec::len).sum();
        let in_total: usize = self.in_edges.iter().map(Vec::len).sum();
        if live != self.live_edges || out_total != live || in_total != live {
            return Err(format!(
                "edge counts disagree: live {live}, counter {}, out {out_total}, in {in_total}",
                self.live_edges
            ));
        }
        let indexed: usize = self.by_endpoints.values().map(Vec::len).sum();
        if indexed != live {
            return Err(format!("endpoint index holds {indexed} edges, expected {live}"));
        }
        Ok(())
    }
}
