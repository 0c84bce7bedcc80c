//! The four-routine contract shared by every dynamic reachability algorithm.

use std::ops::AddAssign;

use crate::graph::{DiGraph, EdgeId, VertexId};

/// Work counters filled in by algorithms while they run.
///
/// All fields except `max_enqueues` are sums; `max_enqueues` is the largest
/// number of times a single vertex entered a repair queue within one routine
/// call and merges by maximum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub vertices_visited: u64,
    pub edges_scanned: u64,
    pub queue_pops: u64,
    pub recomputations: u64,
    pub max_enqueues: u64,
}

impl Counters {
    /// Traversal work: vertices visited plus edges scanned.
    #[inline]
    pub fn work(&self) -> u64 {
        self.vertices_visited + self.edges_scanned
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        *self == Counters::default()
    }
}

impl AddAssign for Counters {
    fn add_assign(&mut self, rhs: Self) {
        self.vertices_visited += rhs.vertices_visited;
        self.edges_scanned += rhs.edges_scanned;
        self.queue_pops += rhs.queue_pops;
        self.recomputations += rhs.recomputations;
        self.max_enqueues = self.max_enqueues.max(rhs.max_enqueues);
    }
}

/// An edge handed to the update routines. For deletions the edge is already
/// gone from the graph, so its endpoints travel with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRef {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

/// Fully dynamic single-source reachability.
///
/// The caller owns the graph. An insertion is applied to the graph before
/// `edge_inserted` runs; a deletion is applied before `edge_deleted` runs.
pub trait SsrAlgorithm {
    /// Canonical configuration string, e.g. `ses:5:0.5`.
    fn name(&self) -> String;

    fn source(&self) -> VertexId;

    fn initialize(&mut self, graph: &DiGraph, work: &mut Counters);

    fn edge_inserted(&mut self, graph: &DiGraph, edge: EdgeRef, work: &mut Counters);

    fn edge_deleted(&mut self, graph: &DiGraph, edge: EdgeRef, work: &mut Counters);

    /// Whether `target` is reachable from the source. Takes `&mut self` because
    /// caching variants refresh their cache lazily.
    fn query(&mut self, graph: &DiGraph, target: VertexId, work: &mut Counters) -> bool;
}

impl<A: SsrAlgorithm + ?Sized> SsrAlgorithm for Box<A> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn source(&self) -> VertexId {
        (**self).source()
    }
    fn initialize(&mut self, graph: &DiGraph, work: &mut Counters) {
        (**self).initialize(graph, work)
    }
    fn edge_inserted(&mut self, graph: &DiGraph, edge: EdgeRef, work: &mut Counters) {
        (**self).edge_inserted(graph, edge, work)
    }
    fn edge_deleted(&mut self, graph: &DiGraph, edge: EdgeRef, work: &mut Counters) {
        (**self).edge_deleted(graph, edge, work)
    }
    fn query(&mut self, graph: &DiGraph, target: VertexId, work: &mut Counters) -> bool {
        (**self).query(graph, target, work)
    }
}
