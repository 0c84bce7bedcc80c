//! Dynamized static graph search: pure (`sbfs`/`sdfs`), eager-caching
//! (`cbfs`/`cdfs`) and lazy-caching (`lbfs`/`ldfs`) variants.
//!
//! The caching variants only record whether a *critical* update happened since
//! the cache was built. An insertion is critical when it links a cached-reachable
//! tail to a cached-unreachable head; a deletion is critical when its head is
//! cached reachable.

use std::collections::VecDeque;

use crate::algorithm::{Counters, EdgeRef, SsrAlgorithm};
use crate::graph::{DiGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchOrder {
    Bfs,
    Dfs,
}

impl SearchOrder {
    pub fn suffix(self) -> &'static str {
        match self {
            SearchOrder::Bfs => "bfs",
            SearchOrder::Dfs => "dfs",
        }
    }
}

/// A graph search from the source that can be suspended and resumed.
///
/// A vertex counts as visited once discovered. Expansion of a vertex scans its
/// whole out-list in one go, so a suspended search holds no cursor into any
/// incidence list and survives graph mutations in between. BFS takes vertices
/// from the front of the frontier, DFS from the back.
#[derive(Clone, Debug)]
pub struct Traversal {
    order: SearchOrder,
    visited: Vec<bool>,
    frontier: VecDeque<VertexId>,
}

impl Traversal {
    pub fn new(vertex_count: usize, source: VertexId, order: SearchOrder, work: &mut Counters) -> Self {
        let mut visited = vec![false; vertex_count];
        visited[source.index()] = true;
        work.vertices_visited += 1;
        Traversal {
            order,
            visited,
            frontier: VecDeque::from([source]),
        }
    }

    #[inline]
    pub fn is_visited(&self, v: VertexId) -> bool {
        self.visited[v.index()]
    }

    pub fn is_exhausted(&self) -> bool {
        self.frontier.is_empty()
    }

    /// Expands vertices until `target` has been visited or the frontier runs
    /// dry. Returns whether `target` is visited. `None` runs to exhaustion.
    pub fn run(&mut self, graph: &DiGraph, target: Option<VertexId>, work: &mut Counters) -> bool {
        loop {
            if let Some(t) = target {
                if self.visited[t.index()] {
                    return true;
                }
            }
            let next = match self.order {
                SearchOrder::Bfs => self.frontier.pop_front(),
                SearchOrder::Dfs => self.frontier.pop_back(),
            };
            let Some(u) = next else {
                return target.is_some_and(|t| self.visited[t.index()]);
            };
            work.queue_pops += 1;
            let out = graph.out_edges(u);
            work.edges_scanned += out.len() as u64;
            for inc in out {
                let w = inc.other;
                if !self.visited[w.index()] {
                    self.visited[w.index()] = true;
                    work.vertices_visited += 1;
                    self.frontier.push_back(w);
                }
            }
        }
    }

    pub fn into_visited(self) -> Vec<bool> {
        self.visited
    }
}

/// Fresh search from `source` that stops as soon as `target` is visited.
pub fn static_query(
    graph: &DiGraph,
    source: VertexId,
    target: VertexId,
    order: SearchOrder,
    work: &mut Counters,
) -> bool {
    Traversal::new(graph.vertex_count(), source, order, work).run(graph, Some(target), work)
}

/// Critical-update bookkeeping shared by the caching variants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CriticalFlags {
    pub insertion: bool,
    pub deletion: bool,
}

impl CriticalFlags {
    pub fn mark_insertion(&mut self, tail_reachable: bool, head_reachable: bool) {
        if tail_reachable && !head_reachable {
            self.insertion = true;
        }
    }

    pub fn mark_deletion(&mut self, head_reachable: bool) {
        if head_reachable {
            self.deletion = true;
        }
    }

    /// Whether a cached answer for a vertex with the given cached state may be stale.
    pub fn invalidates(&self, cached_reachable: bool) -> bool {
        (self.insertion && !cached_reachable) || (self.deletion && cached_reachable)
    }

    pub fn clear(&mut self) {
        *self = CriticalFlags::default();
    }
}

/// `sbfs` / `sdfs`: no state, a full search per query.
#[derive(Clone, Debug)]
pub struct StaticSearch {
    source: VertexId,
    order: SearchOrder,
}

impl StaticSearch {
    pub fn new(source: VertexId, order: SearchOrder) -> Self {
        StaticSearch { source, order }
    }
}

impl SsrAlgorithm for StaticSearch {
    fn name(&self) -> String {
        format!("s{}", self.order.suffix())
    }

    fn source(&self) -> VertexId {
        self.source
    }

    fn initialize(&mut self, _: &DiGraph, _: &mut Counters) {}

    fn edge_inserted(&mut self, _: &DiGraph, _: EdgeRef, _: &mut Counters) {}

    fn edge_deleted(&mut self, _: &DiGraph, _: EdgeRef, _: &mut Counters) {}

    fn query(&mut self, graph: &DiGraph, target: VertexId, work: &mut Counters) -> bool {
        static_query(graph, self.source, target, self.order, work)
    }
}

/// `cbfs` / `cdfs`: reachability of every vertex cached, rebuilt in full when
/// a query hits a possibly stale entry.
#[derive(Clone, Debug)]
pub struct CachingSearch {
    source: VertexId,
    order: SearchOrder,
    cache: Vec<bool>,
    flags: CriticalFlags,
}

impl CachingSearch {
    pub fn new(source: VertexId, order: SearchOrder) -> Self {
        CachingSearch {
            source,
            order,
            cache: Vec::new(),
            flags: CriticalFlags::default(),
        }
    }

    pub fn flags(&self) -> CriticalFlags {
        self.flags
    }

    fn rebuild(&mut self, graph: &DiGraph, work: &mut Counters) {
        let mut t = Traversal::new(graph.vertex_count(), self.source, self.order, work);
        t.run(graph, None, work);
        self.cache = t.into_visited();
        self.flags.clear();
    }
}

impl SsrAlgorithm for CachingSearch {
    fn name(&self) -> String {
        format!("c{}", self.order.suffix())
    }

    fn source(&self) -> VertexId {
        self.source
    }

    fn initialize(&mut self, graph: &DiGraph, work: &mut Counters) {
        self.rebuild(graph, work);
    }

    fn edge_inserted(&mut self, _: &DiGraph, e: EdgeRef, _: &mut Counters) {
        self.flags
            .mark_insertion(self.cache[e.tail.index()], self.cache[e.head.index()]);
    }

    fn edge_deleted(&mut self, _: &DiGraph, e: EdgeRef, _: &mut Counters) {
        self.flags.mark_deletion(self.cache[e.head.index()]);
    }

    fn query(&mut self, graph: &DiGraph, target: VertexId, work: &mut Counters) -> bool {
        if self.flags.invalidates(self.cache[target.index()]) {
            work.recomputations += 1;
            self.rebuild(graph, work);
        }
        self.cache[target.index()]
    }
}

/// `lbfs` / `ldfs`: caches only what queries have uncovered and resumes the
/// suspended search when asked about a vertex not seen yet.
#[derive(Clone, Debug)]
pub struct LazySearch {
    source: VertexId,
    order: SearchOrder,
    search: Option<Traversal>,
    flags: CriticalFlags,
}

impl LazySearch {
    pub fn new(source: VertexId, order: SearchOrder) -> Self {
        LazySearch {
            source,
            order,
            search: None,
            flags: CriticalFlags::default(),
        }
    }

    pub fn flags(&self) -> CriticalFlags {
        self.flags
    }

    /// Whether every vertex reachable at the time of the last traversal step was found.
    pub fn is_exhausted(&self) -> bool {
        self.search.as_ref().is_some_and(Traversal::is_exhausted)
    }

    fn cached(&self, v: VertexId) -> bool {
        self.search.as_ref().is_some_and(|s| s.is_visited(v))
    }

    fn restart(&mut self, graph: &DiGraph, work: &mut Counters) -> &mut Traversal {
        self.flags.clear();
        self.search
            .insert(Traversal::new(graph.vertex_count(), self.source, self.order, work))
    }
}

impl SsrAlgorithm for LazySearch {
    fn name(&self) -> String {
        format!("l{}", self.order.suffix())
    }

    fn source(&self) -> VertexId {
        self.source
    }

    fn initialize(&mut self, graph: &DiGraph, work: &mut Counters) {
        self.restart(graph, work).run(graph, None, work);
    }

    fn edge_inserted(&mut self, _: &DiGraph, e: EdgeRef, _: &mut Counters) {
        let (u, v) = (self.cached(e.tail), self.cached(e.head));
        self.flags.mark_insertion(u, v);
    }

    fn edge_deleted(&mut self, _: &DiGraph, e: EdgeRef, _: &mut Counters) {
        let v = self.cached(e.head);
        self.flags.mark_deletion(v);
    }

    fn query(&mut self, graph: &DiGraph, target: VertexId, work: &mut Counters) -> bool {
        let cached = self.cached(target);
        if cached && !self.flags.deletion {
            return true;
        }
        if !cached && !self.flags.insertion {
            if let Some(search) = self.search.as_mut() {
                return search.run(graph, Some(target), work);
            }
        }
        work.recomputations += 1;
        self.restart(graph, work).run(graph, Some(target), work)
    }
}
